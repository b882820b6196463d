#pragma once

#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "chaosbench/cli/config.hpp"
#include "chaosbench/core/grid.hpp"
#include "chaosbench/drift/spectrum.hpp"
#include "chaosbench/experiments/ergodic.hpp"
#include "chaosbench/experiments/exit_time.hpp"
#include "chaosbench/experiments/mollification.hpp"
#include "chaosbench/experiments/output.hpp"
#include "chaosbench/experiments/presets.hpp"
#include "chaosbench/experiments/representation.hpp"
#include "chaosbench/experiments/strong_error.hpp"
#include "chaosbench/experiments/weak_error.hpp"
#include "chaosbench/functionals/kuramoto_rotinv.hpp"
#include "chaosbench/functionals/mollify.hpp"
#include "chaosbench/pde/galerkin_matrix.hpp"
#include "chaosbench/pde/stationary.hpp"

namespace chaosbench::cli {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"simulate",     "fp-solve",      "stationary", "spectrum", "weak-error",
                                          "strong-error", "ergodic-decay", "exit-time",  "check",    "mollify-test"};
  return s;
}

enum ExitCode : int { ok = 0, error = 1, assertion_failed = 2 };

// -- section builders --------------------------------------------------------

inline DriftSpec parse_drift(const Section& s) {
  const std::string kind = s.string("kind");
  if (kind == "kuramoto") {
    s.allow({"kind", "kappa"});
    return Kuramoto{s.number("kappa")};
  }
  if (kind == "convolution") {
    s.allow({"kind", "kappa", "w"});
    const auto w = s.numbers("w");
    if (w.empty()) s.fail("w", "must list at least one coefficient");
    return ConvolutionGradient{PotentialSpec::cosine_series(w), s.number("kappa")};
  }
  if (kind == "heat") {
    s.allow({"kind"});
    return presets::heat();
  }
  if (kind == "double-well") {
    s.allow({"kind", "eps", "depth"});
    return presets::double_well(s.number("eps", 0.05), s.number("depth", 1.0));
  }
  s.fail("kind", "must be one of kuramoto, convolution, heat, double-well (got '" + kind + "')");
}

inline SpectralField parse_initial(const Section& s) {
  const std::string kind = s.string("kind");
  const int cutoff = static_cast<int>(s.integer("cutoff", 32));
  if (cutoff < 1) s.fail("cutoff", "must be >= 1");
  if (kind == "uniform") {
    s.allow({"kind", "cutoff"});
    return SpectralField::uniform(ModeLattice(1, cutoff));
  }
  if (kind == "cosine") {
    s.allow({"kind", "cutoff", "a"});
    return presets::cosine_density(cutoff, s.number("a"));
  }
  if (kind == "trig") {
    s.allow({"kind", "cutoff", "modes"});
    const auto modes = s.complexes("modes");
    if (modes.size() > static_cast<std::size_t>(cutoff)) s.fail("modes", "has more entries than the cutoff");
    return presets::trig_density(cutoff, modes);
  }
  s.fail("kind", "must be one of uniform, cosine, trig (got '" + kind + "')");
}

inline FunctionalPtr parse_functional(const Section& s) {
  const std::string kind = s.string("kind");
  if (kind == "linear") {
    s.allow({"kind", "g", "cutoff"});
    const auto g = s.complexes("g");
    if (g.empty()) s.fail("g", "must list at least one coefficient");
    // a larger cutoff only pads with zeros; mollification wants room
    const ModeLattice lat(1, std::max(static_cast<int>(g.size()), static_cast<int>(s.integer("cutoff", 1))));
    Modes c(lat.size());
    for (std::size_t n = 1; n <= g.size(); ++n) {
      c[lat.zero_index() + n] = g[n - 1];
      c[lat.zero_index() - n] = std::conj(g[n - 1]);
    }
    return std::make_shared<LinearFunctional>(SpectralField(lat, std::move(c), FieldKind::signed_distribution));
  }
  if (kind == "sobolev-dual-sq") {
    s.allow({"kind", "s", "cutoff"});
    const int cutoff = static_cast<int>(s.integer("cutoff", 16));
    if (cutoff < 1) s.fail("cutoff", "must be >= 1");
    return std::make_shared<SobolevDualSq>(s.number("s"), SpectralField::uniform(ModeLattice(1, cutoff)));
  }
  if (kind == "kuramoto-rot-inv") {
    s.allow({"kind", "kappa", "eps_s", "delta_cut", "cutoff"});
    const int cutoff = static_cast<int>(s.integer("cutoff", 16));
    const KuramotoProfile p = stationary_kuramoto_profile(s.number("kappa"), std::max(cutoff, 32));
    return std::make_shared<KuramotoRotInv>(s.number("eps_s", 0.5), s.number("delta_cut", 0.1), p.p, cutoff);
  }
  if (kind == "mollified") {
    s.allow({"kind", "inner", "n_moll", "eps_moll", "points"});
    return mollify(parse_functional(s.child("inner")), static_cast<int>(s.integer("n_moll")), s.number("eps_moll"),
                   static_cast<int>(s.integer("points", 1024)));
  }
  s.fail("kind", "must be one of linear, sobolev-dual-sq, kuramoto-rot-inv, mollified (got '" + kind + "')");
}

inline SolverConfig parse_solver(const Section& s) {
  s.allow({"cutoff", "dt", "integrator", "dealias"});
  SolverConfig c;
  const int cutoff = static_cast<int>(s.integer("cutoff", 32));
  if (cutoff < 1) s.fail("cutoff", "must be >= 1");
  c.lattice = ModeLattice(1, cutoff);
  c.dt = s.number("dt", 1e-3);
  const std::string integ = s.string("integrator", "if-rk4");
  if (integ == "if-rk4") c.integrator = Integrator::if_rk4;
  else if (integ == "semi-implicit-euler") c.integrator = Integrator::semi_implicit_euler;
  else s.fail("integrator", "must be if-rk4 or semi-implicit-euler");
  c.dealias = s.boolean("dealias", true);
  c.validate();
  return c;
}

// -- run configuration -------------------------------------------------------

struct CliOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  bool dry_run = false;
};

/// A validated run: everything is built at parse time, execute() only computes.
struct RunConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir;
  json echo;
  std::vector<std::string> plan;
  std::function<int(RunOutput&, std::ostream&)> execute;
};

namespace detail {

inline std::string section_name(const std::string& experiment) { return experiment; }

inline std::string list(const std::vector<std::size_t>& v) {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}
inline std::string list(const std::vector<double>& v) {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : ",") + format_real(x);
  return s;
}

inline std::string series_csv(const std::vector<ObservableSeries>& runs) {
  std::string out = "replica,t,observable,re,im\n";
  for (const auto& r : runs)
    for (std::size_t c = 0; c < r.channels.size(); ++c)
      for (std::size_t k = 0; k < r.t.size(); ++k)
        out += std::to_string(r.replica) + ',' + format_real(r.t[k]) + ',' + r.channels[c] + ',' +
               format_real(r.values[c][k].real()) + ',' + format_real(r.values[c][k].imag()) + '\n';
  return out;
}

}  // namespace detail

inline RunConfig parse_config(const Document& doc, const std::string& subcommand, const CliOptions& opt = {}) {
  const Section top(doc, doc.root(), "");
  const std::string sec = detail::section_name(subcommand);
  top.allow({"experiment", "seed", "run_id", "output_dir", "drift", "functional", "initial", "solver", sec.c_str()});

  RunConfig rc;
  rc.experiment = top.string("experiment", subcommand);
  if (rc.experiment != subcommand)
    top.fail("experiment", "is '" + rc.experiment + "' but the subcommand is '" + subcommand + "'");
  {
    const std::int64_t seed = top.integer("seed", 1);
    if (seed < 0) top.fail("seed", "must be nonnegative");
    rc.seed = opt.seed ? *opt.seed : static_cast<std::uint64_t>(seed);
  }
  const std::string run_id =
      top.string("run_id", std::filesystem::path(doc.source()).stem().string() + "-seed" + std::to_string(rc.seed));
  rc.output_dir = opt.output_dir ? *opt.output_dir : top.string("output_dir", "results/" + run_id);
  rc.echo = doc.root();
  rc.echo["seed"] = rc.seed;

  const std::optional<DriftSpec> drift = top.has("drift") ? std::optional(parse_drift(top.child("drift"))) : std::nullopt;
  const FunctionalPtr phi = top.has("functional") ? parse_functional(top.child("functional")) : nullptr;
  const std::optional<SpectralField> mu0 =
      top.has("initial") ? std::optional(parse_initial(top.child("initial"))) : std::nullopt;
  const SolverConfig solver = top.has("solver") ? parse_solver(top.child("solver")) : SolverConfig{};
  const std::optional<Section> ex = top.has(sec) ? std::optional(top.child(sec)) : std::nullopt;
  const json empty_obj = json::object();
  const Section e = ex ? *ex : Section(doc, empty_obj, sec);

  auto need = [&](bool present, const char* what) {
    if (!present) throw ConfigError(doc.where("") + subcommand + " needs a '" + what + "' section");
  };
  if (drift) validate(*drift);
  const std::uint64_t seed = rc.seed;

  if (subcommand == "simulate") {
    need(drift.has_value(), "drift");
    need(mu0.has_value(), "initial");
    e.allow({"n", "replicas", "dt", "t_end", "record_stride", "modes", "exit_eta"});
    SimConfig sc;
    sc.n_particles = e.count("n");
    sc.replicas = e.count("replicas", 1);
    sc.dt = e.number("dt", 1e-3);
    sc.t_end = e.number("t_end", 1.0);
    sc.record_stride = e.count("record_stride", 1);
    sc.seed = seed;
    sc.observables.push_back(FourierModesObservable{static_cast<int>(e.integer("modes", 2))});
    if (phi) sc.observables.push_back(FunctionalObservable{phi});
    if (e.has("exit_eta")) sc.observables.push_back(ExitTimeObservable{e.number("exit_eta")});
    sc.validate();
    rc.plan.push_back("simulate " + std::to_string(sc.replicas) + " replicas of N = " + std::to_string(sc.n_particles) +
                      " to t = " + format_real(sc.t_end) + " with dt = " + format_real(sc.dt));
    rc.execute = [sc, d = *drift, m = *mu0](RunOutput& out, std::ostream&) {
      const auto runs = simulate(sc, d, m);
      out.stage("simulate");
      out.write("series.csv", detail::series_csv(runs));
      if (std::any_of(sc.observables.begin(), sc.observables.end(),
                      [](const Observable& o) { return std::holds_alternative<ExitTimeObservable>(o); })) {
        std::string csv = "replica,eta,exit_time\n";
        for (const auto& r : runs)
          for (std::size_t k = 0; k < r.exit_eta.size(); ++k)
            csv += std::to_string(r.replica) + ',' + format_real(r.exit_eta[k]) + ',' + format_real(r.exit_time[k]) + '\n';
        out.write("exit_times.csv", csv);
      }
      return int(ok);
    };
  } else if (subcommand == "fp-solve") {
    need(drift.has_value(), "drift");
    need(mu0.has_value(), "initial");
    e.allow({"t_end", "record_stride"});
    SolverConfig sc = solver;
    sc.t_end = e.number("t_end", 1.0);
    sc.record_stride = static_cast<int>(e.integer("record_stride", 100));
    sc.validate();
    rc.plan.push_back("solve the Fokker-Planck flow on M = " + std::to_string(sc.lattice.cutoff()) + " to t = " +
                      format_real(sc.t_end) + " (" + std::to_string(sc.steps()) + " steps)");
    rc.execute = [sc, d = *drift, m = *mu0](RunOutput& out, std::ostream&) {
      const FlowSeries f = solve_nonlinear_fp(d, m, sc);
      out.stage("solve");
      out.warn(f.warnings);
      out.write("modes.csv", mode_series_csv(f.lattice, f.t, f.m));
      out.write_json("final_state.json", to_json(FlowState{f.t.back(), f.m.back()}));
      return int(ok);
    };
  } else if (subcommand == "stationary") {
    e.allow({"kappa", "cutoff"});
    const double kappa = e.number("kappa");
    const int cutoff = static_cast<int>(e.integer("cutoff", 32));
    rc.plan.push_back("stationary Kuramoto profile at kappa = " + format_real(kappa));
    rc.execute = [kappa, cutoff](RunOutput& out, std::ostream& os) {
      const KuramotoProfile p = stationary_kuramoto_profile(kappa, cutoff);
      const json j{{"kappa", kappa}, {"r", p.r}, {"Z", p.z}, {"residual", p.residual}};
      out.write_json("stationary.json", j);
      os << j.dump() << "\n";
      return int(ok);
    };
  } else if (subcommand == "spectrum") {
    need(drift.has_value(), "drift");
    e.allow({"cutoff", "dense_check"});
    const auto* conv = std::get_if<ConvolutionGradient>(&*drift);
    if (!conv) throw ConfigError(doc.where("drift") + "spectrum needs a convolution drift");
    const int cutoff = static_cast<int>(e.integer("cutoff", 16));
    const bool dense = e.boolean("dense_check", true);
    rc.plan.push_back("closed-form spectrum at the uniform measure on M = " + std::to_string(cutoff) +
                      (dense ? " with a dense Galerkin eigensolve" : ""));
    rc.execute = [c = *conv, cutoff, dense, d = *drift](RunOutput& out, std::ostream& os) {
      const ModeLattice lat(1, cutoff);
      const UniformSpectrum s = uniform_linearization_spectrum(c.potential, c.kappa, lat);
      std::string csv = "n,eigenvalue\n";
      for (std::size_t i = 0; i < lat.size(); ++i)
        if (i != lat.zero_index()) csv += std::to_string(lat.mode(i)[0]) + ',' + format_real(s.eigenvalues[i]) + '\n';
      json fits{{"spectral_gap", s.spectral_gap}, {"slowest_mode", s.slowest_mode[0]}};
      if (dense) {
        const DenseSpectrum ds = dense_linearized_spectrum(d, SpectralField::uniform(lat));
        std::vector<double> closed;
        for (std::size_t i = 0; i < lat.size(); ++i)
          if (i != lat.zero_index()) closed.push_back(s.eigenvalues[i]);
        std::sort(closed.begin(), closed.end());
        double worst = 0.0;
        for (std::size_t k = 0; k < closed.size(); ++k)
          worst = std::max(worst, std::abs(closed[k] - ds.real_parts[k]) / std::max(1.0, std::abs(closed[k])));
        fits["dense_max_rel_diff"] = worst;
        fits["dense_max_imag"] = ds.max_imag;
      }
      out.write("spectrum.csv", csv);
      out.write_json("fits.json", fits);
      os << "gap " << format_real(s.spectral_gap) << "\n" << csv;
      return int(ok);
    };
  } else if (subcommand == "weak-error") {
    need(drift.has_value(), "drift");
    need(mu0.has_value(), "initial");
    need(phi != nullptr, "functional");
    e.allow({"n_list", "t_list", "replicas", "min_replicas", "max_replicas", "dt", "common_random_numbers",
             "dt_bias_check", "expect_slope", "slope_tolerance", "min_r2"});
    WeakErrorConfig w;
    w.drift = *drift;
    w.phi = phi;
    w.mu0 = *mu0;
    w.n_list = e.counts("n_list");
    w.t_list = e.numbers("t_list");
    w.replicas = e.count("replicas", 0);
    w.min_replicas = e.count("min_replicas", 16);
    w.max_replicas = e.count("max_replicas", 1'000'000);
    w.dt = e.number("dt", 1e-3);
    w.seed = seed;
    w.common_random_numbers = e.boolean("common_random_numbers", true);
    w.dt_bias_check = e.boolean("dt_bias_check", false);
    w.reference = solver;
    w.validate();
    const std::optional<double> expect = e.has("expect_slope") ? std::optional(e.number("expect_slope")) : std::nullopt;
    const double tol = e.number("slope_tolerance", 0.25), min_r2 = e.number("min_r2", 0.9);
    rc.plan.push_back("weak error of " + phi->name() + " for N in {" + detail::list(w.n_list) + "}, t in {" +
                      detail::list(w.t_list) + "}, dt = " + format_real(w.dt) +
                      (w.replicas ? ", " + std::to_string(w.replicas) + " replicas at the smallest N"
                                  : ", replicas sized by a pilot run"));
    rc.execute = [w, expect, tol, min_r2](RunOutput& out, std::ostream& os) {
      const WeakErrorResult r = weak_error_experiment(w);
      out.stage("weak-error");
      out.warn(r.warnings);
      out.write("errors.csv", errors_csv(r.table));
      json fits = json::array();
      bool pass = true;
      for (const auto& [t, f] : r.fits) {
        fits.push_back({{"t", t}, {"axis", "N"}, {"fit", to_json(f)}});
        if (expect && (std::abs(f.slope - *expect) > tol || f.r2 < min_r2)) pass = false;
        os << "t = " << format_real(t) << ": slope " << format_real(f.slope) << " +- " << format_real(f.ci_half_width)
           << ", r2 " << format_real(f.r2) << "\n";
      }
      json j{{"fits", fits}, {"replicas", r.replicas}};
      if (r.dt_check)
        j["dt_bias_check"] = {{"N", r.dt_check->n},
                              {"t", r.dt_check->t},
                              {"difference", r.dt_check->difference},
                              {"combined_std_error", r.dt_check->combined_std_error}};
      out.write_json("fits.json", j);
      return int(pass ? ok : assertion_failed);
    };
  } else if (subcommand == "strong-error") {
    need(drift.has_value(), "drift");
    need(mu0.has_value(), "initial");
    e.allow({"n_list", "t_list", "replicas", "dt", "s", "cutoff", "nu", "t_long"});
    StrongErrorConfig sc;
    sc.drift = *drift;
    sc.mu0 = *mu0;
    sc.s = e.number("s", 1.0);
    sc.n_list = e.counts("n_list");
    sc.t_list = e.numbers("t_list");
    sc.replicas = e.count("replicas", 1000);
    sc.dt = e.number("dt", 1e-2);
    sc.seed = seed;
    sc.reference = solver;
    const int cutoff = static_cast<int>(e.integer("cutoff", 64));
    const std::string nu = e.string("nu", "uniform");
    if (nu == "uniform") {
      sc.nu_inf = SpectralField::uniform(ModeLattice(1, cutoff));
    } else if (nu == "long-time") {
      SolverConfig lc = solver;
      lc.t_end = e.number("t_long", 80.0);
      lc.record_stride = std::max(1, lc.steps());
      rc.plan.push_back("long-time limit from the flow at t = " + format_real(lc.t_end));
      sc.nu_inf = embed(solve_nonlinear_fp(*drift, *mu0, lc).m.back(), ModeLattice(1, cutoff));
    } else {
      e.fail("nu", "must be uniform or long-time");
    }
    sc.validate();
    rc.plan.push_back("strong error ||mu^N - nu||^2 with s = " + format_real(sc.s) + " on M = " + std::to_string(cutoff) +
                      " for N in {" + detail::list(sc.n_list) + "}, t in {" + detail::list(sc.t_list) + "}");
    rc.execute = [sc](RunOutput& out, std::ostream&) {
      const StrongErrorResult r = strong_error_experiment(sc);
      out.stage("strong-error");
      out.warn(r.warnings);
      out.write("errors.csv", errors_csv(r.table));
      json det = json::array();
      for (std::size_t j = 0; j < sc.t_list.size(); ++j) det.push_back({{"t", sc.t_list[j]}, {"value", r.deterministic_part[j]}});
      json ratios = json::array();
      for (std::size_t n : sc.n_list)
        if (std::find(sc.n_list.begin(), sc.n_list.end(), 4 * n) != sc.n_list.end())
          for (double t : sc.t_list) ratios.push_back({{"N", n}, {"t", t}, {"ratio_N_4N", strong_ratio(r.table, n, t)}});
      out.write_json("fits.json", {{"deterministic_part", det}, {"ratios", ratios}});
      return int(ok);
    };
  } else if (subcommand == "ergodic-decay") {
    e.allow({"cases", "record_stride", "min_r2"});
    std::vector<DecayCase> cases;
    for (const Section& c : e.children("cases")) {
      c.allow({"name", "drift", "initial", "target", "t_min", "t_max", "t_long", "floor", "s"});
      DecayCase dc;
      dc.name = c.string("name");
      dc.drift = c.has("drift") ? parse_drift(c.child("drift")) : (drift ? *drift : throw ConfigError(doc.where(c.path()) + "case '" + dc.name + "' has no drift"));
      validate(dc.drift);
      dc.mu0 = c.has("initial") ? parse_initial(c.child("initial")) : (mu0 ? *mu0 : throw ConfigError(doc.where(c.path()) + "case '" + dc.name + "' has no initial law"));
      const std::string target = c.string("target", "uniform");
      if (target == "uniform") dc.target = DecayTarget::reference;
      else if (target == "long-time") dc.target = DecayTarget::long_time;
      else if (target == "kuramoto-family") dc.target = DecayTarget::kuramoto_family;
      else c.fail("target", "must be uniform, long-time or kuramoto-family");
      dc.t_min = c.number("t_min", 1.0);
      dc.t_max = c.number("t_max", 30.0);
      dc.t_long = c.number("t_long", 80.0);
      dc.floor = c.number("floor", 1e-280);
      dc.s = c.number("s", 1.0);
      dc.solver = solver;
      dc.record_stride = static_cast<int>(e.integer("record_stride", 10));
      cases.push_back(std::move(dc));
    }
    const double min_r2 = e.number("min_r2", 0.98);
    for (const auto& c : cases)
      rc.plan.push_back("decay case '" + c.name + "' (" + drift_name(c.drift) + ") fitted on [" + format_real(c.t_min) +
                        ", " + format_real(c.t_max) + "]");
    rc.execute = [cases, min_r2](RunOutput& out, std::ostream& os) {
      const auto res = ergodic_decay_experiment(cases);
      out.stage("ergodic-decay");
      std::string csv = "case,t,distance\n";
      json fits = json::array();
      bool pass = true;
      for (const auto& r : res) {
        for (std::size_t k = 0; k < r.t.size(); ++k) csv += r.name + ',' + format_real(r.t[k]) + ',' + format_real(r.distance[k]) + '\n';
        fits.push_back({{"case", r.name}, {"fit", to_json(r.fit)}});
        pass = pass && r.fit.lambda > 0.0 && r.fit.r2 >= min_r2;
        os << r.name << ": lambda " << format_real(r.fit.lambda) << ", r2 " << format_real(r.fit.r2) << "\n";
      }
      out.write("decay.csv", csv);
      out.write_json("fits.json", fits);
      return int(pass ? ok : assertion_failed);
    };
  } else if (subcommand == "exit-time") {
    e.allow({"kappa", "eta", "n_list", "replicas", "dt", "horizon_factor"});
    ExitTimeConfig x;
    x.kappa = e.number("kappa", 2.0);
    x.eta = e.number("eta", 0.1);
    if (e.has("n_list")) x.n_list = e.counts("n_list");
    x.replicas = e.count("replicas", 400);
    x.dt = e.number("dt", 1e-3);
    x.horizon_factor = e.number("horizon_factor", 4.0);
    x.seed = seed;
    x.validate();
    rc.plan.push_back("exit times of |mu^N(1)| >= " + format_real(x.eta) + " at kappa = " + format_real(x.kappa) +
                      " for N in {" + detail::list(x.n_list) + "}, " + std::to_string(x.replicas) + " replicas each");
    rc.execute = [x](RunOutput& out, std::ostream& os) {
      const auto rows = exit_time_experiment(x);
      out.stage("exit-time");
      std::string times = "N,replica,exit_time\n", summary = "N,replicas,threshold,horizon,p_exceed,sigma,median,exited_by_horizon\n";
      for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.times.size(); ++k)
          times += std::to_string(r.n) + ',' + std::to_string(k) + ',' + format_real(r.times[k]) + '\n';
        summary += std::to_string(r.n) + ',' + std::to_string(r.replicas) + ',' + format_real(r.threshold) + ',' +
                   format_real(r.horizon) + ',' + format_real(r.p_exceed) + ',' + format_real(r.sigma) + ',' +
                   format_real(r.median) + ',' + format_real(r.exited_by_horizon) + '\n';
        os << "N = " << r.n << ": P(tau >= N^1/4) = " << format_real(r.p_exceed) << " +- " << format_real(r.sigma)
           << ", median " << format_real(r.median) << "\n";
      }
      const bool mono = exceedance_non_increasing(rows);
      out.write("exit_times.csv", times);
      out.write("exit_summary.csv", summary);
      out.write_json("fits.json", {{"non_increasing_within_2sigma", mono}});
      return int(mono ? ok : assertion_failed);
    };
  } else if (subcommand == "check") {
    need(drift.has_value(), "drift");
    need(mu0.has_value(), "initial");
    need(phi != nullptr, "functional");
    e.allow({"t_list", "z_list", "h", "rel_tol", "min_order", "mixed"});
    RepresentationConfig r;
    r.drift = *drift;
    r.phi = phi;
    r.mu = *mu0;
    r.solver = solver;
    if (e.has("t_list")) r.t_list = e.numbers("t_list");
    if (e.has("z_list")) r.z_list = e.numbers("z_list");
    r.h = e.number("h", 1e-3);
    r.rel_tol = e.number("rel_tol", 1e-3);
    r.min_order = e.number("min_order", 0.9);
    r.mixed = e.boolean("mixed", true);
    rc.plan.push_back("representation checks at t in {" + detail::list(r.t_list) + "}, z in {" + detail::list(r.z_list) +
                      "}, h = " + format_real(r.h) + "; invariant suite");
    rc.execute = [r](RunOutput& out, std::ostream& os) {
      const RepresentationReport rep = representation_check_suite(r);
      out.stage("representation");
      std::string csv = "kind,t,z1,z2,exact,fd_h,fd_half,richardson,order,rel_error,pass\n";
      for (const auto& c : rep.checks)
        csv += c.kind + ',' + format_real(c.t) + ',' + format_real(c.z1) + ',' + format_real(c.z2) + ',' +
               format_real(c.exact) + ',' + format_real(c.fd_h) + ',' + format_real(c.fd_half) + ',' +
               format_real(c.richardson) + ',' + format_real(c.order) + ',' + format_real(c.rel_error) + ',' +
               (c.pass() ? "1" : "0") + '\n';
      out.write("checks.csv", csv);

      // invariants of the flow itself
      SolverConfig sc = r.solver;
      sc.t_end = *std::max_element(r.t_list.begin(), r.t_list.end());
      sc.record_stride = std::max(1, sc.steps() / 50);
      const FlowSeries f = solve_nonlinear_fp(r.drift, r.mu, sc);
      double worst_min = std::numeric_limits<double>::infinity();
      for (const auto& m : f.m) worst_min = std::min(worst_min, grid_minimum(m, 4 * m.lattice().cutoff() + 4));
      bool h_stable_monotone = true;
      if (const auto* c = std::get_if<ConvolutionGradient>(&r.drift); c && h_stability_check(c->potential).h_stable) {
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& m : f.m) {
          const double d = dual_norm(difference(m, SpectralField::uniform(m.lattice())), 1.0);
          h_stable_monotone = h_stable_monotone && d <= prev * (1.0 + 1e-12);
          prev = d;
        }
      }
      out.stage("invariants");
      const bool positive = worst_min > -1e-10;
      json j{{"representation_pass", rep.pass()},
             {"min_order", rep.min_order()},
             {"flow_min_density", worst_min},
             {"flow_positive", positive},
             {"h_stable_distance_non_increasing", h_stable_monotone}};
      out.write_json("fits.json", j);
      const bool pass = rep.pass() && positive && h_stable_monotone;
      os << "representation " << (rep.pass() ? "pass" : "FAIL") << " (min order " << format_real(rep.min_order())
         << "), invariants " << (positive && h_stable_monotone ? "pass" : "FAIL") << "\n";
      return int(pass ? ok : assertion_failed);
    };
  } else if (subcommand == "mollify-test") {
    need(phi != nullptr, "functional");
    e.allow({"levels", "fejer_levels", "qmc_points", "max_ratio", "max_fejer_ratio"});
    std::vector<std::pair<int, double>> levels{{4, 0.2}, {16, 0.05}};
    if (e.has("levels")) {
      levels.clear();
      for (const auto& l : e.raw("levels")) {
        if (!l.is_array() || l.size() != 2 || !l[0].is_number_integer() || !l[1].is_number())
          e.fail("levels", "must be an array of [N, eps] pairs");
        levels.emplace_back(l[0].get<int>(), l[1].get<double>());
      }
    }
    std::vector<int> fejer{8, 64};
    if (e.has("fejer_levels")) {
      fejer.clear();
      for (auto v : e.counts("fejer_levels")) fejer.push_back(static_cast<int>(v));
    }
    const int points = static_cast<int>(e.integer("qmc_points", 256));
    const double max_ratio = e.number("max_ratio", 1.0 / 3.0), max_fejer = e.number("max_fejer_ratio", 0.25);
    rc.plan.push_back("mollification of " + phi->name() + " on the 20-measure stress set");
    rc.execute = [phi, levels, fejer, points, seed, max_ratio, max_fejer](RunOutput& out, std::ostream& os) {
      const MollificationResult r = mollification_experiment(phi, levels, fejer, seed, points);
      out.stage("mollify");
      std::string csv = "kind,N,eps,max_error\n";
      for (const auto& l : r.mollified)
        csv += "mollified," + std::to_string(l.n_moll) + ',' + format_real(l.eps) + ',' + format_real(l.max_error) + '\n';
      for (const auto& l : r.fejer) csv += "fejer-w1," + std::to_string(l.n) + ",," + format_real(l.max_w1) + '\n';
      out.write("mollify.csv", csv);
      bool pass = true;
      json j = json::object();
      if (r.mollified.size() >= 2) {
        const double ratio = r.mollified.back().max_error / r.mollified.front().max_error;
        j["mollified_ratio"] = ratio;
        pass = pass && ratio < max_ratio;
        os << "mollified error ratio " << format_real(ratio) << "\n";
      }
      if (r.fejer.size() >= 2) {
        const double ratio = r.fejer.back().max_w1 / r.fejer.front().max_w1;
        j["fejer_w1_ratio"] = ratio;
        pass = pass && ratio < max_fejer;
        os << "Fejer W1 ratio " << format_real(ratio) << "\n";
      }
      out.write_json("fits.json", j);
      return int(pass ? ok : assertion_failed);
    };
  } else {
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  }
  return rc;
}

/// Execute a validated run and write its manifest. Returns the exit code.
inline int run(const RunConfig& rc, std::ostream& os, bool dry_run = false) {
  if (dry_run) {
    os << "experiment " << rc.experiment << " (seed " << rc.seed << ") -> " << rc.output_dir.string() << "\n";
    for (const auto& p : rc.plan) os << "  " << p << "\n";
    return ok;
  }
  RunOutput out(rc.output_dir, rc.echo);
  int code = error;
  try {
    code = rc.execute(out, os);
  } catch (...) {
    out.finish("error");
    throw;
  }
  out.finish(code == ok ? "ok" : "assertion-failed");
  return code;
}

}  // namespace chaosbench::cli
