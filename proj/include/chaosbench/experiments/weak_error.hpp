#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "chaosbench/experiments/tables.hpp"
#include "chaosbench/functionals/functional.hpp"
#include "chaosbench/particles/simulate.hpp"
#include "chaosbench/pde/solver.hpp"

namespace chaosbench {

namespace detail {

inline std::size_t exact_steps(double t, double dt, const char* what) {
  const double k = t / dt;
  const auto n = static_cast<std::size_t>(std::llround(k));
  if (std::abs(double(n) - k) > 1e-9 * std::max(1.0, k))
    throw InvalidInput(std::string(what) + ": time " + format_real(t) + " is not a multiple of dt");
  return n;
}

// Stride that hits every requested time, and the horizon.
inline std::pair<std::size_t, std::size_t> record_plan(const std::vector<double>& times, double dt, const char* what) {
  std::size_t g = 0, last = 0;
  for (double t : times) {
    const std::size_t k = exact_steps(t, dt, what);
    if (k > 0) g = std::gcd(g, k);
    last = std::max(last, k);
  }
  return {g == 0 ? 1 : g, last};
}

inline std::size_t record_index(double t, double dt, std::size_t stride) { return exact_steps(t, dt, "record") / stride; }

// Independent streams per N level when common random numbers are off.
inline std::uint64_t level_seed(std::uint64_t seed, std::size_t n, bool common) {
  if (common) return seed;
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (std::uint64_t(n) + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

struct WeakErrorConfig {
  DriftSpec drift;
  FunctionalPtr phi;
  SpectralField mu0;
  std::vector<std::size_t> n_list;
  std::vector<double> t_list;
  // Replicas at n_list.front(); other levels get round(R0 * N0 / N). Zero
  // sizes the run from a 50-replica pilot at the largest N.
  std::size_t replicas = 0;
  std::size_t min_replicas = 16;
  std::size_t max_replicas = 1'000'000;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  bool common_random_numbers = true;
  bool dt_bias_check = false;
  SolverConfig reference{};  // lattice and dt of the PDE reference; t_end is set here

  void validate() const {
    if (!phi) throw InvalidInput("weak_error: functional missing");
    if (n_list.empty() || t_list.empty()) throw InvalidInput("weak_error: N and t lists must be non-empty");
    if (!std::is_sorted(n_list.begin(), n_list.end()) || n_list.front() < 1)
      throw InvalidInput("weak_error: N list must be increasing and positive");
    for (double t : t_list)
      if (!(t >= 0.0)) throw InvalidInput("weak_error: times must be nonnegative");
    if (!(dt > 0.0)) throw InvalidInput("weak_error: dt must be positive");
    if (min_replicas < 2) throw InvalidInput("weak_error: need at least 2 replicas per level");
    if (phi->rotation_invariant() == false && std::holds_alternative<Kuramoto>(drift) &&
        std::get<Kuramoto>(drift).kappa > 1.0)
      throw InvalidInput("weak_error: supercritical Kuramoto needs a rotation-invariant functional");
    detail::record_plan(t_list, dt, "weak_error");
    detail::record_plan(t_list, reference.dt, "weak_error reference");
  }
};

struct DtBiasCheck {
  std::size_t n = 0;
  double t = 0.0;
  double estimate_dt = 0.0, estimate_half_dt = 0.0;
  double difference = 0.0, combined_std_error = 0.0;
};

struct WeakErrorResult {
  ErrorTable table;
  std::vector<std::pair<double, FitResult>> fits;  // per t, over N
  std::vector<std::string> warnings;
  std::optional<DtBiasCheck> dt_check;
  std::vector<std::size_t> replicas;  // per N level
};

/// Monte-Carlo mean of Phi(mu^N_t) per replica at the requested times.
inline std::vector<std::vector<double>> functional_samples(const DriftSpec& drift, const FunctionalPtr& phi,
                                                           const SpectralField& mu0, std::size_t n, std::size_t replicas,
                                                           const std::vector<double>& t_list, double dt,
                                                           std::uint64_t seed) {
  const auto [stride, steps] = detail::record_plan(t_list, dt, "functional_samples");
  SimConfig sc;
  sc.n_particles = n;
  sc.dt = dt;
  sc.t_end = double(steps) * dt;
  sc.seed = seed;
  sc.replicas = replicas;
  sc.record_stride = stride;
  sc.observables = {FunctionalObservable{phi}};
  const auto runs = simulate(sc, drift, mu0);
  std::vector<std::vector<double>> out(t_list.size(), std::vector<double>(replicas));
  for (std::size_t r = 0; r < replicas; ++r)
    for (std::size_t j = 0; j < t_list.size(); ++j)
      out[j][r] = runs[r].values[0][detail::record_index(t_list[j], dt, stride)].real();
  return out;
}

inline std::vector<std::size_t> replica_plan(std::size_t r0, const std::vector<std::size_t>& n_list, std::size_t lo,
                                             std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t n : n_list) {
    const double r = double(r0) * double(n_list.front()) / double(n);
    out.push_back(std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(r)), lo, hi));
  }
  return out;
}

/// Deterministic reference Phi(m(t; mu0)) at each requested time.
inline std::vector<double> pde_functional_reference(const DriftSpec& drift, const Functional& phi,
                                                    const SpectralField& mu0, const std::vector<double>& t_list,
                                                    SolverConfig cfg) {
  const auto [stride, steps] = detail::record_plan(t_list, cfg.dt, "pde reference");
  cfg.t_end = double(steps) * cfg.dt;
  cfg.record_stride = static_cast<int>(stride);
  const FlowSeries flow = solve_nonlinear_fp(drift, mu0, cfg);
  std::vector<double> out;
  for (double t : t_list) out.push_back(phi.value(flow.at_time(t)));
  return out;
}

inline WeakErrorResult weak_error_experiment(const WeakErrorConfig& cfg) {
  cfg.validate();
  WeakErrorResult res;
  const std::size_t n_max = cfg.n_list.back();

  std::size_t r0 = cfg.replicas;
  if (r0 == 0) {
    // pilot: std_error < 1/(5 N_max) at the largest N and latest time
    const double t_last = *std::max_element(cfg.t_list.begin(), cfg.t_list.end());
    const auto pilot = functional_samples(cfg.drift, cfg.phi, cfg.mu0, n_max, 50, {t_last}, cfg.dt,
                                          cfg.seed ^ 0x5eed5eed5eedULL);
    const double sd = std::sqrt(mean_estimate(pilot[0]).variance);
    const double need = std::ceil(std::pow(5.0 * double(n_max) * sd, 2.0));
    r0 = static_cast<std::size_t>(need * double(n_max) / double(cfg.n_list.front()));
  }
  res.replicas = replica_plan(r0, cfg.n_list, cfg.min_replicas, cfg.max_replicas);

  const std::vector<double> ref = pde_functional_reference(cfg.drift, *cfg.phi, cfg.mu0, cfg.t_list, cfg.reference);

  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    const std::size_t n = cfg.n_list[i];
    const auto samples = functional_samples(cfg.drift, cfg.phi, cfg.mu0, n, res.replicas[i], cfg.t_list, cfg.dt,
                                            detail::level_seed(cfg.seed, n, cfg.common_random_numbers));
    for (std::size_t j = 0; j < cfg.t_list.size(); ++j) {
      ErrorRow row = make_row(n, cfg.t_list[j], mean_estimate(samples[j]), ref[j]);
      row.underpowered = row.std_error > 1.0 / (5.0 * double(n));
      if (row.underpowered)
        res.warnings.push_back("N = " + std::to_string(n) + ", t = " + format_real(row.t) + ": std_error " +
                               format_real(row.std_error) + " exceeds 1/(5N)");
      res.table.rows.push_back(row);
    }
  }

  for (double t : cfg.t_list) {
    const ErrorTable sub = res.table.at_time(t);
    try {
      res.fits.emplace_back(t, rate_fit(sub, FitAxis::n));
    } catch (const InvalidInput& e) {
      res.warnings.push_back("t = " + format_real(t) + ": no fit (" + e.what() + ")");
    }
  }

  if (cfg.dt_bias_check) {
    DtBiasCheck c;
    c.n = cfg.n_list.front();
    c.t = *std::max_element(cfg.t_list.begin(), cfg.t_list.end());
    const std::size_t r = res.replicas.front();
    const auto a = functional_samples(cfg.drift, cfg.phi, cfg.mu0, c.n, r, {c.t}, cfg.dt, cfg.seed);
    const auto b = functional_samples(cfg.drift, cfg.phi, cfg.mu0, c.n, r, {c.t}, cfg.dt / 2.0, cfg.seed ^ 0xd7d7ULL);
    const MeanEstimate ea = mean_estimate(a[0]), eb = mean_estimate(b[0]);
    c.estimate_dt = ea.mean;
    c.estimate_half_dt = eb.mean;
    c.difference = ea.mean - eb.mean;
    c.combined_std_error = std::hypot(ea.std_error, eb.std_error);
    if (std::abs(c.difference) > 3.0 * c.combined_std_error)
      res.warnings.push_back("time-step bias: halving dt moves the estimate by " + format_real(c.difference));
    res.dt_check = c;
  }
  return res;
}

}  // namespace chaosbench
