#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "chaosbench/core/empirical.hpp"
#include "chaosbench/core/error.hpp"
#include "chaosbench/core/parallel.hpp"
#include "chaosbench/functionals/functional.hpp"
#include "chaosbench/particles/engine.hpp"
#include "chaosbench/particles/sampling.hpp"

namespace chaosbench {

/// Empirical modes with 0 < n in lattice order up to `cutoff`.
struct FourierModesObservable {
  int cutoff = 1;
};

/// Phi(mu^N_t).
struct FunctionalObservable {
  FunctionalPtr phi;
};

/// First t with |mu^{1,N}_t| >= eta.
struct ExitTimeObservable {
  double eta = 0.1;
};

using Observable = std::variant<FourierModesObservable, FunctionalObservable, ExitTimeObservable>;

struct SimConfig {
  std::size_t n_particles = 0;
  double dt = 1e-3;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  std::size_t replicas = 1;
  std::uint32_t first_replica = 0;
  std::size_t record_stride = 1;
  std::vector<Observable> observables;
  // end a replica once every exit-time observable has fired
  bool stop_after_exit = false;

  std::size_t steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

  void validate() const {
    if (n_particles == 0) throw InvalidInput("SimConfig: N must be at least 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("SimConfig: dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidInput("SimConfig: t_end must be nonnegative");
    if (replicas == 0) throw InvalidInput("SimConfig: replicas must be at least 1");
    if (record_stride == 0) throw InvalidInput("SimConfig: record_stride must be at least 1");
    if (std::abs(double(steps()) * dt - t_end) > 1e-9 * std::max(1.0, t_end))
      throw InvalidInput("SimConfig: t_end must be a whole number of steps");
    if (steps() > 0xFFFFFFFFull) throw InvalidInput("SimConfig: too many steps");
    for (const auto& o : observables) {
      if (auto* f = std::get_if<FourierModesObservable>(&o); f && f->cutoff < 1)
        throw InvalidInput("SimConfig: fourier-modes cutoff must be at least 1");
      if (auto* f = std::get_if<FunctionalObservable>(&o); f && !f->phi)
        throw InvalidInput("SimConfig: functional observable without a functional");
      if (auto* e = std::get_if<ExitTimeObservable>(&o); e && !(e->eta > 0.0))
        throw InvalidInput("SimConfig: exit-time eta must be positive");
    }
  }
};

/// Recorded values of one replica. values[c][k] belongs to channel c at t[k].
struct ObservableSeries {
  std::uint32_t replica = 0;
  std::vector<double> t;
  std::vector<std::string> channels;
  std::vector<std::vector<cplx>> values;
  std::vector<double> exit_eta;
  std::vector<double> exit_time;  // +inf when not reached by t_end

  const std::vector<cplx>& channel(const std::string& name) const {
    for (std::size_t c = 0; c < channels.size(); ++c)
      if (channels[c] == name) return values[c];
    throw InvalidInput("ObservableSeries: no channel " + name);
  }
};

inline std::string mode_label(const Mode& n, int dim) {
  std::string s = "mode[";
  for (int j = 0; j < dim; ++j) s += (j ? "," : "") + std::to_string(n[static_cast<std::size_t>(j)]);
  return s + "]";
}

namespace detail {

struct Recorder {
  std::vector<const Observable*> recorded;
  std::vector<ModeLattice> lattices;  // per recorded observable

  Recorder(const SimConfig& cfg, int dim, ObservableSeries& out) {
    for (const auto& o : cfg.observables) {
      if (auto* f = std::get_if<FourierModesObservable>(&o)) {
        ModeLattice lat(dim, f->cutoff);
        for (std::size_t i = lat.zero_index() + 1; i < lat.size(); ++i) out.channels.push_back(mode_label(lat.mode(i), dim));
        recorded.push_back(&o);
        lattices.push_back(std::move(lat));
      } else if (auto* f = std::get_if<FunctionalObservable>(&o)) {
        if (f->phi->lattice().dim() != dim) throw InvalidInput("simulate: functional dimension mismatch");
        out.channels.push_back(f->phi->name());
        recorded.push_back(&o);
        lattices.push_back(f->phi->lattice());
      } else {
        out.exit_eta.push_back(std::get<ExitTimeObservable>(o).eta);
        out.exit_time.push_back(std::numeric_limits<double>::infinity());
      }
    }
    out.values.resize(out.channels.size());
  }

  void record(std::span<const double> x, int dim, double t, ObservableSeries& out) const {
    out.t.push_back(t);
    std::size_t c = 0;
    for (std::size_t r = 0; r < recorded.size(); ++r) {
      const ModeLattice& lat = lattices[r];
      const SpectralField m = fourier_modes_of_empirical(x, dim, lat);
      if (std::holds_alternative<FourierModesObservable>(*recorded[r])) {
        for (std::size_t i = lat.zero_index() + 1; i < lat.size(); ++i) out.values[c++].push_back(m[i]);
      } else {
        out.values[c++].push_back(std::get<FunctionalObservable>(*recorded[r]).phi->value_raw(m.modes()));
      }
    }
  }
};

}  // namespace detail

/// One replica from given initial positions.
template <NoiseSource Noise>
ObservableSeries simulate_from(const SimConfig& cfg, const DriftSpec& drift, std::vector<double> x0,
                               std::uint32_t replica, const Noise& noise) {
  ParticleSystem sys(drift, std::move(x0));
  ObservableSeries out;
  out.replica = replica;
  const detail::Recorder rec(cfg, sys.dim(), out);
  const std::size_t steps = cfg.steps();
  std::vector<double> prev_abs(out.exit_eta.size());
  std::size_t pending = out.exit_eta.size();

  // exit crossings are checked every step whatever the record stride
  auto check_exit = [&](std::size_t k) {
    if (pending == 0) return;
    const double a = std::abs(sys.first_mode());
    const double t = double(k) * cfg.dt;
    for (std::size_t e = 0; e < out.exit_eta.size(); ++e) {
      if (std::isfinite(out.exit_time[e])) continue;
      const double eta = out.exit_eta[e];
      if (a >= eta) {
        out.exit_time[e] = k == 0 ? 0.0 : t - cfg.dt * (a - eta) / (a - prev_abs[e]);
        --pending;
      }
      prev_abs[e] = a;
    }
  };

  rec.record(sys.positions(), sys.dim(), 0.0, out);
  check_exit(0);
  for (std::size_t k = 1; k <= steps; ++k) {
    if (cfg.stop_after_exit && !out.exit_eta.empty() && pending == 0) break;
    sys.step(cfg.dt, noise, replica, static_cast<std::uint32_t>(k - 1));
    if (k % cfg.record_stride == 0 || k == steps) rec.record(sys.positions(), sys.dim(), double(k) * cfg.dt, out);
    check_exit(k);
  }
  return out;
}

/// Independent replicas first_replica .. first_replica + replicas - 1, each
/// with its own Philox stream, run in parallel. Output order is replica order.
template <NoiseSource Noise>
std::vector<ObservableSeries> simulate(const SimConfig& cfg, const DriftSpec& drift, const SpectralField& mu0,
                                       const Noise& noise) {
  cfg.validate();
  validate(drift);
  if (mu0.dim() != drift_dim(drift)) throw InvalidInput("simulate: initial law and drift differ in dimension");
  std::vector<ObservableSeries> out(cfg.replicas);
  parallel_for(cfg.replicas, [&](std::size_t r) {
    const auto id = static_cast<std::uint32_t>(cfg.first_replica + r);
    out[r] = simulate_from(cfg, drift, sample_positions(mu0, cfg.n_particles, cfg.seed, id), id, noise);
  });
  return out;
}

inline std::vector<ObservableSeries> simulate(const SimConfig& cfg, const DriftSpec& drift, const SpectralField& mu0) {
  return simulate(cfg, drift, mu0, PhiloxNoise{cfg.seed});
}

}  // namespace chaosbench
