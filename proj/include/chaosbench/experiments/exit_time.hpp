#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "chaosbench/particles/simulate.hpp"

namespace chaosbench {

struct ExitTimeConfig {
  double kappa = 2.0;
  double eta = 0.1;
  std::vector<std::size_t> n_list{64, 256, 1024};
  std::size_t replicas = 400;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  double horizon_factor = 4.0;  // run to horizon_factor * N^{1/4}
  int cache_cutoff = 1;

  void validate() const {
    if (!(kappa > 1.0)) throw InvalidInput("exit_time: kappa must exceed 1");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidInput("exit_time: eta must lie in (0, 1)");
    if (n_list.empty()) throw InvalidInput("exit_time: empty N list");
    if (replicas < 2) throw InvalidInput("exit_time: need at least 2 replicas");
    if (!(dt > 0.0)) throw InvalidInput("exit_time: dt must be positive");
    if (!(horizon_factor >= 1.0)) throw InvalidInput("exit_time: horizon factor must be >= 1");
  }
};

struct ExitTimeRow {
  std::size_t n = 0;
  std::size_t replicas = 0;
  double threshold = 0.0;     // N^{1/4}
  double horizon = 0.0;
  double p_exceed = 0.0;      // fraction with tau >= N^{1/4}
  double sigma = 0.0;         // sqrt(p (1 - p) / R)
  double median = 0.0;        // +inf when fewer than half exit by the horizon
  double exited_by_horizon = 0.0;
  std::vector<double> times;  // per replica, +inf if no exit
};

inline double median_time(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Particles start i.i.d. uniform; tau_N is the first time |mu^N_t(1)| >= eta.
inline std::vector<ExitTimeRow> exit_time_experiment(const ExitTimeConfig& cfg) {
  cfg.validate();
  std::vector<ExitTimeRow> out;
  for (std::size_t n : cfg.n_list) {
    ExitTimeRow row;
    row.n = n;
    row.replicas = cfg.replicas;
    row.threshold = std::pow(double(n), 0.25);
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.horizon_factor * row.threshold / cfg.dt));
    row.horizon = double(steps) * cfg.dt;
    SimConfig sc;
    sc.n_particles = n;
    sc.dt = cfg.dt;
    sc.t_end = row.horizon;
    sc.seed = cfg.seed;
    sc.replicas = cfg.replicas;
    sc.record_stride = steps;
    sc.observables = {ExitTimeObservable{cfg.eta}};
    sc.stop_after_exit = true;
    const auto runs = simulate(sc, Kuramoto{cfg.kappa}, SpectralField::uniform(ModeLattice(1, cfg.cache_cutoff)));
    std::size_t exceed = 0, exited = 0;
    for (const auto& r : runs) {
      const double tau = r.exit_time[0];
      row.times.push_back(tau);
      if (tau >= row.threshold) ++exceed;
      if (std::isfinite(tau)) ++exited;
    }
    const double rr = double(cfg.replicas);
    row.p_exceed = double(exceed) / rr;
    row.sigma = std::sqrt(row.p_exceed * (1.0 - row.p_exceed) / rr);
    row.exited_by_horizon = double(exited) / rr;
    row.median = median_time(row.times);
    out.push_back(std::move(row));
  }
  return out;
}

/// p(N_{k+1}) <= p(N_k) + z * sqrt(sigma_k^2 + sigma_{k+1}^2) for every k.
inline bool exceedance_non_increasing(const std::vector<ExitTimeRow>& rows, double z = 2.0) {
  for (std::size_t k = 0; k + 1 < rows.size(); ++k)
    if (rows[k + 1].p_exceed > rows[k].p_exceed + z * std::hypot(rows[k].sigma, rows[k + 1].sigma)) return false;
  return true;
}

}  // namespace chaosbench
