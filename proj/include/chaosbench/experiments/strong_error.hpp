#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "chaosbench/experiments/weak_error.hpp"

namespace chaosbench {

/// E||mu^N - nu||^2_{-s,2} on the lattice of nu when mu^N is the empirical
/// measure of N i.i.d. draws from m: sum w_n (|m_n - nu_n|^2 + (1 - |m_n|^2)/N).
inline double iid_dual_norm_sq_expectation(const SpectralField& m, const SpectralField& nu, double s, std::size_t n) {
  const ModeLattice& lat = nu.lattice();
  const Modes mm = embed(m.lattice(), m.coeffs(), lat);
  double acc = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    if (i == lat.zero_index()) continue;
    const double w = std::pow(1.0 + lat.norm_sq(i), -s);
    acc += w * (std::norm(mm[i] - nu[i]) + (1.0 - std::norm(mm[i])) / double(n));
  }
  return acc;
}

struct StrongErrorConfig {
  DriftSpec drift;
  SpectralField mu0;
  SpectralField nu_inf;  // its lattice is the norm's truncation
  double s = 1.0;
  std::vector<std::size_t> n_list;
  std::vector<double> t_list;
  std::size_t replicas = 1000;  // at every N
  double dt = 1e-2;
  std::uint64_t seed = 1;
  SolverConfig reference{};

  void validate() const {
    if (!(s > 0.0)) throw InvalidInput("strong_error: s must be positive");
    if (n_list.empty() || t_list.empty()) throw InvalidInput("strong_error: N and t lists must be non-empty");
    if (replicas < 2) throw InvalidInput("strong_error: need at least 2 replicas");
    if (nu_inf.kind() != FieldKind::density) throw InvalidInput("strong_error: nu_inf must be a density");
    detail::record_plan(t_list, dt, "strong_error");
    detail::record_plan(t_list, reference.dt, "strong_error reference");
  }
};

struct StrongErrorResult {
  // estimate: Monte-Carlo E||mu^N_t - nu_inf||^2; pde_reference: the same
  // expectation for N i.i.d. draws from m(t), exact at t = 0.
  ErrorTable table;
  std::vector<double> deterministic_part;  // ||m(t) - nu_inf||^2 per t
  std::vector<std::string> warnings;
};

inline StrongErrorResult strong_error_experiment(const StrongErrorConfig& cfg) {
  cfg.validate();
  StrongErrorResult res;
  const auto phi = std::make_shared<SobolevDualSq>(cfg.s, cfg.nu_inf);

  SolverConfig sc = cfg.reference;
  const auto [stride, steps] = detail::record_plan(cfg.t_list, sc.dt, "strong_error reference");
  sc.t_end = double(steps) * sc.dt;
  sc.record_stride = static_cast<int>(stride);
  const FlowSeries flow = solve_nonlinear_fp(cfg.drift, cfg.mu0, sc);
  for (double t : cfg.t_list) res.deterministic_part.push_back(phi->value(flow.at_time(t)));

  for (std::size_t n : cfg.n_list) {
    const auto samples =
        functional_samples(cfg.drift, phi, cfg.mu0, n, cfg.replicas, cfg.t_list, cfg.dt, cfg.seed);
    for (std::size_t j = 0; j < cfg.t_list.size(); ++j) {
      const double ref = iid_dual_norm_sq_expectation(flow.at_time(cfg.t_list[j]), cfg.nu_inf, cfg.s, n);
      res.table.rows.push_back(make_row(n, cfg.t_list[j], mean_estimate(samples[j]), ref));
    }
  }
  return res;
}

/// estimate(N) / estimate(4N) at time t; about 4 on the 1/N plateau.
inline double strong_ratio(const ErrorTable& table, std::size_t n, double t) {
  return table.row(n, t).estimate / table.row(4 * n, t).estimate;
}

}  // namespace chaosbench
