#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "chaosbench/core/grid.hpp"
#include "chaosbench/core/parallel.hpp"
#include "chaosbench/functionals/functional.hpp"
#include "chaosbench/pde/tangents.hpp"

namespace chaosbench {

struct RepresentationConfig {
  DriftSpec drift;
  FunctionalPtr phi;
  SpectralField mu;
  std::vector<double> t_list{0.5, 2.0};
  std::vector<double> z_list{0.1, 0.37, 0.8};
  double h = 1e-3;
  double min_order = 0.9;
  double rel_tol = 1e-3;       // Richardson value against the tangent solve
  double identity_tol = 1e-9;  // t = 0: dU/dm(0, mu) = dPhi/dm(mu)
  bool mixed = true;
  SolverConfig solver{};
  DiracSmoothing smoothing{};
};

struct RepresentationCheck {
  std::string kind;  // identity, first, mixed
  double t = 0.0;
  double z1 = 0.0, z2 = 0.0;
  double exact = 0.0;
  double fd_h = 0.0, fd_half = 0.0;  // forward differences at h and h/2
  double richardson = 0.0;           // 2 fd_half - fd_h
  double order = 0.0;                // log2(|fd_h - exact| / |fd_half - exact|)
  double rel_error = 0.0;            // of the Richardson value (abs error for identity)
  bool order_ok = true;
  bool agreement_ok = true;
  bool pass() const { return order_ok && agreement_ok; }
};

struct RepresentationReport {
  std::vector<RepresentationCheck> checks;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return true;
  }
  double min_order() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : checks)
      if (c.kind != "identity") m = std::min(m, c.order);
    return m;
  }
};

namespace detail {

inline SpectralField flow_at(const DriftSpec& drift, const SpectralField& mu, double t, SolverConfig cfg) {
  cfg.t_end = t;
  cfg.record_stride = std::max(1, cfg.steps());
  return solve_nonlinear_fp(drift, mu, cfg).m.back();
}

// (1 - h) mu + h nu
inline SpectralField convex(const SpectralField& mu, const SpectralField& nu, double h) {
  Modes c = embed(mu.lattice(), mu.coeffs(), nu.lattice());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = (1.0 - h) * c[i] + h * nu[i];
  return SpectralField(nu.lattice(), std::move(c), FieldKind::density, 1e-6);
}

inline SpectralField shifted(const SpectralField& mu, const SpectralField& q, double h) {
  Modes c = embed(mu.lattice(), mu.coeffs(), q.lattice());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += h * q[i];
  return SpectralField(q.lattice(), std::move(c), FieldKind::density, 1e-6);
}

inline void finish(RepresentationCheck& c, const RepresentationConfig& cfg) {
  c.richardson = 2.0 * c.fd_half - c.fd_h;
  const double e1 = std::abs(c.fd_h - c.exact), e2 = std::abs(c.fd_half - c.exact);
  c.order = std::log2(e1 / e2);
  c.order_ok = c.order >= cfg.min_order;
  c.rel_error = std::abs(c.richardson - c.exact) / std::abs(c.exact);
  c.agreement_ok = c.rel_error <= cfg.rel_tol;
}

}  // namespace detail

/// Compares the tangent representations of dU/dm and of the mixed second
/// derivative with finite differences of the flow in the initial measure.
inline RepresentationReport representation_check_suite(const RepresentationConfig& cfg) {
  if (!cfg.phi) throw InvalidInput("representation_check: functional missing");
  if (cfg.z_list.empty()) throw InvalidInput("representation_check: empty z list");
  if (!(cfg.h > 0.0 && cfg.h < 1.0)) throw InvalidInput("representation_check: h must lie in (0, 1)");
  if (cfg.mu.dim() != 1) throw InvalidInput("representation_check: d = 1 only");
  const ModeLattice& lat = cfg.solver.lattice;
  const Functional& phi = *cfg.phi;

  struct Job {
    std::string kind;
    double t, z1, z2;
  };
  std::vector<Job> jobs;
  for (double z : cfg.z_list) jobs.push_back({"identity", 0.0, z, z});
  for (double t : cfg.t_list) {
    for (double z : cfg.z_list) jobs.push_back({"first", t, z, z});
    if (cfg.mixed)
      for (std::size_t i = 0; i < cfg.z_list.size(); ++i)
        jobs.push_back({"mixed", t, cfg.z_list[i], cfg.z_list[(i + 1) % cfg.z_list.size()]});
  }

  RepresentationReport rep;
  rep.checks.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    RepresentationCheck c;
    c.kind = job.kind;
    c.t = job.t;
    c.z1 = job.z1;
    c.z2 = job.z2;
    const TorusPoint z1({job.z1}), z2({job.z2});
    try {
      if (job.kind == "identity") {
        // raw Dirac modes: the pairing is then the exact point value of a
        // derivative whose modes fit on the lattice
        c.exact = evaluate_at(phi.derivatives(embed(cfg.mu, lat)).first, z1.coords());
        c.fd_h = c.fd_half = c.richardson = u_first_derivative(cfg.drift, phi, cfg.mu, 0.0, z1, cfg.solver, {false, 0});
        c.rel_error = std::abs(c.richardson - c.exact);
        c.agreement_ok = c.rel_error <= cfg.identity_tol * std::max(1.0, std::abs(c.exact));
        c.order = std::numeric_limits<double>::quiet_NaN();
      } else if (job.kind == "first") {
        c.exact = u_first_derivative(cfg.drift, phi, cfg.mu, job.t, z1, cfg.solver, cfg.smoothing);
        const SpectralField base = detail::flow_at(cfg.drift, cfg.mu, job.t, cfg.solver);
        const SpectralField delta = dirac_modes(lat, z1, cfg.smoothing);
        auto fd = [&](double h) {
          const SpectralField moved = detail::flow_at(cfg.drift, detail::convex(cfg.mu, delta, h), job.t, cfg.solver);
          return phi.increment(base, moved) / h;
        };
        c.fd_h = fd(cfg.h);
        c.fd_half = fd(cfg.h / 2.0);
        detail::finish(c, cfg);
      } else {
        c.exact = u_second_mixed_derivative(cfg.drift, phi, cfg.mu, job.t, z1, 0, z2, 0, cfg.solver, cfg.smoothing);
        SolverConfig sc = cfg.solver;
        sc.t_end = job.t;
        sc.record_stride = std::max(1, sc.steps());
        // F(mu) = <dPhi/dm(m_t(mu)), d1(t; mu, z1)>; differentiate along D'_{z2}
        auto f = [&](const SpectralField& mu) {
          const TangentSeries s = solve_d1(cfg.drift, mu, z1, 0, sc, cfg.smoothing);
          return phi.first_pairing(s.m.back(), s.first.back()[0]);
        };
        const double f0 = f(cfg.mu);
        const SpectralField dz2 = dirac_derivative_modes(lat, z2, 0, cfg.smoothing);
        c.fd_h = (f(detail::shifted(cfg.mu, dz2, cfg.h)) - f0) / cfg.h;
        c.fd_half = (f(detail::shifted(cfg.mu, dz2, cfg.h / 2.0)) - f0) / (cfg.h / 2.0);
        detail::finish(c, cfg);
      }
    } catch (const std::exception& e) {
      throw InvalidInput("representation_check: " + job.kind + " at t = " + std::to_string(job.t) +
                         ", z = " + std::to_string(job.z1) + ": " + e.what());
    }
    rep.checks[j] = c;
  });
  return rep;
}

}  // namespace chaosbench
