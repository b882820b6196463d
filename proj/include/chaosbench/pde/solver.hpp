#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/grid.hpp"
#include "chaosbench/core/spectral_field.hpp"
#include "chaosbench/drift/drift.hpp"

namespace chaosbench {

enum class Integrator { if_rk4, semi_implicit_euler };

inline const char* to_string(Integrator i) { return i == Integrator::if_rk4 ? "if-rk4" : "semi-implicit-euler"; }

struct SolverConfig {
  ModeLattice lattice{1, 32};
  double dt = 1e-3;
  double t_end = 1.0;
  Integrator integrator = Integrator::if_rk4;
  bool dealias = true;
  int record_stride = 1;

  int steps() const { return static_cast<int>(std::ceil(t_end / dt - 1e-9)); }
  double step_size() const { return steps() > 0 ? t_end / steps() : dt; }

  void validate() const {
    if (!(dt > 0.0)) throw InvalidInput("SolverConfig: dt must be positive");
    if (dt > 0.05) throw InvalidInput("SolverConfig: dt must not exceed 0.05");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidInput("SolverConfig: t_end must be finite and >= 0");
    if (record_stride < 1) throw InvalidInput("SolverConfig: record_stride must be >= 1");
  }
};

/// Blocks of the augmented Galerkin system: the density m, first-order
/// tangents q_k (linear in an initial perturbation) and second-order tangents
/// r_s driven by pairs (q_a, q_b). All blocks live on the solver lattice.
struct AugmentedState {
  Modes m;
  std::vector<Modes> first;
  std::vector<Modes> second;
};

struct AugmentedSeries {
  ModeLattice lattice;
  std::vector<double> t;
  std::vector<AugmentedState> states;
  std::vector<std::string> warnings;
  std::optional<double> positivity_breach_time;
};

namespace detail {

/// Right-hand side pieces of the Fokker-Planck system without the Laplacian.
class FokkerPlanckOperator {
 public:
  FokkerPlanckOperator(DriftSpec drift, ModeLattice lattice, std::vector<std::pair<std::size_t, std::size_t>> pairs,
                       bool dealias)
      : drift_(std::move(drift)), lat_(std::move(lattice)), conv_(lat_, dealias), pairs_(std::move(pairs)) {
    if (drift_dim(drift_) != lat_.dim()) throw InvalidInput("Fokker-Planck solver: drift and lattice dimensions differ");
    decay_.resize(lat_.size());
    const double c = 2.0 * std::numbers::pi * std::numbers::pi;
    for (std::size_t i = 0; i < lat_.size(); ++i) decay_[i] = c * lat_.norm_sq(i);
  }

  const ModeLattice& lattice() const { return lat_; }
  const std::vector<double>& decay() const { return decay_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const { return pairs_; }
  const DriftSpec& drift() const { return drift_; }

  // -i 2 pi n . (sum of products), accumulated into out
  void add_divergence(const VectorModes& flux, Modes& out) const {
    for (std::size_t i = 0; i < lat_.size(); ++i) {
      const Mode& n = lat_.mode(i);
      cplx acc{};
      for (int j = 0; j < lat_.dim(); ++j) acc += double(n[j]) * flux[static_cast<std::size_t>(j)][i];
      out[i] -= cplx(0.0, two_pi) * acc;
    }
  }

  // flux_j += a * b_j
  void add_product(const Modes& a, const VectorModes& b, VectorModes& flux) const {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Modes p = conv_.product(a, b[j]);
      for (std::size_t i = 0; i < p.size(); ++i) flux[j][i] += p[i];
    }
  }

  AugmentedState nonlinear(const AugmentedState& u) const {
    const std::size_t d = static_cast<std::size_t>(lat_.dim());
    const std::size_t n = lat_.size();
    AugmentedState out{Modes(n), std::vector<Modes>(u.first.size(), Modes(n)),
                       std::vector<Modes>(u.second.size(), Modes(n))};
    const VectorModes bm = eval_drift_field(drift_, lat_, u.m);
    {
      VectorModes flux(d, Modes(n));
      add_product(u.m, bm, flux);
      add_divergence(flux, out.m);
    }
    std::vector<VectorModes> bq(u.first.size());
    for (std::size_t k = 0; k < u.first.size(); ++k) {
      bq[k] = eval_drift_derivative(drift_, lat_, u.first[k]);
      VectorModes flux(d, Modes(n));
      add_product(u.first[k], bm, flux);
      add_product(u.m, bq[k], flux);
      add_divergence(flux, out.first[k]);
    }
    for (std::size_t s = 0; s < u.second.size(); ++s) {
      const auto [a, b] = pairs_[s];
      VectorModes flux(d, Modes(n));
      add_product(u.second[s], bm, flux);
      add_product(u.m, eval_drift_derivative(drift_, lat_, u.second[s]), flux);
      // cross terms; the second measure derivative of b vanishes (b is affine in mu)
      add_product(u.first[a], bq[b], flux);
      add_product(u.first[b], bq[a], flux);
      add_divergence(flux, out.second[s]);
    }
    return out;
  }

 private:
  DriftSpec drift_;
  ModeLattice lat_;
  Convolver conv_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<double> decay_;
};

template <class F>
void for_each_block(AugmentedState& u, F&& f) {
  f(u.m);
  for (auto& q : u.first) f(q);
  for (auto& r : u.second) f(r);
}

// out = x + h * y, blockwise
inline AugmentedState axpy(const AugmentedState& x, double h, const AugmentedState& y) {
  AugmentedState out = x;
  auto add = [h](Modes& a, const Modes& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += h * b[i];
  };
  add(out.m, y.m);
  for (std::size_t k = 0; k < out.first.size(); ++k) add(out.first[k], y.first[k]);
  for (std::size_t k = 0; k < out.second.size(); ++k) add(out.second[k], y.second[k]);
  return out;
}

inline void scale_modes(AugmentedState& u, const std::vector<double>& factor) {
  for_each_block(u, [&](Modes& a) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= factor[i];
  });
}

}  // namespace detail

/// Integrates the augmented Fokker-Planck system with the exact heat factor.
///
/// IF-RK4 is the Lawson scheme: stages are advanced with exp(-2 pi^2 |n|^2 h)
/// and the explicit classical RK4 weights act on the transport term. The mass
/// mode of m is pinned to 1 and of every tangent block to 0 after each step,
/// and conjugate symmetry is re-imposed.
class AugmentedSolver {
 public:
  AugmentedSolver(DriftSpec drift, SolverConfig cfg, std::vector<std::pair<std::size_t, std::size_t>> pairs = {})
      : cfg_(std::move(cfg)), op_(std::move(drift), cfg_.lattice, std::move(pairs), cfg_.dealias) {
    cfg_.validate();
    validate(op_.drift());
  }

  const SolverConfig& config() const { return cfg_; }
  const ModeLattice& lattice() const { return cfg_.lattice; }

  AugmentedState rhs(const AugmentedState& u) const {
    AugmentedState k = op_.nonlinear(u);
    const auto& dec = op_.decay();
    auto sub = [&](Modes& out, const Modes& v) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] -= dec[i] * v[i];
    };
    sub(k.m, u.m);
    for (std::size_t j = 0; j < k.first.size(); ++j) sub(k.first[j], u.first[j]);
    for (std::size_t j = 0; j < k.second.size(); ++j) sub(k.second[j], u.second[j]);
    return k;
  }

  void step(AugmentedState& u, double h) const {
    const auto& dec = op_.decay();
    if (cfg_.integrator == Integrator::semi_implicit_euler) {
      AugmentedState k = op_.nonlinear(u);
      u = detail::axpy(u, h, k);
      std::vector<double> f(dec.size());
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0 / (1.0 + h * dec[i]);
      detail::scale_modes(u, f);
    } else {
      std::vector<double> e(dec.size()), e2(dec.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = std::exp(-dec[i] * h);
        e2[i] = std::exp(-dec[i] * h * 0.5);
      }
      const AugmentedState k1 = op_.nonlinear(u);
      AugmentedState u1 = detail::axpy(u, 0.5 * h, k1);
      detail::scale_modes(u1, e2);
      const AugmentedState k2 = op_.nonlinear(u1);
      AugmentedState ue2 = u;
      detail::scale_modes(ue2, e2);
      const AugmentedState u2 = detail::axpy(ue2, 0.5 * h, k2);
      const AugmentedState k3 = op_.nonlinear(u2);
      AugmentedState k3e = k3;
      detail::scale_modes(k3e, e2);
      AugmentedState ue = u;
      detail::scale_modes(ue, e);
      const AugmentedState u3 = detail::axpy(ue, h, k3e);
      const AugmentedState k4 = op_.nonlinear(u3);
      // u_next = E u + h/6 (E k1 + 2 E2 (k2 + k3) + k4)
      AugmentedState a = k1;
      detail::scale_modes(a, e);
      AugmentedState b = detail::axpy(k2, 1.0, k3);
      detail::scale_modes(b, e2);
      AugmentedState sum = detail::axpy(detail::axpy(a, 2.0, b), 1.0, k4);
      u = detail::axpy(ue, h / 6.0, sum);
    }
    normalise(u);
  }

  void normalise(AugmentedState& u) const {
    const ModeLattice& lat = cfg_.lattice;
    const std::size_t z = lat.zero_index();
    symmetrize(lat, u.m);
    u.m[z] = 1.0;
    for (auto& q : u.first) {
      symmetrize(lat, q);
      q[z] = 0.0;
    }
    for (auto& r : u.second) {
      symmetrize(lat, r);
      r[z] = 0.0;
    }
  }

  /// Integrate from t = 0 to cfg.t_end, recording every record_stride steps
  /// and at the final time.
  AugmentedSeries run(AugmentedState u) const {
    const ModeLattice& lat = cfg_.lattice;
    check_block_sizes(u);
    normalise(u);
    AugmentedSeries out{lat, {}, {}, {}, std::nullopt};
    const int steps = cfg_.steps();
    const double h = cfg_.step_size();
    auto record = [&](int k) {
      const double t = k * h;
      out.t.push_back(t);
      out.states.push_back(u);
      if (!out.positivity_breach_time) {
        const SpectralField f(lat, u.m, FieldKind::density, 1e-6);
        const double lo = grid_minimum(f, default_grid_size(lat));
        if (lo < -tol_pos) {
          out.positivity_breach_time = t;
          out.warnings.push_back("PositivityBreach: density minimum " + std::to_string(lo) + " at t = " + std::to_string(t));
        }
      }
    };
    record(0);
    for (int k = 1; k <= steps; ++k) {
      step(u, h);
      if (k % cfg_.record_stride == 0 || k == steps) record(k);
    }
    return out;
  }

 private:
  void check_block_sizes(const AugmentedState& u) const {
    const std::size_t n = cfg_.lattice.size();
    bool ok = u.m.size() == n;
    for (const auto& q : u.first) ok = ok && q.size() == n;
    for (const auto& r : u.second) ok = ok && r.size() == n;
    if (!ok) throw InvalidInput("AugmentedSolver: block sizes do not match the solver lattice");
    if (u.second.size() != op_.pairs().size()) throw InvalidInput("AugmentedSolver: second-order blocks and pairs differ in number");
    for (const auto& [a, b] : op_.pairs())
      if (a >= u.first.size() || b >= u.first.size()) throw InvalidInput("AugmentedSolver: pair index out of range");
  }

  SolverConfig cfg_;
  detail::FokkerPlanckOperator op_;
};

/// Time series of the nonlinear flow m(t; mu0).
struct FlowSeries {
  ModeLattice lattice;
  std::vector<double> t;
  std::vector<SpectralField> m;
  std::vector<std::string> warnings;
  std::optional<double> positivity_breach_time;

  const SpectralField& at_time(double time) const {
    for (std::size_t k = 0; k < t.size(); ++k)
      if (std::abs(t[k] - time) <= 1e-9 * std::max(1.0, time)) return m[k];
    throw InvalidInput("FlowSeries: time " + std::to_string(time) + " was not recorded");
  }
};

inline FlowSeries solve_nonlinear_fp(const DriftSpec& drift, const SpectralField& mu0, const SolverConfig& cfg) {
  if (mu0.kind() != FieldKind::density) throw InvalidInput("solve_nonlinear_fp: initial datum must be a density");
  AugmentedSolver solver(drift, cfg);
  AugmentedState u{embed(mu0.lattice(), mu0.coeffs(), cfg.lattice), {}, {}};
  AugmentedSeries s = solver.run(std::move(u));
  FlowSeries out{cfg.lattice, std::move(s.t), {}, std::move(s.warnings), s.positivity_breach_time};
  out.m.reserve(s.states.size());
  for (auto& st : s.states) out.m.emplace_back(cfg.lattice, std::move(st.m), FieldKind::density, 1e-6);
  return out;
}

/// Galerkin right-hand side of the nonlinear equation at a density (used as a
/// stationarity residual).
inline SpectralField fp_residual(const DriftSpec& drift, const SpectralField& m) {
  SolverConfig cfg;
  cfg.lattice = m.lattice();
  AugmentedSolver solver(drift, cfg);
  AugmentedState k = solver.rhs(AugmentedState{m.modes(), {}, {}});
  return SpectralField(m.lattice(), std::move(k.m), FieldKind::signed_distribution, 1e-6);
}

/// L_m q: the linearised generator at m applied to a zero-mass q.
inline SpectralField apply_linearized(const DriftSpec& drift, const SpectralField& m, const SpectralField& q) {
  SolverConfig cfg;
  cfg.lattice = m.lattice();
  AugmentedSolver solver(drift, cfg);
  AugmentedState k = solver.rhs(AugmentedState{m.modes(), {embed(q.lattice(), q.coeffs(), m.lattice())}, {}});
  return SpectralField(m.lattice(), std::move(k.first[0]), FieldKind::signed_distribution, 1e-6);
}

}  // namespace chaosbench
