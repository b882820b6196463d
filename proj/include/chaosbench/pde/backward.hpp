#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/grid.hpp"
#include "chaosbench/core/spectral_field.hpp"
#include "chaosbench/drift/drift.hpp"
#include "chaosbench/pde/solver.hpp"

namespace chaosbench {

enum class Freeze { along_flow, at_uniform, at_profile };

/// Backward solution w(s, .) on the recorded grid s = t, t - h, ..., 0
/// (stored in increasing s).
struct BackwardSeries {
  ModeLattice lattice;
  std::vector<double> s;
  std::vector<SpectralField> w;
};

namespace detail {

class BackwardOperator {
 public:
  BackwardOperator(const DriftSpec& drift, const ModeLattice& lat, Freeze freeze, std::optional<SpectralField> profile)
      : drift_(drift), lat_(lat), conv_(lat), freeze_(freeze), profile_(std::move(profile)) {
    decay_.resize(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) decay_[i] = 2.0 * std::numbers::pi * std::numbers::pi * lat.norm_sq(i);
    if (freeze_ == Freeze::at_uniform) frozen_b_ = eval_drift_field(drift_, lat_, SpectralField::uniform(lat_).modes());
    if (freeze_ == Freeze::at_profile) {
      if (!profile_) throw InvalidInput("solve_backward_kolmogorov: at-profile freeze needs a profile");
      frozen_m_ = embed(profile_->lattice(), profile_->coeffs(), lat_);
      frozen_b_ = eval_drift_field(drift_, lat_, frozen_m_);
    }
  }

  const std::vector<double>& decay() const { return decay_; }
  bool frozen() const { return freeze_ != Freeze::along_flow; }

  // V.grad w (+ nonlocal adjoint term at the profile); `m` is the flow state
  // for along-flow freezing and ignored otherwise.
  Modes apply(const Modes& w, const Modes* m) const {
    const std::size_t d = static_cast<std::size_t>(lat_.dim());
    VectorModes grad(d, Modes(lat_.size()));
    for (std::size_t i = 0; i < lat_.size(); ++i)
      for (std::size_t j = 0; j < d; ++j) grad[j][i] = cplx(0.0, two_pi * lat_.mode(i)[static_cast<int>(j)]) * w[i];
    const VectorModes b = frozen() ? frozen_b_ : eval_drift_field(drift_, lat_, *m);
    Modes out(lat_.size());
    for (std::size_t j = 0; j < d; ++j) {
      const Modes p = conv_.product(b[j], grad[j]);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += p[i];
    }
    if (freeze_ == Freeze::at_profile) {
      VectorModes g(d);
      for (std::size_t j = 0; j < d; ++j) g[j] = conv_.product(frozen_m_, grad[j]);
      const Modes a = drift_derivative_adjoint(drift_, lat_, g);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += a[i];
    }
    return out;
  }

 private:
  DriftSpec drift_;
  ModeLattice lat_;
  Convolver conv_;
  Freeze freeze_;
  std::optional<SpectralField> profile_;
  Modes frozen_m_;
  VectorModes frozen_b_;
  std::vector<double> decay_;
};

}  // namespace detail

/// Solve d_s w + 1/2 Lap w + V(s).grad w (+ nonlocal term) = 0 backwards from
/// w(t) = xi with Lawson RK4 in tau = t - s.
///
/// Along-flow freezing needs V at half steps: the flow is recomputed here
/// from flow.m[0] with step h/2 on the same lattice; `flow` must cover [0, t].
inline BackwardSeries solve_backward_kolmogorov(const DriftSpec& drift, const FlowSeries& flow, const SpectralField& xi,
                                                double t, Freeze freeze, const SolverConfig& cfg,
                                                std::optional<SpectralField> profile = std::nullopt) {
  cfg.validate();
  if (freeze == Freeze::along_flow) {
    if (flow.m.empty() || flow.t.back() < t - 1e-12) throw InvalidInput("solve_backward_kolmogorov: flow too short");
  }
  const ModeLattice& lat = cfg.lattice;
  detail::BackwardOperator op(drift, lat, freeze, std::move(profile));
  const int steps = std::max(1, static_cast<int>(std::ceil(t / cfg.dt - 1e-9)));
  const double h = t / steps;

  std::vector<Modes> half_flow;  // m at s = k h/2, k = 0..2 steps
  if (freeze == Freeze::along_flow) {
    SolverConfig fc = cfg;
    fc.dt = 0.5 * h;
    fc.t_end = t;
    fc.record_stride = 1;
    const FlowSeries fine = solve_nonlinear_fp(drift, flow.m.front(), fc);
    if (fine.m.size() != static_cast<std::size_t>(2 * steps + 1))
      throw InvalidInput("solve_backward_kolmogorov: internal flow grid mismatch");
    for (const auto& f : fine.m) half_flow.push_back(f.modes());
  }
  auto m_at = [&](int half_index) -> const Modes* {
    return half_flow.empty() ? nullptr : &half_flow[static_cast<std::size_t>(half_index)];
  };

  const auto& dec = op.decay();
  std::vector<double> e(dec.size()), e2(dec.size());
  for (std::size_t i = 0; i < dec.size(); ++i) {
    e[i] = std::exp(-dec[i] * h);
    e2[i] = std::exp(-dec[i] * h * 0.5);
  }
  auto axpy = [](const Modes& x, double a, const Modes& y) {
    Modes o = x;
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += a * y[i];
    return o;
  };
  auto scale = [](Modes x, const std::vector<double>& f) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] *= f[i];
    return x;
  };

  Modes w = embed(xi.lattice(), xi.coeffs(), lat);
  std::vector<Modes> rev{w};
  for (int k = 0; k < steps; ++k) {
    // tau from k h to (k+1) h, i.e. s from t - k h down to t - (k+1) h
    const int s0 = 2 * (steps - k), s_half = s0 - 1, s1 = s0 - 2;
    const Modes k1 = op.apply(w, m_at(s0));
    const Modes u1 = scale(axpy(w, 0.5 * h, k1), e2);
    const Modes k2 = op.apply(u1, m_at(s_half));
    const Modes u2 = axpy(scale(w, e2), 0.5 * h, k2);
    const Modes k3 = op.apply(u2, m_at(s_half));
    const Modes u3 = axpy(scale(w, e), h, scale(k3, e2));
    const Modes k4 = op.apply(u3, m_at(s1));
    Modes sum = scale(k1, e);
    const Modes mid = scale(axpy(k2, 1.0, k3), e2);
    sum = axpy(axpy(sum, 2.0, mid), 1.0, k4);
    w = axpy(scale(w, e), h / 6.0, sum);
    symmetrize(lat, w);
    rev.push_back(w);
  }
  BackwardSeries out{lat, {}, {}};
  for (int k = steps; k >= 0; --k) {
    out.s.push_back(t - k * h);
    out.w.emplace_back(lat, rev[static_cast<std::size_t>(k)], FieldKind::signed_distribution, 1e-6);
  }
  return out;
}

/// sup over a grid of |w - mean(w)|.
inline double sup_deviation(const SpectralField& w) {
  Modes c(w.coeffs().begin(), w.coeffs().end());
  c[w.lattice().zero_index()] = 0.0;
  const auto v = evaluate_on_grid(SpectralField(w.lattice(), std::move(c), FieldKind::signed_distribution));
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace chaosbench
