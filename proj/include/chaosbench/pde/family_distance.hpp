#pragma once

#include <cmath>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/norms.hpp"
#include "chaosbench/core/rotation.hpp"
#include "chaosbench/pde/stationary.hpp"

namespace chaosbench {

/// Distance of the Kuramoto flow to the rotated stationary profiles.
struct FamilyDistanceSeries {
  std::vector<double> t;
  std::vector<double> distance;  // min_psi ||m(t) - p_psi||_{-s,2}
  std::vector<double> phase;     // minimising psi
};

namespace detail {

// m = rotate(p + r, psi) with the minimiser of ||p + r - p_delta|| kept at
// delta = 0. The deviation r is integrated directly, so distances far below
// the size of p keep full relative precision; the plain flow would lose them
// to cancellation around 1e-16.
class ModulatedKuramoto {
 public:
  ModulatedKuramoto(double kappa, const SpectralField& profile, int cutoff, double s)
      : kappa_(kappa), m_(cutoff), p_(embed(profile.lattice(), profile.coeffs(), ModeLattice(1, cutoff))) {
    w_.resize(p_.size());
    lap_.resize(p_.size());
    for (int n = -m_; n <= m_; ++n) {
      w_[idx(n)] = std::pow(1.0 + double(n) * n, -s);
      lap_[idx(n)] = -2.0 * std::numbers::pi * std::numbers::pi * double(n) * n;
    }
  }

  std::size_t idx(int n) const { return static_cast<std::size_t>(n + m_); }
  cplx at(const Modes& v, int n) const { return std::abs(n) > m_ ? cplx{} : v[idx(n)]; }

  // Nonlinear part of dr/dt: the linearisation at p without the Laplacian,
  // plus the quadratic term. The profile's own residual is taken as zero.
  Modes g(const Modes& r) const {
    Modes out(r.size());
    const double c = 2.0 * std::numbers::pi * std::numbers::pi * kappa_;
    const cplx r1 = at(r, 1), rm1 = at(r, -1), p1 = at(p_, 1), pm1 = at(p_, -1);
    for (int n = -m_; n <= m_; ++n) {
      if (n == 0) continue;
      const cplx lin = at(p_, n - 1) * r1 + at(r, n - 1) * p1 - at(p_, n + 1) * rm1 - at(r, n + 1) * pm1;
      const cplx quad = at(r, n - 1) * r1 - at(r, n + 1) * rm1;
      out[idx(n)] = c * n * (lin + quad);
    }
    return out;
  }

  // Lawson RK4 with the exact heat factor.
  void step(Modes& r, double h) const {
    const std::size_t k = r.size();
    std::vector<double> e1(k), e2(k);
    for (std::size_t i = 0; i < k; ++i) {
      e1[i] = std::exp(lap_[i] * h);
      e2[i] = std::exp(lap_[i] * h / 2.0);
    }
    const Modes k1 = g(r);
    Modes a(k);
    for (std::size_t i = 0; i < k; ++i) a[i] = e2[i] * (r[i] + h / 2.0 * k1[i]);
    const Modes k2 = g(a);
    for (std::size_t i = 0; i < k; ++i) a[i] = e2[i] * r[i] + h / 2.0 * k2[i];
    const Modes k3 = g(a);
    for (std::size_t i = 0; i < k; ++i) a[i] = e1[i] * r[i] + h * e2[i] * k3[i];
    const Modes k4 = g(a);
    for (std::size_t i = 0; i < k; ++i)
      r[i] = e1[i] * r[i] + h / 6.0 * (e1[i] * k1[i] + 2.0 * e2[i] * (k2[i] + k3[i]) + k4[i]);
  }

  // p_n (e^{i theta} - 1) without cancellation.
  static cplx expm1i(double theta) { return cplx(0.0, 2.0 * std::sin(theta / 2.0)) * std::polar(1.0, theta / 2.0); }

  // Move the frame by the minimising delta so the minimum sits at 0.
  double regauge(Modes& r) const {
    // Rounding seeds an i * p' component that no real rotation removes and
    // the flow does not damp; keep r the coefficients of a real field.
    for (int n = 1; n <= m_; ++n) {
      const cplx v = 0.5 * (r[idx(n)] + std::conj(r[idx(-n)]));
      r[idx(n)] = v;
      r[idx(-n)] = std::conj(v);
    }
    double delta = 0.0;
    if (dual_norm(ModeLattice(1, m_), r, 1.0) > 1e-4) {
      Modes full(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) full[i] = p_[i] + r[i];
      full[idx(0)] = 1.0;
      const Alignment a = align_to_family(SpectralField(ModeLattice(1, m_), full, FieldKind::density, 1e-6),
                                          SpectralField(ModeLattice(1, m_), p_, FieldKind::density), 1.0);
      delta = a.psi > 0.5 ? a.psi - 1.0 : a.psi;
    } else {
      // Newton on J(delta) = sum w |r_n - p_n (e^{-i 2 pi n delta} - 1)|^2
      for (int it = 0; it < 6; ++it) {
        double d1 = 0.0, d2 = 0.0;
        for (int n = -m_; n <= m_; ++n) {
          const std::size_t i = idx(n);
          const cplx e = std::polar(1.0, -two_pi * n * delta);
          const cplx res = r[i] - p_[i] * expm1i(-two_pi * n * delta);
          const cplx dres = p_[i] * cplx(0.0, two_pi * n) * e;
          const cplx ddres = p_[i] * (two_pi * n) * (two_pi * n) * e;
          d1 += 2.0 * w_[i] * (dres * std::conj(res)).real();
          d2 += 2.0 * w_[i] * (std::norm(dres) + (ddres * std::conj(res)).real());
        }
        if (!(d2 > 0.0)) break;
        const double step = d1 / d2;
        delta -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(delta))) break;
      }
    }
    // r <- e^{i 2 pi n delta}(p + r) - p
    for (int n = -m_; n <= m_; ++n) {
      const std::size_t i = idx(n);
      const double th = two_pi * n * delta;
      r[i] = p_[i] * expm1i(th) + std::polar(1.0, th) * r[i];
    }
    r[idx(0)] = 0.0;
    return delta;
  }

  double distance(const Modes& r, double s) const { return dual_norm(ModeLattice(1, m_), r, s); }
  const Modes& profile() const { return p_; }

 private:
  double kappa_;
  int m_;
  Modes p_;
  std::vector<double> w_, lap_;
};

}  // namespace detail

/// min_psi ||m(t; mu0) - p_psi||_{-s,2} for the Kuramoto flow at kappa > 1,
/// sampled every `stride` steps of size dt up to t_end.
inline FamilyDistanceSeries kuramoto_family_distance(double kappa, const SpectralField& mu0, double dt, double t_end,
                                                     int stride = 1, int cutoff = 32, double s = 1.0) {
  if (mu0.dim() != 1 || mu0.kind() != FieldKind::density) throw InvalidInput("kuramoto_family_distance: need a d = 1 density");
  if (!(kappa > 1.0)) throw InvalidInput("kuramoto_family_distance: the profile family needs kappa > 1");
  if (!(dt > 0.0) || dt > 0.05) throw InvalidInput("kuramoto_family_distance: dt must lie in (0, 0.05]");
  if (stride < 1) throw InvalidInput("kuramoto_family_distance: stride must be >= 1");
  const KuramotoProfile prof = stationary_kuramoto_profile(kappa, cutoff);
  const detail::ModulatedKuramoto sys(kappa, prof.p, cutoff, s);
  const ModeLattice lat(1, cutoff);
  Modes r = embed(mu0.lattice(), mu0.coeffs(), lat);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sys.profile()[i];
  r[lat.zero_index()] = 0.0;

  FamilyDistanceSeries out;
  double psi = sys.regauge(r);
  out.t.push_back(0.0);
  out.distance.push_back(sys.distance(r, s));
  out.phase.push_back(wrap_coordinate(psi));
  const int steps = static_cast<int>(std::ceil(t_end / dt - 1e-9));
  const double h = steps > 0 ? t_end / steps : dt;
  for (int k = 1; k <= steps; ++k) {
    sys.step(r, h);
    psi += sys.regauge(r);
    if (k % stride == 0 || k == steps) {
      out.t.push_back(k * h);
      out.distance.push_back(sys.distance(r, s));
      out.phase.push_back(wrap_coordinate(psi));
    }
  }
  return out;
}

}  // namespace chaosbench
