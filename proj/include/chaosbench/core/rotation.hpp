#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/grid.hpp"
#include "chaosbench/core/spectral_field.hpp"
#include "chaosbench/core/torus.hpp"

namespace chaosbench {

/// Shift a d=1 field by psi: coeff(n) -> coeff(n) exp(-i 2 pi n psi).
inline SpectralField rotate(const SpectralField& field, double psi) {
  if (field.dim() != 1) throw UnsupportedDimension("rotate: only d = 1");
  const ModeLattice& lat = field.lattice();
  Modes c(field.coeffs().begin(), field.coeffs().end());
  for (std::size_t i = 0; i < lat.size(); ++i) c[i] *= std::polar(1.0, -two_pi * lat.mode(i)[0] * psi);
  return SpectralField(lat, std::move(c), field.kind());
}

inline SpectralField rotate(const SpectralField& field, const TorusPoint& psi) { return rotate(field, psi[0]); }

struct Alignment {
  double psi = 0.0;
  double dist = 0.0;
  bool degenerate_phase = false;  // |mu^1| too small, coarse search used
};

namespace detail {

// J(psi) = sum_n w_n |mu_n - p_n e^{-i2pi n psi}|^2 and its psi-derivatives.
class AlignObjective {
 public:
  AlignObjective(const SpectralField& mu, const SpectralField& profile, double s)
      : lat_(mu.lattice()), mu_(mu.modes()), p_(embed(profile.lattice(), profile.coeffs(), mu.lattice())) {
    w_.resize(lat_.size());
    for (std::size_t i = 0; i < lat_.size(); ++i) w_[i] = std::pow(1.0 + lat_.norm_sq(i), -s);
  }

  double value(double psi) const {
    double j = 0.0;
    for (std::size_t i = 0; i < lat_.size(); ++i)
      j += w_[i] * std::norm(mu_[i] - p_[i] * std::polar(1.0, -two_pi * lat_.mode(i)[0] * psi));
    return j;
  }

  std::pair<double, double> derivatives(double psi) const {
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < lat_.size(); ++i) {
      const double k = two_pi * lat_.mode(i)[0];
      const cplx pe = p_[i] * std::polar(1.0, -k * psi);
      const cplx r = mu_[i] - pe;
      const cplx r1 = cplx(0.0, k) * pe;
      const cplx r2 = k * k * pe;
      d1 += 2.0 * w_[i] * (std::conj(r) * r1).real();
      d2 += 2.0 * w_[i] * (std::norm(r1) + (std::conj(r) * r2).real());
    }
    return {d1, d2};
  }

  // phase of mu^1 relative to profile^1; nan when either vanishes
  double phase_guess() const {
    const cplx m1 = mu_[lat_.zero_index() + 1];
    const cplx p1 = p_[lat_.zero_index() + 1];
    if (std::abs(m1) < 1e-12 || std::abs(p1) < 1e-12) return std::numeric_limits<double>::quiet_NaN();
    return -std::arg(m1 / p1) / two_pi;
  }

 private:
  ModeLattice lat_;
  Modes mu_, p_;
  std::vector<double> w_;
};

inline double golden_section(const AlignObjective& f, double lo, double hi, double tol) {
  const double g = std::numbers::phi - 1.0;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = f.value(a), fb = f.value(b);
  while (hi - lo > tol) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = f.value(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = f.value(b);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Find psi minimising ||mu - rotate(profile, psi)||_{-s,2}. The phase of the
/// first modes seeds the search; a 64-point scan guards against a poor seed
/// and replaces it when mu^1 vanishes. Golden-section refinement to 1e-10 is
/// followed by a few Newton steps on the exact derivative.
inline Alignment align_to_family(const SpectralField& mu, const SpectralField& profile, double s = 1.0) {
  if (mu.dim() != 1 || profile.dim() != 1) throw UnsupportedDimension("align_to_family: only d = 1");
  detail::AlignObjective f(mu, profile, s);
  Alignment out;
  double best = std::numeric_limits<double>::infinity(), center = 0.0;
  const double guess = f.phase_guess();
  if (std::isnan(guess)) {
    out.degenerate_phase = true;
  } else {
    center = guess;
    best = f.value(guess);
  }
  for (int k = 0; k < 64; ++k) {
    const double psi = k / 64.0;
    const double v = f.value(psi);
    if (v < best - 1e-14 * std::max(1.0, std::abs(best))) {
      best = v;
      center = psi;
    }
  }
  double psi = detail::golden_section(f, center - 1.0 / 64, center + 1.0 / 64, 1e-10);
  for (int it = 0; it < 4; ++it) {
    auto [d1, d2] = f.derivatives(psi);
    if (!(d2 > 0.0)) break;
    const double step = d1 / d2;
    if (std::abs(step) > 1e-6) break;
    psi -= step;
  }
  out.psi = wrap_coordinate(psi);
  out.dist = std::sqrt(std::max(0.0, f.value(psi)));
  return out;
}

/// \int U V / p over the circle, where U, V are primitives of the zero-mass
/// distributions u, v shifted so that \int U/p = \int V/p = 0. Grid quadrature
/// on `grid` points (spectrally accurate for smooth p).
inline double weighted_dual_inner(const SpectralField& u, const SpectralField& v, const SpectralField& p, int grid = 0) {
  if (u.dim() != 1 || v.dim() != 1 || p.dim() != 1) throw UnsupportedDimension("weighted_dual_inner: only d = 1");
  const ModeLattice& lat = u.lattice();
  if (!(v.lattice() == lat)) throw InvalidInput("weighted_dual_inner: u and v must share a lattice");
  if (std::abs(u[lat.zero_index()]) > 1e-12 || std::abs(v[lat.zero_index()]) > 1e-12)
    throw InvalidInput("weighted_dual_inner: u and v must have zero mass");
  if (grid <= 0) grid = std::max({256, 4 * lat.cutoff() + 1, 4 * p.lattice().cutoff() + 1});
  const auto pv = evaluate_on_grid(p, grid);
  for (double x : pv)
    if (x < tol_pos) throw NonPositiveDensity("weighted_dual_inner: density minimum below tol_pos");

  auto primitive = [&](const SpectralField& f) {
    Modes c(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const int n = lat.mode(i)[0];
      if (n != 0) c[i] = f[i] / cplx(0.0, two_pi * n);
    }
    auto z = inverse_transform(lat, c, grid);
    std::vector<double> vals(z.size());
    double num = 0.0, den = 0.0;
    for (std::size_t g = 0; g < z.size(); ++g) {
      vals[g] = z[g].real();
      num += vals[g] / pv[g];
      den += 1.0 / pv[g];
    }
    for (auto& x : vals) x -= num / den;
    return vals;
  };
  const auto uu = primitive(u);
  const auto vv = primitive(v);
  double s = 0.0;
  for (std::size_t g = 0; g < uu.size(); ++g) s += uu[g] * vv[g] / pv[g];
  return s / grid;
}

}  // namespace chaosbench
