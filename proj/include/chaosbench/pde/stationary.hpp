#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/grid.hpp"
#include "chaosbench/core/spectral_field.hpp"
#include "chaosbench/pde/bessel.hpp"

namespace chaosbench {

struct KuramotoProfile {
  double kappa = 0.0;
  double r = 0.0;         // order parameter |p^1|
  double z = 1.0;         // normalising constant \int exp(2 kappa r cos 2 pi x) dx
  double residual = 0.0;  // |r - I1(2 kappa r)/I0(2 kappa r)|
  double psi = 0.0;
  SpectralField p;
};

/// Positive root of r = I1(2 kappa r)/I0(2 kappa r) for kappa > 1 by
/// Newton's method kept inside a shrinking sign bracket.
inline double kuramoto_order_parameter(double kappa) {
  if (!(kappa > 0.0)) throw InvalidInput("stationary_kuramoto_profile: kappa must be positive");
  if (kappa <= 1.0) return 0.0;
  auto f = [kappa](double r) { return r - bessel_ratio_i1_i0(2.0 * kappa * r); };
  // f < 0 just above 0 (slope 1 - kappa) and f(1) > 0 since the ratio is < 1
  double lo = std::min(1e-3, 0.5 * std::sqrt(2.0 * (kappa - 1.0) / kappa));
  while (f(lo) >= 0.0 && lo > 1e-12) lo *= 0.5;
  double hi = 1.0;
  double r = std::min(std::sqrt(2.0 * (kappa - 1.0) / kappa), 0.9);
  if (r <= lo || r >= hi) r = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fr = f(r);
    if (fr == 0.0) return r;
    if (fr < 0.0)
      lo = r;
    else
      hi = r;
    const double df = 1.0 - 2.0 * kappa * bessel_ratio_derivative(2.0 * kappa * r);
    double next = r - fr / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 1e-16 * std::max(1.0, r)) return next;
    r = next;
    if (hi - lo < 1e-16) break;
  }
  return r;
}

/// Stationary Kuramoto density p(x) = exp(2 kappa r cos 2 pi x)/Z at phase 0
/// (uniform for kappa <= 1). Modes are the discrete projection of fine grid
/// samples, accurate to rounding because the density is entire.
inline KuramotoProfile stationary_kuramoto_profile(double kappa, int cutoff = 32) {
  const double r = kuramoto_order_parameter(kappa);
  const ModeLattice lat(1, cutoff);
  KuramotoProfile out;
  out.kappa = kappa;
  out.r = r;
  if (r == 0.0) {
    out.p = SpectralField::uniform(lat);
    return out;
  }
  const double a = 2.0 * kappa * r;
  const int grid = std::max(4 * cutoff + 1, 257);
  std::vector<double> samples(static_cast<std::size_t>(grid));
  for (int g = 0; g < grid; ++g) samples[static_cast<std::size_t>(g)] = std::exp(a * std::cos(two_pi * g / grid));
  double z = 0.0;
  for (double v : samples) z += v;
  z /= grid;
  for (auto& v : samples) v /= z;
  Modes c = forward_transform(lat, std::span<const double>(samples), grid);
  out.z = z;
  out.residual = std::abs(r - bessel_ratio_i1_i0(a));
  symmetrize(lat, c);
  c[lat.zero_index()] = 1.0;
  out.p = SpectralField(lat, std::move(c), FieldKind::density, 1e-9);
  return out;
}

/// d/dpsi of the rotated profile at psi = 0: coefficients -i 2 pi n p^n.
inline SpectralField profile_derivative(const SpectralField& p) {
  const ModeLattice& lat = p.lattice();
  Modes c(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) c[i] = cplx(0.0, -two_pi * lat.mode(i)[0]) * p[i];
  return SpectralField(lat, std::move(c), FieldKind::signed_distribution);
}

}  // namespace chaosbench
