#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/spectral_field.hpp"

namespace chaosbench {

/// Squared dual norm together with an upper bound on the modes the lattice
/// cannot see. The bound assumes |a^n - b^n| <= 2 outside the lattice (true
/// for differences of probability measures).
struct DualNormSq {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// Bound on 4 * sum over modes outside the lattice of (1+|n|^2)^{-s}. Modes
/// with max_j |n_j| = k have |n|^2 >= k^2; shells are summed explicitly up to
/// K and the rest is bounded by an integral. Infinite when 2s <= d.
inline double sobolev_tail_bound(int dim, int cutoff, double s) {
  if (2.0 * s <= dim) return std::numeric_limits<double>::infinity();
  const int k_max = cutoff + 4096;
  double sum = 0.0;
  for (int k = cutoff + 1; k <= k_max; ++k) {
    const double shell = std::pow(2.0 * k + 1.0, dim) - std::pow(2.0 * k - 1.0, dim);
    sum += shell * std::pow(1.0 + double(k) * k, -s);
  }
  // shell(k) <= 2d (3k)^{d-1} and weight <= k^{-2s} for k >= 1
  const double rest = 2.0 * dim * std::pow(3.0, dim - 1) * std::pow(double(k_max), dim - 2.0 * s) / (2.0 * s - dim);
  return 4.0 * (sum + rest);
}

/// sum_n (1+|n|^2)^{-s} |c^n|^2 for raw coefficients on `lattice`, scaled so
/// that tiny coefficients do not underflow when squared.
inline double weighted_sq_sum(const ModeLattice& lattice, std::span<const cplx> c, double s) {
  double big = 0.0;
  for (const auto& z : c) big = std::max({big, std::abs(z.real()), std::abs(z.imag())});
  if (big == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const double w = std::pow(1.0 + lattice.norm_sq(i), -s);
    acc += w * std::norm(c[i] / big);
  }
  return acc * big * big;
}

/// Square root of weighted_sq_sum, overflow- and underflow-safe.
inline double dual_norm(const ModeLattice& lattice, std::span<const cplx> c, double s) {
  double big = 0.0;
  for (const auto& z : c) big = std::max({big, std::abs(z.real()), std::abs(z.imag())});
  if (big == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    acc += std::pow(1.0 + lattice.norm_sq(i), -s) * std::norm(c[i] / big);
  return big * std::sqrt(acc);
}

inline double dual_norm(const SpectralField& f, double s) { return dual_norm(f.lattice(), f.coeffs(), s); }

/// ||a - b||^2 in the dual Sobolev norm of order s, truncated at the lattice.
inline DualNormSq sobolev_dual_norm_sq(const SpectralField& a, const SpectralField& b, double s) {
  if (!(s > 0.0)) throw InvalidInput("sobolev_dual_norm_sq: s must be positive");
  if (!(a.lattice() == b.lattice())) throw InvalidInput("sobolev_dual_norm_sq: lattice mismatch");
  const ModeLattice& lat = a.lattice();
  double acc = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) acc += std::pow(1.0 + lat.norm_sq(i), -s) * std::norm(a[i] - b[i]);
  return {acc, sobolev_tail_bound(lat.dim(), lat.cutoff(), s)};
}

}  // namespace chaosbench
