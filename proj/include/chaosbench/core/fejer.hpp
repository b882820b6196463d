#pragma once

#include <cmath>

#include "chaosbench/core/empirical.hpp"
#include "chaosbench/core/error.hpp"
#include "chaosbench/core/spectral_field.hpp"

namespace chaosbench {

/// Triangular weight prod_j (1 - |n_j|/N), zero once any |n_j| >= N.
inline double fejer_weight(const Mode& n, int dim, int n_fejer) {
  double w = 1.0;
  for (int j = 0; j < dim; ++j) {
    const int a = std::abs(n[j]);
    if (a >= n_fejer) return 0.0;
    w *= 1.0 - double(a) / double(n_fejer);
  }
  return w;
}

/// Apply Fejer weights in place to raw coefficients on `lattice`.
inline void apply_fejer(const ModeLattice& lattice, Modes& c, int n_fejer) {
  for (std::size_t i = 0; i < lattice.size(); ++i) c[i] *= fejer_weight(lattice.mode(i), lattice.dim(), n_fejer);
}

/// Fejer smoothing on the source lattice; the result is a nonnegative
/// trigonometric polynomial of degree N-1 per axis whenever mu is a measure.
inline SpectralField fejer_smooth(const SpectralField& mu, int n_fejer) {
  if (n_fejer < 1) throw InvalidInput("fejer_smooth: N_fejer must be >= 1");
  const ModeLattice out_lat(mu.dim(), n_fejer - 1);
  if (mu.lattice().cutoff() < n_fejer - 1)
    throw TruncationError("fejer_smooth: source modes only up to " + std::to_string(mu.lattice().cutoff()) +
                          ", need " + std::to_string(n_fejer - 1));
  Modes c = embed(mu.lattice(), mu.coeffs(), out_lat);
  apply_fejer(out_lat, c, n_fejer);
  return SpectralField(out_lat, std::move(c), mu.kind());
}

inline SpectralField fejer_smooth(const EmpiricalMeasure& mu, int n_fejer) {
  if (n_fejer < 1) throw InvalidInput("fejer_smooth: N_fejer must be >= 1");
  return fejer_smooth(mu.modes_on(ModeLattice(mu.dim(), n_fejer - 1)), n_fejer);
}

}  // namespace chaosbench
