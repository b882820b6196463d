#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/lattice.hpp"
#include "chaosbench/drift/potential.hpp"

namespace chaosbench {

struct UniformSpectrum {
  ModeLattice lattice;
  std::vector<double> eigenvalues;  // per lattice mode; 0 at the zero mode
  double spectral_gap = 0.0;
  Mode slowest_mode{};
};

/// Eigenvalues -2 pi^2 |n|^2 (1 + 2 kappa W(n)) of the linearisation at the
/// uniform measure, which is diagonal in Fourier for convolution drifts.
inline UniformSpectrum uniform_linearization_spectrum(const PotentialSpec& potential, double kappa, const ModeLattice& lattice) {
  if (potential.dim() != lattice.dim()) throw InvalidInput("uniform_linearization_spectrum: dimension mismatch");
  UniformSpectrum out{lattice, std::vector<double>(lattice.size(), 0.0), std::numeric_limits<double>::infinity(), {}};
  const double c = 2.0 * std::numbers::pi * std::numbers::pi;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (i == lattice.zero_index()) continue;
    const double ev = -c * lattice.norm_sq(i) * (1.0 + 2.0 * kappa * potential.at(lattice.mode(i)));
    out.eigenvalues[i] = ev;
    if (-ev < out.spectral_gap) {
      out.spectral_gap = -ev;
      out.slowest_mode = lattice.mode(i);
    }
  }
  if (lattice.size() == 1) out.spectral_gap = 0.0;
  return out;
}

}  // namespace chaosbench
