#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "chaosbench/core/spectral_field.hpp"
#include "chaosbench/drift/drift.hpp"
#include "chaosbench/drift/potential.hpp"

namespace chaosbench::presets {

/// -kappa grad W * mu with W(x) = 2 w1 cos(2 pi x), so W-hat(+-1) = w1.
inline DriftSpec h_stable(double w1 = 0.25, double kappa = 1.0) {
  return ConvolutionGradient{PotentialSpec::cosine_series({w1}), kappa};
}

inline DriftSpec heat() { return ConvolutionGradient{PotentialSpec::cosine_series({0.0}), 0.0}; }

inline DriftSpec kuramoto(double kappa) { return Kuramoto{kappa}; }

/// Double-well confinement b0 = -V', V(x) = depth cos(4 pi x), plus
/// eps \int cos(2 pi (x - y)) mu(dy). The wells sit at x = 1/4 and 3/4; the
/// odd modes carry the slow hopping between them.
inline DriftSpec double_well(double eps = 0.05, double depth = 1.0) {
  const ModeLattice lat(1, 2);
  const std::size_t l = lat.size(), z = lat.zero_index();
  Modes b0(l);
  b0[z + 2] = cplx(0.0, -2.0 * std::numbers::pi * depth);
  b0[z - 2] = cplx(0.0, 2.0 * std::numbers::pi * depth);
  std::vector<cplx> k(l * l);
  k[(z + 1) * l + (z + 1)] = 0.5;
  k[(z - 1) * l + (z - 1)] = 0.5;
  return SmallMeanField{lat, {b0}, {k}, eps};
}

/// Density with the given coefficients c_1, c_2, ... (c_{-n} = conj c_n).
inline SpectralField trig_density(int cutoff, const std::vector<cplx>& c_pos) {
  const ModeLattice lat(1, cutoff);
  Modes m(lat.size());
  const std::size_t z = lat.zero_index();
  m[z] = 1.0;
  for (std::size_t n = 1; n <= c_pos.size() && n <= static_cast<std::size_t>(cutoff); ++n) {
    m[z + n] = c_pos[n - 1];
    m[z - n] = std::conj(c_pos[n - 1]);
  }
  return SpectralField(lat, std::move(m), FieldKind::density);
}

/// 1 + a cos(2 pi x).
inline SpectralField cosine_density(int cutoff, double a) { return trig_density(cutoff, {cplx(a / 2.0, 0.0)}); }

/// A density with |c_1| = 0.25 and a sine second harmonic; lies in Q_0.2.
inline SpectralField synchronised_start(int cutoff = 32) {
  return trig_density(cutoff, {cplx(0.25, 0.0), cplx(0.0, -0.1)});
}

}  // namespace chaosbench::presets
