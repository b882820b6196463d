#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "chaosbench/pde/solver.hpp"

namespace chaosbench {

/// Matrix of q -> L_m q on the zero-mass subspace of a d = 1 lattice, in the
/// real basis cos(2 pi n x), sin(2 pi n x), n = 1..M.
inline Eigen::MatrixXd linearized_galerkin_matrix(const DriftSpec& drift, const SpectralField& m) {
  const ModeLattice& lat = m.lattice();
  if (lat.dim() != 1) throw UnsupportedDimension("linearized_galerkin_matrix: d = 1 only");
  const int cut = lat.cutoff();
  const int dim = 2 * cut;
  const std::size_t z = lat.zero_index();
  Eigen::MatrixXd a(dim, dim);
  for (int n = 1; n <= cut; ++n)
    for (int part = 0; part < 2; ++part) {
      Modes c(lat.size());
      const cplx v = part == 0 ? cplx(0.5, 0.0) : cplx(0.0, -0.5);
      c[z + static_cast<std::size_t>(n)] = v;
      c[z - static_cast<std::size_t>(n)] = std::conj(v);
      const SpectralField q = apply_linearized(drift, m, SpectralField(lat, c, FieldKind::signed_distribution));
      const int col = 2 * (n - 1) + part;
      for (int k = 1; k <= cut; ++k) {
        a(2 * (k - 1), col) = 2.0 * q[z + static_cast<std::size_t>(k)].real();
        a(2 * (k - 1) + 1, col) = -2.0 * q[z + static_cast<std::size_t>(k)].imag();
      }
    }
  return a;
}

struct DenseSpectrum {
  std::vector<double> real_parts;  // ascending
  double max_imag = 0.0;
};

inline DenseSpectrum dense_linearized_spectrum(const DriftSpec& drift, const SpectralField& m) {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(linearized_galerkin_matrix(drift, m), false);
  DenseSpectrum out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    out.real_parts.push_back(es.eigenvalues()[k].real());
    out.max_imag = std::max(out.max_imag, std::abs(es.eigenvalues()[k].imag()));
  }
  std::sort(out.real_parts.begin(), out.real_parts.end());
  return out;
}

}  // namespace chaosbench
