#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/lattice.hpp"

namespace chaosbench {

using cplx = std::complex<double>;

/// Raw coefficient vector in lattice enumeration order.
using Modes = std::vector<cplx>;

enum class FieldKind { density, signed_distribution };

inline const char* to_string(FieldKind k) {
  return k == FieldKind::density ? "density" : "signed-distribution";
}

namespace detail {

inline double coefficient_scale(std::span<const cplx> c) {
  double s = 0.0;
  for (const auto& z : c) s = std::max(s, std::abs(z));
  return std::max(s, 1.0);
}

}  // namespace detail

/// Project a coefficient vector onto the conjugate-symmetric subspace in place.
inline void symmetrize(const ModeLattice& lattice, Modes& c) {
  const std::size_t n = lattice.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = lattice.negated(i);
    const cplx avg = 0.5 * (c[i] + std::conj(c[j]));
    c[i] = avg;
    c[j] = std::conj(avg);
  }
  c[lattice.zero_index()] = cplx(c[lattice.zero_index()].real(), 0.0);
}

/// Largest violation of c(-n) = conj(c(n)).
inline double symmetry_defect(const ModeLattice& lattice, std::span<const cplx> c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    worst = std::max(worst, std::abs(c[lattice.negated(i)] - std::conj(c[i])));
  return worst;
}

/// Fourier coefficients of a real distribution on the torus.
///
/// coeff(n) = \int exp(-i 2 pi n.x) f(dx). Construction checks conjugate
/// symmetry (and unit mass for densities) and then enforces both exactly.
/// Grid positivity of densities is checked separately by check_positivity()
/// in grid.hpp since it needs a transform.
class SpectralField {
 public:
  SpectralField() = default;

  SpectralField(ModeLattice lattice, Modes coeffs, FieldKind kind, double sym_tol = 1e-9)
      : lattice_(std::move(lattice)), coeffs_(std::move(coeffs)), kind_(kind) {
    if (coeffs_.size() != lattice_.size())
      throw InvalidInput("SpectralField: coefficient count " + std::to_string(coeffs_.size()) +
                         " does not match lattice size " + std::to_string(lattice_.size()));
    for (const auto& z : coeffs_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidInput("SpectralField: non-finite coefficient");
    const double scale = detail::coefficient_scale(coeffs_);
    if (symmetry_defect(lattice_, coeffs_) > sym_tol * scale)
      throw InvalidInput("SpectralField: coefficients are not conjugate symmetric (real field expected)");
    symmetrize(lattice_, coeffs_);
    cplx& c0 = coeffs_[lattice_.zero_index()];
    if (kind_ == FieldKind::density) {
      if (std::abs(c0 - 1.0) > 1e-9) throw InvalidInput("SpectralField: density must have coeff(0) = 1");
      c0 = 1.0;
    }
  }

  static SpectralField uniform(const ModeLattice& lattice) {
    Modes c(lattice.size());
    c[lattice.zero_index()] = 1.0;
    return SpectralField(lattice, std::move(c), FieldKind::density);
  }

  static SpectralField zero(const ModeLattice& lattice) {
    return SpectralField(lattice, Modes(lattice.size()), FieldKind::signed_distribution);
  }

  const ModeLattice& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }
  FieldKind kind() const { return kind_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  const Modes& modes() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  const cplx& operator[](std::size_t i) const { return coeffs_[i]; }

  /// Coefficient of an arbitrary mode, zero outside the lattice.
  cplx at(const Mode& n) const {
    auto idx = lattice_.find(n);
    return idx ? coeffs_[*idx] : cplx{};
  }
  cplx at(int n1) const { return at(Mode{n1, 0, 0}); }

 private:
  ModeLattice lattice_;
  Modes coeffs_;
  FieldKind kind_ = FieldKind::signed_distribution;
};

/// Copy coefficients onto another lattice of the same dimension, truncating or
/// zero-padding.
inline Modes embed(const ModeLattice& from, std::span<const cplx> c, const ModeLattice& to) {
  if (from.dim() != to.dim()) throw InvalidInput("embed: dimension mismatch");
  Modes out(to.size());
  if (from == to) {
    std::copy(c.begin(), c.end(), out.begin());
    return out;
  }
  for (std::size_t i = 0; i < to.size(); ++i) {
    if (auto k = from.find(to.mode(i))) out[i] = c[*k];
  }
  return out;
}

inline SpectralField embed(const SpectralField& f, const ModeLattice& to) {
  return SpectralField(to, embed(f.lattice(), f.coeffs(), to), f.kind());
}

/// Signed difference a - b on a shared lattice.
inline SpectralField difference(const SpectralField& a, const SpectralField& b) {
  if (!(a.lattice() == b.lattice())) throw InvalidInput("difference: lattice mismatch");
  Modes c(a.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] - b[i];
  return SpectralField(a.lattice(), std::move(c), FieldKind::signed_distribution);
}

/// Pairing <f, q> = \int f dq for a real function f and a real distribution q,
/// both given by coefficients on the same lattice.
inline double pairing(std::span<const cplx> f, std::span<const cplx> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += (f[i] * std::conj(q[i])).real();
  return s;
}

}  // namespace chaosbench
