#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/spectral_field.hpp"
#include "chaosbench/core/torus.hpp"

namespace chaosbench {

namespace detail {

// Fixed-point accumulation makes mode sums independent of particle order:
// integer addition is associative, floating-point addition is not. Each
// summand lies in [-1,1] and is truncated to a multiple of 2^-60, far below
// double rounding.
class ExactSum {
 public:
  static constexpr double scale = 1152921504606846976.0;  // 2^60

  void add(double v) { acc_ += static_cast<long long>(v * scale); }
  double mean(std::size_t n) const { return static_cast<double>(acc_) / scale / double(n); }

 private:
  __int128 acc_ = 0;
};

// Fill powers[k + M] = exp(-i 2 pi k x) for k = -M..M.
inline void fill_phase_powers(double x, int cutoff, std::span<cplx> powers) {
  const cplx base = std::polar(1.0, -two_pi * x);
  powers[static_cast<std::size_t>(cutoff)] = 1.0;
  cplx p = 1.0;
  for (int k = 1; k <= cutoff; ++k) {
    // refresh from sincos periodically to bound the recurrence drift
    p = (k % 16 == 0) ? std::polar(1.0, -two_pi * k * x) : p * base;
    powers[static_cast<std::size_t>(cutoff + k)] = p;
    powers[static_cast<std::size_t>(cutoff - k)] = std::conj(p);
  }
}

}  // namespace detail

/// coeff(n) = (1/N) sum_i exp(-i 2 pi n.x_i) for particle positions stored
/// flat (N*d values). Exactly permutation invariant.
inline SpectralField fourier_modes_of_empirical(std::span<const double> positions, int dim,
                                                const ModeLattice& lattice) {
  if (dim != lattice.dim()) throw InvalidInput("fourier_modes_of_empirical: dimension mismatch");
  if (positions.empty()) throw InvalidInput("fourier_modes_of_empirical: empty particle list");
  const std::size_t n_particles = positions.size() / static_cast<std::size_t>(dim);
  const int cutoff = lattice.cutoff();
  const std::size_t side = static_cast<std::size_t>(lattice.side());
  const std::size_t half = lattice.size() / 2 + 1;  // modes up to and including zero
  std::vector<detail::ExactSum> re(half), im(half);
  std::vector<cplx> powers(side * static_cast<std::size_t>(dim));
  for (std::size_t p = 0; p < n_particles; ++p) {
    for (int j = 0; j < dim; ++j)
      detail::fill_phase_powers(positions[p * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)],
                                cutoff, std::span<cplx>(powers).subspan(static_cast<std::size_t>(j) * side, side));
    for (std::size_t i = 0; i < half; ++i) {
      const Mode& n = lattice.mode(i);
      cplx v = powers[static_cast<std::size_t>(n[0] + cutoff)];
      for (int j = 1; j < dim; ++j) v *= powers[static_cast<std::size_t>(j) * side + static_cast<std::size_t>(n[j] + cutoff)];
      re[i].add(v.real());
      im[i].add(v.imag());
    }
  }
  Modes c(lattice.size());
  for (std::size_t i = 0; i < half; ++i) {
    c[i] = cplx(re[i].mean(n_particles), im[i].mean(n_particles));
    c[lattice.negated(i)] = std::conj(c[i]);
  }
  c[lattice.zero_index()] = 1.0;
  return SpectralField(lattice, std::move(c), FieldKind::density);
}

/// N particles on the torus with their low-order Fourier modes cached.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(int dim, std::vector<double> positions, const ModeLattice& cache_lattice)
      : dim_(dim), positions_(std::move(positions)) {
    if (positions_.empty() || positions_.size() % static_cast<std::size_t>(dim) != 0)
      throw InvalidInput("EmpiricalMeasure: need N >= 1 complete particles");
    for (auto& x : positions_) {
      if (!std::isfinite(x)) throw InvalidInput("EmpiricalMeasure: non-finite coordinate");
      x = wrap_coordinate(x);
    }
    modes_ = fourier_modes_of_empirical(positions_, dim_, cache_lattice);
  }

  EmpiricalMeasure(int dim, std::vector<double> positions, int cache_cutoff)
      : EmpiricalMeasure(dim, std::move(positions), ModeLattice(dim, cache_cutoff)) {}

  int dim() const { return dim_; }
  std::size_t size() const { return positions_.size() / static_cast<std::size_t>(dim_); }
  std::span<const double> positions() const { return positions_; }
  TorusPoint particle(std::size_t i) const {
    auto b = positions_.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(dim_));
    return TorusPoint(std::vector<double>(b, b + dim_));
  }
  const SpectralField& cached_modes() const { return modes_; }

  /// Modes on another lattice, reusing the cache when it suffices.
  SpectralField modes_on(const ModeLattice& lattice) const {
    if (lattice == modes_.lattice()) return modes_;
    if (lattice.cutoff() <= modes_.lattice().cutoff()) return embed(modes_, lattice);
    return fourier_modes_of_empirical(positions_, dim_, lattice);
  }

 private:
  int dim_;
  std::vector<double> positions_;
  SpectralField modes_;
};

}  // namespace chaosbench
