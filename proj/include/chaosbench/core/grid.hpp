#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/spectral_field.hpp"
#include "chaosbench/core/torus.hpp"

namespace chaosbench {

inline constexpr double tol_pos = 1e-8;

/// Default collocation grid size per axis: G = 4M+1.
inline int default_grid_size(const ModeLattice& lattice) { return 4 * lattice.cutoff() + 1; }

namespace detail {

// Dense separable transform between a (2M+1)^d coefficient tensor and a G^d
// grid. Sizes here are small (M <= 64), so a direct matrix per axis is
// cheaper to reason about than an FFT and exact to rounding.
class AxisTransform {
 public:
  AxisTransform(int cutoff, int grid) : cutoff_(cutoff), grid_(grid), side_(2 * cutoff + 1) {
    table_.resize(static_cast<std::size_t>(grid_) * static_cast<std::size_t>(side_));
    for (int g = 0; g < grid_; ++g)
      for (int k = 0; k < side_; ++k) {
        // reduce the integer phase first so large products stay exact
        const long long phase = (static_cast<long long>(k - cutoff_) * g) % grid_;
        const double a = two_pi * double(phase) / double(grid_);
        table_[static_cast<std::size_t>(g) * side_ + k] = cplx(std::cos(a), std::sin(a));
      }
  }

  int grid() const { return grid_; }
  int side() const { return side_; }
  // e^{+i 2 pi n g / G}
  const cplx& twiddle(int g, int k) const { return table_[static_cast<std::size_t>(g) * side_ + k]; }

 private:
  int cutoff_;
  int grid_;
  int side_;
  std::vector<cplx> table_;
};

// Apply along one axis of a row-major tensor. `forward` maps grid -> modes
// (with e^{-i...} and 1/G), otherwise modes -> grid.
inline std::vector<cplx> apply_axis(const std::vector<cplx>& in, const std::vector<int>& shape, int axis,
                                    const AxisTransform& tr, bool forward) {
  const int in_len = shape[static_cast<std::size_t>(axis)];
  const int out_len = forward ? tr.side() : tr.grid();
  std::size_t outer = 1, inner = 1;
  for (int j = 0; j < axis; ++j) outer *= static_cast<std::size_t>(shape[static_cast<std::size_t>(j)]);
  for (std::size_t j = static_cast<std::size_t>(axis) + 1; j < shape.size(); ++j)
    inner *= static_cast<std::size_t>(shape[j]);
  std::vector<cplx> out(outer * static_cast<std::size_t>(out_len) * inner);
  const double inv = 1.0 / double(tr.grid());
  for (std::size_t o = 0; o < outer; ++o) {
    for (int r = 0; r < out_len; ++r) {
      for (std::size_t i = 0; i < inner; ++i) {
        cplx acc{};
        for (int s = 0; s < in_len; ++s) {
          const cplx& v = in[(o * static_cast<std::size_t>(in_len) + static_cast<std::size_t>(s)) * inner + i];
          if (forward)
            acc += v * std::conj(tr.twiddle(s, r));
          else
            acc += v * tr.twiddle(r, s);
        }
        out[(o * static_cast<std::size_t>(out_len) + static_cast<std::size_t>(r)) * inner + i] =
            forward ? acc * inv : acc;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Pointwise inverse Fourier sums on the uniform grid x_g = g/G, complex
/// output, row-major with the first coordinate slowest.
inline std::vector<cplx> inverse_transform(const ModeLattice& lattice, std::span<const cplx> c,
                                           const detail::AxisTransform& tr) {
  const int grid = tr.grid();
  std::vector<cplx> data(c.begin(), c.end());
  std::vector<int> shape(static_cast<std::size_t>(lattice.dim()), lattice.side());
  for (int axis = 0; axis < lattice.dim(); ++axis) {
    data = detail::apply_axis(data, shape, axis, tr, false);
    shape[static_cast<std::size_t>(axis)] = grid;
  }
  return data;
}

inline std::vector<cplx> inverse_transform(const ModeLattice& lattice, std::span<const cplx> c, int grid) {
  return inverse_transform(lattice, c, detail::AxisTransform(lattice.cutoff(), grid));
}

/// Discrete projection of grid samples onto the lattice modes.
inline Modes forward_transform(const ModeLattice& lattice, std::span<const cplx> samples,
                               const detail::AxisTransform& tr) {
  const int grid = tr.grid();
  std::vector<cplx> data(samples.begin(), samples.end());
  std::vector<int> shape(static_cast<std::size_t>(lattice.dim()), grid);
  for (int axis = 0; axis < lattice.dim(); ++axis) {
    data = detail::apply_axis(data, shape, axis, tr, true);
    shape[static_cast<std::size_t>(axis)] = lattice.side();
  }
  return data;
}

inline Modes forward_transform(const ModeLattice& lattice, std::span<const cplx> samples, int grid) {
  return forward_transform(lattice, samples, detail::AxisTransform(lattice.cutoff(), grid));
}

inline Modes forward_transform(const ModeLattice& lattice, std::span<const double> samples, int grid) {
  std::vector<cplx> z(samples.begin(), samples.end());
  return forward_transform(lattice, std::span<const cplx>(z), grid);
}

/// Samples of a real field on the uniform G^d grid.
inline std::vector<double> evaluate_on_grid(const SpectralField& field, int grid) {
  const ModeLattice& lat = field.lattice();
  if (grid < 2 * lat.cutoff() + 1)
    throw AliasError("evaluate_on_grid: grid size " + std::to_string(grid) + " below 2M+1 = " +
                     std::to_string(2 * lat.cutoff() + 1));
  auto z = inverse_transform(lat, field.coeffs(), grid);
  double scale = 0.0;
  for (const auto& c : field.coeffs()) scale += std::abs(c);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (std::abs(z[i].imag()) > 1e-10 * std::max(1.0, scale))
      throw InvalidInput("evaluate_on_grid: imaginary residue above 1e-10");
    out[i] = z[i].real();
  }
  return out;
}

inline std::vector<double> evaluate_on_grid(const SpectralField& field) {
  return evaluate_on_grid(field, default_grid_size(field.lattice()));
}

/// Value of a real field at one point by direct summation.
inline double evaluate_at(const SpectralField& field, std::span<const double> x) {
  const ModeLattice& lat = field.lattice();
  double s = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    double phase = 0.0;
    for (int j = 0; j < lat.dim(); ++j) phase += lat.mode(i)[j] * x[static_cast<std::size_t>(j)];
    s += (field[i] * std::polar(1.0, two_pi * phase)).real();
  }
  return s;
}

inline double grid_minimum(const SpectralField& field, int grid) {
  auto v = evaluate_on_grid(field, grid);
  return *std::min_element(v.begin(), v.end());
}

/// Throws NonPositiveDensity if a density dips below -tol on the default grid.
inline void check_positivity(const SpectralField& field, double tol = tol_pos) {
  const double lo = grid_minimum(field, default_grid_size(field.lattice()));
  if (lo < -tol) throw NonPositiveDensity("density minimum " + std::to_string(lo) + " below -tol_pos");
}

/// Smallest grid size >= 3M+1 for alias-free quadratic products.
inline int dealiased_grid_size(int cutoff) { return 3 * cutoff + 1; }

/// Galerkin product of two real fields on a shared lattice, truncated to the
/// lattice. Fields whose second factor has few nonzero modes are convolved
/// directly; otherwise the product is formed on a zero-padded (3M+1)^d grid.
/// Both routes give the same exact projection.
class Convolver {
 public:
  /// With dealias = false every product goes through a (2M+1)^d grid and
  /// picks up aliasing errors; kept for comparison runs only.
  explicit Convolver(ModeLattice lattice, bool dealias = true)
      : lattice_(std::move(lattice)),
        transform_(lattice_.cutoff(), dealias ? dealiased_grid_size(lattice_.cutoff()) : 2 * lattice_.cutoff() + 1),
        dealias_(dealias) {
    // direct convolution costs nnz * L; the padded transforms roughly
    // 3 d G^d (2M+1) multiply-adds
    double grid_pts = 1.0;
    for (int j = 0; j < lattice_.dim(); ++j) grid_pts *= transform_.grid();
    const double pseudo_cost = 3.0 * lattice_.dim() * grid_pts * lattice_.side();
    threshold_ = static_cast<std::size_t>(pseudo_cost / double(lattice_.size()));
  }

  const ModeLattice& lattice() const { return lattice_; }

  Modes product(std::span<const cplx> a, std::span<const cplx> b) const {
    std::size_t nnz_a = 0, nnz_b = 0;
    for (const auto& z : a) nnz_a += (z != cplx{});
    for (const auto& z : b) nnz_b += (z != cplx{});
    if (dealias_ && std::min(nnz_a, nnz_b) <= threshold_)
      return nnz_b <= nnz_a ? sparse_product(a, b) : sparse_product(b, a);
    return pseudo_spectral_product(a, b);
  }

  Modes sparse_product(std::span<const cplx> a, std::span<const cplx> b) const {
    const std::size_t n = lattice_.size();
    const std::size_t zero = lattice_.zero_index();
    const int cutoff = lattice_.cutoff();
    Modes out(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (b[k] == cplx{}) continue;
      const Mode& mk = lattice_.mode(k);
      for (std::size_t i = 0; i < n; ++i) {
        const Mode& mi = lattice_.mode(i);
        bool inside = true;
        for (int j = 0; j < lattice_.dim(); ++j) {
          if (std::abs(mi[j] - mk[j]) > cutoff) {
            inside = false;
            break;
          }
        }
        // lexicographic indexing is additive inside the lattice
        if (inside) out[i] += a[i + zero - k] * b[k];
      }
    }
    return out;
  }

  Modes pseudo_spectral_product(std::span<const cplx> a, std::span<const cplx> b) const {
    auto fa = inverse_transform(lattice_, a, transform_);
    auto fb = inverse_transform(lattice_, b, transform_);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    return forward_transform(lattice_, std::span<const cplx>(fa), transform_);
  }

 private:
  ModeLattice lattice_;
  detail::AxisTransform transform_;
  bool dealias_ = true;
  std::size_t threshold_ = 0;
};

}  // namespace chaosbench
