#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "chaosbench/core/empirical.hpp"
#include "chaosbench/core/error.hpp"
#include "chaosbench/core/grid.hpp"
#include "chaosbench/core/spectral_field.hpp"
#include "chaosbench/particles/philox.hpp"

namespace chaosbench {

namespace detail {

// Distribution function of a one-dimensional density given by its modes:
// F(x) = x + 2 Re sum_{n>=1} c_n (e^{i 2 pi n x} - 1) / (i 2 pi n).
class CdfInverter {
 public:
  explicit CdfInverter(const SpectralField& density) {
    const ModeLattice& lat = density.lattice();
    const int m = lat.cutoff();
    for (int n = 1; n <= m; ++n) c_.push_back(density.at(n));
    grid_ = std::max(4 * m + 1, 1024);
    const double lo = grid_minimum(density, grid_);
    if (!(lo > 0.0)) throw NonPositiveDensity("sample_initial: density minimum " + std::to_string(lo) + " is not positive");
    table_.resize(static_cast<std::size_t>(grid_) + 1);
    for (int k = 0; k <= grid_; ++k) table_[static_cast<std::size_t>(k)] = cdf(double(k) / grid_);
    table_.back() = 1.0;
  }

  double cdf(double x) const {
    double acc = x;
    const cplx e = std::polar(1.0, two_pi * x);
    cplx p = e;
    for (std::size_t n = 0; n < c_.size(); ++n) {
      const double k = double(n + 1);
      acc += 2.0 * (c_[n] * (p - 1.0) / cplx(0.0, two_pi * k)).real();
      p *= e;
    }
    return acc;
  }

  double density(double x) const {
    double acc = 1.0;
    const cplx e = std::polar(1.0, two_pi * x);
    cplx p = e;
    for (const auto& c : c_) {
      acc += 2.0 * (c * p).real();
      p *= e;
    }
    return acc;
  }

  // Bracket from the node table, then safeguarded Newton on the exact F.
  double invert(double u) const {
    if (c_.empty()) return u;
    const auto it = std::upper_bound(table_.begin(), table_.end(), u);
    const std::size_t k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - table_.begin(), 1, grid_)) - 1;
    double a = double(k) / grid_, b = double(k + 1) / grid_;
    const double fa = table_[k], fb = table_[k + 1];
    double x = fb > fa ? a + (u - fa) / (fb - fa) * (b - a) : 0.5 * (a + b);
    for (int it_n = 0; it_n < 60; ++it_n) {
      const double r = cdf(x) - u;
      if (r > 0.0) b = x; else a = x;
      if (std::abs(r) <= 1e-15) break;
      double next = x - r / density(x);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (next == x) break;
      x = next;
    }
    return wrap_coordinate(x);
  }

 private:
  std::vector<cplx> c_;
  int grid_ = 0;
  std::vector<double> table_;
};

inline double coefficient_l1(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs()) s += std::abs(c);
  return s;
}

}  // namespace detail

/// N i.i.d. draws from a density, flat (N*d values). Particle i only uses
/// random numbers addressed by (seed, replica, i), so the first N draws are
/// shared across particle counts. d = 1 inverts the distribution function
/// exactly; d >= 2 uses rejection against the bound sum |c_n| >= max density.
inline std::vector<double> sample_positions(const SpectralField& mu0, std::size_t n, std::uint64_t seed,
                                            std::uint32_t replica) {
  if (mu0.kind() != FieldKind::density) throw InvalidInput("sample_initial: initial law must be a density");
  if (n == 0) throw InvalidInput("sample_initial: need N >= 1");
  const int d = mu0.dim();
  if (d > 3) throw UnsupportedDimension("sample_initial: d > 3");
  std::vector<double> x(n * static_cast<std::size_t>(d));
  if (d == 1) {
    const detail::CdfInverter inv(mu0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto u = philox_uniform2(seed, {static_cast<std::uint32_t>(i), 0, replica,
                                            static_cast<std::uint32_t>(RngStream::initial)});
      x[i] = inv.invert(u[0]);
    }
    return x;
  }
  const int grid = std::max(default_grid_size(mu0.lattice()), 16);
  const double lo = grid_minimum(mu0, grid);
  if (!(lo > 0.0)) throw NonPositiveDensity("sample_initial: density minimum " + std::to_string(lo) + " is not positive");
  const double bound = detail::coefficient_l1(mu0);
  std::vector<double> u(4), p(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t attempt = 0;; ++attempt) {
      const std::uint32_t tag = static_cast<std::uint32_t>(RngStream::rejection);
      const auto a = philox_uniform2(seed, {static_cast<std::uint32_t>(i), attempt, replica, tag});
      const auto b = philox_uniform2(seed, {static_cast<std::uint32_t>(i), attempt, replica, tag | 0x100u});
      u = {a[0], a[1], b[0], b[1]};
      for (int j = 0; j < d; ++j) p[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>(j)];
      if (u[static_cast<std::size_t>(d)] * bound <= evaluate_at(mu0, p)) break;
      if (attempt == 0xFFFFFFFFu) throw InvalidInput("sample_initial: rejection sampler did not accept");
    }
    std::copy(p.begin(), p.end(), x.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(d)));
  }
  return x;
}

inline EmpiricalMeasure sample_initial(const SpectralField& mu0, std::size_t n, std::uint64_t seed, std::uint32_t replica,
                                       int cache_cutoff = 1) {
  return EmpiricalMeasure(mu0.dim(), sample_positions(mu0, n, seed, replica), cache_cutoff);
}

}  // namespace chaosbench
