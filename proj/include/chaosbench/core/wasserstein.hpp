#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "chaosbench/core/empirical.hpp"
#include "chaosbench/core/error.hpp"
#include "chaosbench/core/spectral_field.hpp"

namespace chaosbench {

// W1 on the circle equals min_c \int_0^1 |F(x) - G(x) - c| dx for the two
// cumulative distribution functions (cut at 0). The inner minimum is a
// weighted median of F - G. When both inputs are empirical, F - G is
// piecewise constant on the merged breakpoints and the result is exact.
// Spectral inputs add a uniform breakpoint grid and use the midpoint rule.

inline constexpr int wasserstein_grid = 8192;

namespace detail {

class CircleCdf {
 public:
  explicit CircleCdf(const EmpiricalMeasure& mu) {
    if (mu.dim() != 1) throw UnsupportedDimension("wasserstein1_1d: only d = 1");
    sorted_.assign(mu.positions().begin(), mu.positions().end());
    std::sort(sorted_.begin(), sorted_.end());
  }

  explicit CircleCdf(const SpectralField& f) : field_(&f) {
    if (f.dim() != 1) throw UnsupportedDimension("wasserstein1_1d: only d = 1");
  }

  bool empirical() const { return field_ == nullptr; }
  const std::vector<double>& atoms() const { return sorted_; }

  // F(x) = mu([0, x]) for empirical measures (right-continuous);
  // x + sum_{n != 0} c_n (e^{i2pi n x} - 1)/(i 2 pi n) for spectral ones.
  double operator()(double x) const {
    if (empirical()) {
      auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
      return double(it - sorted_.begin()) / double(sorted_.size());
    }
    const ModeLattice& lat = field_->lattice();
    double s = x * (*field_)[lat.zero_index()].real();
    for (int n = 1; n <= lat.cutoff(); ++n) {
      const cplx c = field_->at(n);
      const cplx e = std::polar(1.0, two_pi * n * x) - 1.0;
      // the n and -n terms are conjugate
      s += 2.0 * (c * e / cplx(0.0, two_pi * n)).real();
    }
    return s;
  }

 private:
  const SpectralField* field_ = nullptr;
  std::vector<double> sorted_;
};

inline double weighted_median_deviation(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (const auto& p : pts) total += p.second;
  double acc = 0.0;
  double median = pts.empty() ? 0.0 : pts.back().first;
  for (const auto& p : pts) {
    acc += p.second;
    if (acc >= 0.5 * total) {
      median = p.first;
      break;
    }
  }
  double s = 0.0;
  for (const auto& p : pts) s += p.second * std::abs(p.first - median);
  return s;
}

inline double circle_w1(const CircleCdf& a, const CircleCdf& b) {
  std::vector<double> cuts{0.0, 1.0};
  auto add_atoms = [&](const CircleCdf& m) {
    if (m.empirical())
      cuts.insert(cuts.end(), m.atoms().begin(), m.atoms().end());
    else
      for (int k = 1; k < wasserstein_grid; ++k) cuts.push_back(double(k) / wasserstein_grid);
  };
  add_atoms(a);
  add_atoms(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<std::pair<double, double>> pts;
  pts.reserve(cuts.size());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    const double mid = 0.5 * (lo + hi);
    pts.emplace_back(a(mid) - b(mid), hi - lo);
  }
  return weighted_median_deviation(std::move(pts));
}

}  // namespace detail

inline double wasserstein1_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  return detail::circle_w1(detail::CircleCdf(a), detail::CircleCdf(b));
}
inline double wasserstein1_1d(const SpectralField& a, const SpectralField& b) {
  return detail::circle_w1(detail::CircleCdf(a), detail::CircleCdf(b));
}
inline double wasserstein1_1d(const SpectralField& a, const EmpiricalMeasure& b) {
  return detail::circle_w1(detail::CircleCdf(a), detail::CircleCdf(b));
}
inline double wasserstein1_1d(const EmpiricalMeasure& a, const SpectralField& b) {
  return detail::circle_w1(detail::CircleCdf(a), detail::CircleCdf(b));
}

}  // namespace chaosbench
