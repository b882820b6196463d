#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "chaosbench/core/error.hpp"

namespace chaosbench {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduce a real coordinate into [0,1).
inline double wrap_coordinate(double x) {
  double r = x - std::floor(x);
  // x - floor(x) can round up to exactly 1 for tiny negative x
  return r >= 1.0 ? 0.0 : r;
}

/// A point on the d-dimensional unit torus, coordinates in [0,1).
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> coords) : coords_(std::move(coords)) {}

  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int j) const { return coords_[static_cast<std::size_t>(j)]; }
  std::span<const double> coords() const { return coords_; }

 private:
  std::vector<double> coords_;
};

inline TorusPoint wrap(std::span<const double> raw) {
  std::vector<double> out(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    if (!std::isfinite(raw[j])) throw InvalidInput("wrap: non-finite coordinate");
    out[j] = wrap_coordinate(raw[j]);
  }
  return TorusPoint(std::move(out));
}

inline TorusPoint wrap(std::initializer_list<double> raw) {
  std::vector<double> v(raw);
  return wrap(std::span<const double>(v));
}

/// Euclidean aggregate of the per-axis circular distances; at most sqrt(d)/2.
inline double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim() != b.dim()) throw InvalidInput("torus_distance: dimension mismatch");
  double s = 0.0;
  for (int j = 0; j < a.dim(); ++j) {
    double diff = std::abs(a[j] - b[j]);
    diff = std::min(diff, 1.0 - diff);
    s += diff * diff;
  }
  return std::sqrt(s);
}

}  // namespace chaosbench
