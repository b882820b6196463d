#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "chaosbench/core/error.hpp"

namespace chaosbench {

/// Ordinary least squares y = intercept + slope x.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double ci_half_width = 0.0;  // 95% on the slope
  double slope_std_error = 0.0;
  std::size_t points = 0;

  bool ci_contains(double v) const { return std::abs(v - slope) <= ci_half_width; }
};

inline FitResult linear_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw InvalidInput("linear_fit: x and y differ in length");
  if (n < 2) throw InvalidInput("linear_fit: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidInput("linear_fit: non-finite data");
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidInput("linear_fit: all x values coincide");
  FitResult f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  f.r2 = syy > 0.0 ? std::max(0.0, 1.0 - sse / syy) : 1.0;
  if (n > 2) {
    f.slope_std_error = std::sqrt(sse / double(n - 2) / sxx);
    const boost::math::students_t dist(double(n - 2));
    f.ci_half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * f.slope_std_error;
  }
  return f;
}

/// Exponential decay fit value ~ C exp(-lambda t).
struct DecayFit {
  double lambda = 0.0;
  double c = 0.0;
  double r2 = 0.0;
  double ci_half_width = 0.0;
  std::size_t points = 0;
};

/// Least squares on (t, log value) over points with t_min <= t <= t_max.
/// Points below `floor` are dropped first: they sit at the solver's
/// resolution limit (rounding or time-discretisation bias), not on the decay.
inline DecayFit decay_rate_fit(std::span<const double> t, std::span<const double> v, double t_min,
                               double t_max = std::numeric_limits<double>::infinity(), double floor = 0.0) {
  if (t.size() != v.size()) throw InvalidInput("decay_rate_fit: t and values differ in length");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (!(v[i] > 0.0)) {
      if (floor > 0.0) continue;
      throw InvalidInput("decay_rate_fit: nonpositive value");
    }
    if (v[i] < floor) continue;
    x.push_back(t[i]);
    y.push_back(std::log(v[i]));
  }
  if (x.size() < 5) throw InvalidInput("decay_rate_fit: need at least 5 points in the window");
  const FitResult f = linear_fit(x, y);
  return {-f.slope, std::exp(f.intercept), f.r2, f.ci_half_width, f.points};
}

/// Mean and standard error of a sample.
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;
  std::size_t n = 0;
};

inline MeanEstimate mean_estimate(std::span<const double> xs) {
  MeanEstimate e;
  e.n = xs.size();
  if (xs.empty()) return e;
  // two-pass for accuracy
  double m = 0.0;
  for (double x : xs) m += x;
  m /= double(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  e.mean = m;
  e.variance = xs.size() > 1 ? ss / double(xs.size() - 1) : 0.0;
  e.std_error = std::sqrt(e.variance / double(xs.size()));
  return e;
}

inline double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

}  // namespace chaosbench
