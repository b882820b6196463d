#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/io.hpp"
#include "chaosbench/core/stats.hpp"

namespace chaosbench {

struct ErrorRow {
  std::size_t n = 0;
  double t = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double pde_reference = 0.0;
  double abs_error = 0.0;
  std::size_t replicas = 0;
  bool underpowered = false;  // std_error above the requested precision
};

inline ErrorRow make_row(std::size_t n, double t, const MeanEstimate& est, double reference) {
  return ErrorRow{n, t, est.mean, est.std_error, reference, std::abs(est.mean - reference), est.n, false};
}

struct ErrorTable {
  std::vector<ErrorRow> rows;

  ErrorTable at_time(double t) const {
    ErrorTable out;
    for (const auto& r : rows)
      if (std::abs(r.t - t) <= 1e-9 * std::max(1.0, t)) out.rows.push_back(r);
    return out;
  }
  ErrorTable at_n(std::size_t n) const {
    ErrorTable out;
    for (const auto& r : rows)
      if (r.n == n) out.rows.push_back(r);
    return out;
  }
  const ErrorRow& row(std::size_t n, double t) const {
    for (const auto& r : rows)
      if (r.n == n && std::abs(r.t - t) <= 1e-9 * std::max(1.0, t)) return r;
    throw InvalidInput("ErrorTable: no row for N = " + std::to_string(n) + ", t = " + format_real(t));
  }
};

enum class FitAxis { n, t };

/// axis n: log|err| against log N, slope is the power.
/// axis t: log|err| against t, slope is minus the rate.
inline FitResult rate_fit(std::span<const double> axis, std::span<const double> err, FitAxis kind) {
  if (axis.size() != err.size()) throw InvalidInput("rate_fit: axis and error lengths differ");
  if (axis.size() < 4) throw InvalidInput("rate_fit: need at least 4 rows on the axis");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!(err[i] > 0.0) || !std::isfinite(err[i])) throw InvalidInput("rate_fit: errors must be positive and finite");
    if (kind == FitAxis::n && !(axis[i] > 0.0)) throw InvalidInput("rate_fit: N must be positive");
    x.push_back(kind == FitAxis::n ? std::log(axis[i]) : axis[i]);
    y.push_back(std::log(err[i]));
  }
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); }))
    throw InvalidInput("rate_fit: all axis values coincide");
  return linear_fit(x, y);
}

inline FitResult rate_fit(const ErrorTable& table, FitAxis kind) {
  std::vector<double> a, e;
  for (const auto& r : table.rows) {
    a.push_back(kind == FitAxis::n ? double(r.n) : r.t);
    e.push_back(r.abs_error);
  }
  return rate_fit(a, e, kind);
}

inline std::string errors_csv(const ErrorTable& table) {
  std::string out = "N,t,estimate,std_error,pde_reference,abs_error,replicas,underpowered\n";
  for (const auto& r : table.rows) {
    out += std::to_string(r.n) + ',' + format_real(r.t) + ',' + format_real(r.estimate) + ',' + format_real(r.std_error) +
           ',' + format_real(r.pde_reference) + ',' + format_real(r.abs_error) + ',' + std::to_string(r.replicas) + ',' +
           (r.underpowered ? "1" : "0") + '\n';
  }
  return out;
}

inline json to_json(const FitResult& f) {
  return json{{"slope", f.slope},     {"intercept", f.intercept},       {"r2", f.r2},
              {"ci_half_width", f.ci_half_width}, {"slope_std_error", f.slope_std_error}, {"points", f.points}};
}

inline json to_json(const DecayFit& f) {
  return json{{"lambda", f.lambda}, {"c", f.c}, {"r2", f.r2}, {"ci_half_width", f.ci_half_width}, {"points", f.points}};
}

}  // namespace chaosbench
