#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/fejer.hpp"
#include "chaosbench/core/grid.hpp"
#include "chaosbench/functionals/functional.hpp"

namespace chaosbench {

/// Normalised bump rho(u) ~ exp(-1/(1-u^2)) on [-1,1] with a tabulated
/// inverse CDF.
class BumpDistribution {
 public:
  explicit BumpDistribution(int table = 8192) : cdf_(static_cast<std::size_t>(table) + 1) {
    // trapezoid on a function that vanishes to all orders at both ends
    const double h = 2.0 / table;
    cdf_[0] = 0.0;
    for (int k = 1; k <= table; ++k) cdf_[static_cast<std::size_t>(k)] = cdf_[static_cast<std::size_t>(k - 1)] + 0.5 * h * (density_unnormalised(-1.0 + (k - 1) * h) + density_unnormalised(-1.0 + k * h));
    norm_ = cdf_.back();
    for (auto& c : cdf_) c /= norm_;
  }

  static double density_unnormalised(double u) {
    const double r = 1.0 - u * u;
    return r <= 0.0 ? 0.0 : std::exp(-1.0 / r);
  }
  double density(double u) const { return density_unnormalised(u) / norm_; }

  /// Quantile in [-1, 1] for p in [0, 1], linear between table points.
  double quantile(double p) const {
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
    if (it == cdf_.begin()) return -1.0;
    if (it == cdf_.end()) return 1.0;
    const std::size_t k = static_cast<std::size_t>(it - cdf_.begin());
    const double h = 2.0 / double(cdf_.size() - 1);
    const double lo = cdf_[k - 1], hi = cdf_[k];
    const double frac = hi > lo ? (p - lo) / (hi - lo) : 0.5;
    return -1.0 + (double(k - 1) + frac) * h;
  }

 private:
  std::vector<double> cdf_;
  double norm_ = 1.0;
};

namespace detail {

inline std::vector<int> first_primes(std::size_t count) {
  std::vector<int> out;
  for (int n = 2; out.size() < count; ++n) {
    bool prime = true;
    for (int p : out) {
      if (p * p > n) break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back(n);
  }
  return out;
}

}  // namespace detail

/// Mollified functional
///
///   Phi_{N,eps}(mu) = E Phi( eps Leb + (1-eps)(Fejer_N(mu) - Fejer_N(Y)) )
///
/// where Y has i.i.d. real coordinates Y^n, n != 0, max|n_j| <= N-1, each with
/// the bump density scaled to [-(eps ^ eta)/2, (eps ^ eta)/2] and Fejer_N(Y)
/// means the real part of the Fejer sum built from Y. eta = eps/((1-eps)(N^d-1))
/// keeps every perturbed density above eps/2. The expectation is taken by a
/// Kronecker (rank-1 lattice) quasi-Monte-Carlo rule, so derivatives below are
/// exact derivatives of the discretised functional.
class Mollified final : public Functional {
 public:
  Mollified(FunctionalPtr inner, int n_moll, double eps, int points = 1024)
      : inner_(std::move(inner)), n_(n_moll), eps_(eps) {
    if (!inner_) throw InvalidInput("mollify: null inner functional");
    if (n_ < 2) throw InvalidInput("mollify: N_moll must be >= 2");
    if (!(eps_ > 0.0 && eps_ < 0.5)) throw InvalidInput("mollify: eps_moll must lie in (0, 1/2)");
    if (points < 1) throw InvalidInput("mollify: need at least one quadrature point");
    const ModeLattice& lat = inner_->lattice();
    if (lat.cutoff() < n_ - 1) throw InvalidInput("mollify: inner lattice cutoff below N_moll - 1");
    const int d = lat.dim();
    eta_ = eps_ / ((1.0 - eps_) * (std::pow(double(n_), d) - 1.0));
    radius_ = 0.5 * std::min(eps_, eta_);

    weight_.resize(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) weight_[i] = (1.0 - eps_) * fejer_weight(lat.mode(i), d, n_);
    weight_[lat.zero_index()] = 0.0;

    // free coordinates: every n != 0 with max |n_j| <= N-1
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < lat.size(); ++i)
      if (i != lat.zero_index() && lat.max_abs(i) <= n_ - 1) free.push_back(i);
    const auto primes = detail::first_primes(free.size());
    const BumpDistribution bump;
    shifts_.assign(static_cast<std::size_t>(points), Modes(lat.size()));
    for (int j = 0; j < points; ++j) {
      std::vector<double> y(lat.size(), 0.0);
      for (std::size_t k = 0; k < free.size(); ++k) {
        const double alpha = std::sqrt(double(primes[k]));
        double u = (j + 0.5) * (alpha - std::floor(alpha));
        u -= std::floor(u);
        y[free[k]] = radius_ * bump.quantile(u);
      }
      Modes& s = shifts_[static_cast<std::size_t>(j)];
      for (std::size_t i : free) s[i] = weight_[i] * 0.5 * (y[i] + y[lat.negated(i)]);
    }
  }

  const ModeLattice& lattice() const override { return inner_->lattice(); }
  std::string name() const override { return "mollified(" + inner_->name() + ")"; }
  bool rotation_invariant() const override { return false; }
  int n_moll() const { return n_; }
  double eps() const { return eps_; }
  double eta() const { return eta_; }
  double radius() const { return radius_; }
  const FunctionalPtr& inner() const { return inner_; }

  /// eps Leb + (1-eps) Fejer_N(mu), before the perturbation.
  Modes smoothed(std::span<const cplx> mu) const {
    Modes s(mu.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = weight_[i] * mu[i];
    s[lattice().zero_index()] = 1.0;
    return s;
  }

  /// The perturbed density at quadrature node j.
  Modes node_measure(std::span<const cplx> mu, std::size_t j) const {
    Modes s = smoothed(mu);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] -= shifts_[j][i];
    return s;
  }

  std::size_t points() const { return shifts_.size(); }

  double value_raw(std::span<const cplx> mu) const override {
    const Modes base = smoothed(mu);
    check_positive(base);
    double acc = 0.0;
    for (std::size_t j = 0; j < shifts_.size(); ++j) acc += inner_->value_raw(node_measure(mu, j));
    return acc / double(shifts_.size());
  }

  Modes first_raw(std::span<const cplx> mu) const override {
    Modes f(mu.size());
    for (std::size_t j = 0; j < shifts_.size(); ++j) {
      const Modes g = inner_->first_raw(node_measure(mu, j));
      for (std::size_t i = 0; i < f.size(); ++i) f[i] += g[i];
    }
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= weight_[i] / double(shifts_.size());
    return f;
  }

  ModePairArray second_raw(std::span<const cplx> mu) const override {
    const std::size_t n = mu.size();
    ModePairArray out(lattice());
    for (std::size_t j = 0; j < shifts_.size(); ++j) {
      const ModePairArray s = inner_->second_raw(node_measure(mu, j));
      for (std::size_t k = 0; k < n * n; ++k) out.values[k] += s.values[k];
    }
    const double inv = 1.0 / double(shifts_.size());
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) out(k, l) *= weight_[k] * weight_[l] * inv;
    return out;
  }

  double first_dir(std::span<const cplx> mu, std::span<const cplx> q) const override {
    const Modes tq = scaled(q);
    double acc = 0.0;
    for (std::size_t j = 0; j < shifts_.size(); ++j) acc += inner_->first_dir(node_measure(mu, j), tq);
    return acc / double(shifts_.size());
  }

  double second_dir(std::span<const cplx> mu, std::span<const cplx> q1, std::span<const cplx> q2) const override {
    const Modes a = scaled(q1), b = scaled(q2);
    double acc = 0.0;
    for (std::size_t j = 0; j < shifts_.size(); ++j) acc += inner_->second_dir(node_measure(mu, j), a, b);
    return acc / double(shifts_.size());
  }

  double increment_raw(std::span<const cplx> a, std::span<const cplx> b) const override {
    double acc = 0.0;
    for (std::size_t j = 0; j < shifts_.size(); ++j) acc += inner_->increment_raw(node_measure(a, j), node_measure(b, j));
    return acc / double(shifts_.size());
  }

 private:
  Modes scaled(std::span<const cplx> q) const {
    Modes s(q.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = weight_[i] * q[i];
    return s;
  }

  void check_positive(const Modes& base) const {
    const ModeLattice small(lattice().dim(), n_ - 1);
    const SpectralField f(small, embed(lattice(), base, small), FieldKind::density, 1e-6);
    // a probability measure gives min >= eps; the perturbation moves it by < eps/2
    if (grid_minimum(f, 4 * n_ + 1) < 0.5 * eps_)
      throw NonPositiveDensity("mollify: smoothed measure not bounded below by eps; input is not a probability measure");
  }

  FunctionalPtr inner_;
  int n_;
  double eps_;
  double eta_ = 0.0;
  double radius_ = 0.0;
  std::vector<double> weight_;
  std::vector<Modes> shifts_;
};

inline FunctionalPtr mollify(FunctionalPtr inner, int n_moll, double eps, int points = 1024) {
  return std::make_shared<Mollified>(std::move(inner), n_moll, eps, points);
}

}  // namespace chaosbench
