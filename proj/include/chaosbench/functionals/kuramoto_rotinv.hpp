#pragma once

#include <cmath>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/functionals/functional.hpp"
#include "chaosbench/functionals/hyperdual.hpp"

namespace chaosbench {

/// Quintic smoothstep: 0 below a, 1 above b, C^2 at both joins.
inline double smoothstep_cutoff(double x, double a, double b) {
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  const double t = (x - a) / (b - a);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

/// Rotation-invariant test functional for the supercritical Kuramoto model:
///
///   Phi(mu) = phi(|mu^1|) ||mu o tau^{-1} - p||^2_{-(1+eps_s)/2,2} + 1 - phi(|mu^1|)
///
/// where mu o tau^{-1} is mu rotated so that its first mode is real and
/// positive, p is the positively phased stationary profile and phi is the
/// smoothstep cutoff on [delta/2, delta].
///
/// Written in terms of c_1 c_{-1} and c_{+-1}/rho only, so the same formula
/// extends holomorphically to independent complex coefficients and can be
/// differentiated exactly with hyperdual numbers.
class KuramotoRotInv final : public Functional {
 public:
  KuramotoRotInv(double eps_s, double delta_cut, const SpectralField& profile, int cutoff)
      : eps_s_(eps_s), delta_(delta_cut), lattice_(1, cutoff) {
    if (profile.dim() != 1) throw UnsupportedDimension("KuramotoRotInv: only d = 1");
    if (!(delta_ > 0.0)) throw InvalidInput("KuramotoRotInv: delta_cut must be positive");
    if (!(eps_s_ >= 0.0)) throw InvalidInput("KuramotoRotInv: eps_s must be nonnegative");
    if (cutoff < 1) throw InvalidInput("KuramotoRotInv: cutoff must be >= 1");
    p_ = embed(profile.lattice(), profile.coeffs(), lattice_);
    w_.resize(lattice_.size());
    for (std::size_t i = 0; i < lattice_.size(); ++i) w_[i] = std::pow(1.0 + lattice_.norm_sq(i), -(1.0 + eps_s_) / 2.0);
  }

  const ModeLattice& lattice() const override { return lattice_; }
  std::string name() const override { return "kuramoto-rotation-invariant"; }
  bool rotation_invariant() const override { return true; }
  double delta_cut() const { return delta_; }
  double eps_s() const { return eps_s_; }
  const Modes& profile() const { return p_; }

  double value_raw(std::span<const cplx> mu) const override {
    std::vector<cplx> c(mu.begin(), mu.end());
    return evaluate(c).real();
  }

  Modes first_raw(std::span<const cplx> mu) const override {
    const std::size_t n = lattice_.size();
    Modes f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = eval_hd(mu, lattice_.negated(k), n).b;
    return f;
  }

  ModePairArray second_raw(std::span<const cplx> mu) const override {
    const std::size_t n = lattice_.size();
    ModePairArray s(lattice_);
    if (below_cut(mu)) return s;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = k; l < n; ++l) {
        const cplx v = eval_hd(mu, lattice_.negated(k), lattice_.negated(l)).d;
        s(k, l) = v;
        s(l, k) = v;
      }
    return s;
  }

  double first_dir(std::span<const cplx> mu, std::span<const cplx> q) const override {
    std::vector<HyperDual> c(mu.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = HyperDual(mu[i], q[i], 0.0, 0.0);
    return evaluate(c).b.real();
  }

  double second_dir(std::span<const cplx> mu, std::span<const cplx> q1, std::span<const cplx> q2) const override {
    std::vector<HyperDual> c(mu.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = HyperDual(mu[i], q1[i], q2[i], 0.0);
    return evaluate(c).d.real();
  }

 private:
  bool below_cut(std::span<const cplx> mu) const {
    const std::size_t z = lattice_.zero_index();
    return std::sqrt(std::abs(mu[z + 1] * mu[z - 1])) <= 0.5 * delta_;
  }

  // hyperdual evaluation with unit directions at indices i (e1) and j (e2);
  // j == size means no second direction
  HyperDual eval_hd(std::span<const cplx> mu, std::size_t i, std::size_t j) const {
    std::vector<HyperDual> c(mu.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = HyperDual(mu[k]);
    c[i].b = 1.0;
    if (j < c.size()) c[j].c = 1.0;
    return evaluate(c);
  }

  template <class T>
  T evaluate(const std::vector<T>& c) const {
    const int m = lattice_.cutoff();
    const std::size_t z = lattice_.zero_index();
    const T rho2 = c[z + 1] * c[z - 1];
    const double rho_val = std::sqrt(std::abs(value_of(rho2)));
    if (rho_val <= 0.5 * delta_) return T(1.0);
    const T rho = sqrt_of(rho2);
    const T u = c[z - 1] / rho;  // e^{-i arg mu^1} on real data
    const T v = c[z + 1] / rho;  // its inverse
    T g(0.0);
    T up(1.0), vp(1.0);
    g += T(w_[z]) * (c[z] - T(p_[z])) * (c[z] - T(p_[z]));
    for (int n = 1; n <= m; ++n) {
      up = up * u;
      vp = vp * v;
      const std::size_t ip = z + static_cast<std::size_t>(n), in = z - static_cast<std::size_t>(n);
      const T a_pos = c[ip] * up - T(p_[ip]);
      const T a_neg = c[in] * vp - T(p_[in]);
      g += T(2.0 * w_[ip]) * a_pos * a_neg;
    }
    if (rho_val >= delta_) return g;
    const T phi = smoothstep(rho);
    return phi * g + T(1.0) - phi;
  }

  static cplx sqrt_of(const cplx& x) { return std::sqrt(x); }
  static HyperDual sqrt_of(const HyperDual& x) { return sqrt(x); }

  template <class T>
  T smoothstep(const T& rho) const {
    const double a = 0.5 * delta_;
    const T t = (rho - T(a)) * T(1.0 / (delta_ - a));
    return t * t * t * (T(10.0) - T(15.0) * t + T(6.0) * t * t);
  }

  double eps_s_;
  double delta_;
  ModeLattice lattice_;
  Modes p_;
  std::vector<double> w_;
};

}  // namespace chaosbench
