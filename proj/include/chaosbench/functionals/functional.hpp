#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chaosbench/core/empirical.hpp"
#include "chaosbench/core/error.hpp"
#include "chaosbench/core/norms.hpp"
#include "chaosbench/core/spectral_field.hpp"

namespace chaosbench {

/// Coefficients F(k, l) of a function of (y1, y2) on lattice x lattice:
/// F(y1, y2) = sum F(k,l) exp(i 2 pi (k.y1 + l.y2)), row-major in k.
struct ModePairArray {
  ModeLattice lattice;
  std::vector<cplx> values;

  ModePairArray() = default;
  explicit ModePairArray(ModeLattice lat) : lattice(std::move(lat)), values(lattice.size() * lattice.size()) {}
  cplx& operator()(std::size_t k, std::size_t l) { return values[k * lattice.size() + l]; }
  const cplx& operator()(std::size_t k, std::size_t l) const { return values[k * lattice.size() + l]; }

  /// \int\int F d q1 d q2 for real distributions q1, q2.
  double bilinear(std::span<const cplx> q1, std::span<const cplx> q2) const {
    const std::size_t n = lattice.size();
    cplx s{};
    for (std::size_t k = 0; k < n; ++k) {
      cplx row{};
      for (std::size_t l = 0; l < n; ++l) row += values[k * n + l] * std::conj(q2[l]);
      s += row * std::conj(q1[k]);
    }
    return s.real();
  }
};

struct FunctionalDerivatives {
  double value = 0.0;
  SpectralField first;   // signed distribution coefficients of y -> dPhi/dm(mu)(y)
  ModePairArray second;  // (y1, y2) -> d^2 Phi/dm^2(mu)(y1, y2)
};

/// A real function of probability measures with its first two linear
/// functional derivatives.
///
/// Implementations work on raw coefficient vectors on their own lattice() and
/// treat the coefficients as independent complex variables; the raw first
/// derivative is f_k = dPhi/dc_{-k}, so that the directional derivative along
/// a real distribution q is Re sum_k f_k conj(q_k). The normalised
/// derivatives (zero integral against mu) are assembled here in the base.
class Functional {
 public:
  virtual ~Functional() = default;

  virtual const ModeLattice& lattice() const = 0;
  virtual std::string name() const = 0;

  virtual double value_raw(std::span<const cplx> mu) const = 0;
  virtual Modes first_raw(std::span<const cplx> mu) const = 0;
  virtual ModePairArray second_raw(std::span<const cplx> mu) const = 0;

  /// Directional derivative D Phi(mu)[q] (no normalisation).
  virtual double first_dir(std::span<const cplx> mu, std::span<const cplx> q) const {
    return pairing(first_raw(mu), q);
  }
  /// D^2 Phi(mu)[q1, q2] (no normalisation).
  virtual double second_dir(std::span<const cplx> mu, std::span<const cplx> q1, std::span<const cplx> q2) const {
    return second_raw(mu).bilinear(q1, q2);
  }
  /// Phi(b) - Phi(a); overridden where a cancellation-free form exists.
  virtual double increment_raw(std::span<const cplx> a, std::span<const cplx> b) const {
    return value_raw(b) - value_raw(a);
  }
  virtual bool rotation_invariant() const { return false; }

  // -- lattice-agnostic front end ------------------------------------------

  Modes on_lattice(const SpectralField& f) const { return embed(f.lattice(), f.coeffs(), lattice()); }

  double value(const SpectralField& mu) const { return value_raw(on_lattice(mu)); }
  double value(const EmpiricalMeasure& mu) const { return value_raw(mu.modes_on(lattice()).modes()); }
  double increment(const SpectralField& a, const SpectralField& b) const {
    return increment_raw(on_lattice(a), on_lattice(b));
  }

  /// <dPhi/dm(mu), q> with the normalised derivative.
  double first_pairing(const SpectralField& mu, const SpectralField& q) const {
    const Modes m = on_lattice(mu), dq = on_lattice(q);
    double v = first_dir(m, dq);
    const double mass = dq[lattice().zero_index()].real();
    if (mass != 0.0) v -= mass * first_dir(m, m);
    return v;
  }

  /// <d^2Phi/dm^2(mu), q1 x q2> with the normalised (doubly centred) derivative.
  double second_bilinear(const SpectralField& mu, const SpectralField& q1, const SpectralField& q2) const {
    const Modes m = on_lattice(mu), a = on_lattice(q1), b = on_lattice(q2);
    const std::size_t z = lattice().zero_index();
    const double ma = a[z].real(), mb = b[z].real();
    double v = second_dir(m, a, b);
    if (ma != 0.0) v -= ma * second_dir(m, m, b);
    if (mb != 0.0) v -= mb * second_dir(m, a, m);
    if (ma != 0.0 && mb != 0.0) v += ma * mb * second_dir(m, m, m);
    return v;
  }

  FunctionalDerivatives derivatives(const SpectralField& mu_in) const {
    const ModeLattice& lat = lattice();
    const Modes mu = on_lattice(mu_in);
    const std::size_t n = lat.size(), z = lat.zero_index();
    FunctionalDerivatives out;
    out.value = value_raw(mu);

    Modes f = first_raw(mu);
    f[z] -= pairing(f, mu);
    out.first = SpectralField(lat, std::move(f), FieldKind::signed_distribution, 1e-7);

    // F'(y1,y2) = F - \int F(.,y2) dmu - \int F(y1,.) dmu + \int\int F dmu dmu
    ModePairArray s = second_raw(mu);
    std::vector<cplx> col(n), row(n);
    cplx both{};
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) {
        const cplx v = s(k, l);
        col[l] += v * std::conj(mu[k]);
        row[k] += v * std::conj(mu[l]);
        both += v * std::conj(mu[k]) * std::conj(mu[l]);
      }
    for (std::size_t l = 0; l < n; ++l) s(z, l) -= col[l];
    for (std::size_t k = 0; k < n; ++k) s(k, z) -= row[k];
    s(z, z) += both;
    out.second = std::move(s);
    return out;
  }
};

using FunctionalPtr = std::shared_ptr<const Functional>;

/// Phi(mu) = \int G dmu.
class LinearFunctional final : public Functional {
 public:
  explicit LinearFunctional(SpectralField g) : g_(std::move(g)) {}

  const ModeLattice& lattice() const override { return g_.lattice(); }
  std::string name() const override { return "linear"; }
  const SpectralField& g() const { return g_; }

  double value_raw(std::span<const cplx> mu) const override { return pairing(g_.coeffs(), mu); }
  Modes first_raw(std::span<const cplx>) const override { return g_.modes(); }
  ModePairArray second_raw(std::span<const cplx>) const override { return ModePairArray(lattice()); }
  double first_dir(std::span<const cplx>, std::span<const cplx> q) const override { return pairing(g_.coeffs(), q); }
  double second_dir(std::span<const cplx>, std::span<const cplx>, std::span<const cplx>) const override { return 0.0; }
  double increment_raw(std::span<const cplx> a, std::span<const cplx> b) const override {
    Modes d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = b[i] - a[i];
    return pairing(g_.coeffs(), d);
  }

 private:
  SpectralField g_;
};

/// Phi(mu) = ||mu - nu0||^2_{-s,2}; s = (d + alpha)/2 by default.
class SobolevDualSq final : public Functional {
 public:
  SobolevDualSq(double s, SpectralField nu0) : s_(s), nu0_(std::move(nu0)) {
    if (!(s_ > 0.0)) throw InvalidInput("SobolevDualSq: s must be positive");
    const ModeLattice& lat = nu0_.lattice();
    w_.resize(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) w_[i] = std::pow(1.0 + lat.norm_sq(i), -s_);
  }

  static SobolevDualSq with_alpha(double alpha, SpectralField nu0) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("SobolevDualSq: alpha must lie in (0, 1]");
    const double s = 0.5 * (nu0.dim() + alpha);
    return SobolevDualSq(s, std::move(nu0));
  }

  const ModeLattice& lattice() const override { return nu0_.lattice(); }
  std::string name() const override { return "sobolev-dual-sq"; }
  double s() const { return s_; }
  const SpectralField& reference() const { return nu0_; }

  double value_raw(std::span<const cplx> mu) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) acc += w_[i] * std::norm(mu[i] - nu0_[i]);
    return acc;
  }
  Modes first_raw(std::span<const cplx> mu) const override {
    Modes f(w_.size());
    for (std::size_t i = 0; i < w_.size(); ++i) f[i] = 2.0 * w_[i] * (mu[i] - nu0_[i]);
    return f;
  }
  ModePairArray second_raw(std::span<const cplx>) const override {
    ModePairArray s(lattice());
    for (std::size_t k = 0; k < w_.size(); ++k) s(k, lattice().negated(k)) = 2.0 * w_[k];
    return s;
  }
  double second_dir(std::span<const cplx>, std::span<const cplx> q1, std::span<const cplx> q2) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) acc += 2.0 * w_[i] * (q1[i] * std::conj(q2[i])).real();
    return acc;
  }
  // sum w |b-a|^2 + 2 Re sum w (b-a) conj(a-nu0): no subtraction of nearly equal values
  double increment_raw(std::span<const cplx> a, std::span<const cplx> b) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) {
      const cplx d = b[i] - a[i];
      acc += w_[i] * (std::norm(d) + 2.0 * (d * std::conj(a[i] - nu0_[i])).real());
    }
    return acc;
  }

 private:
  double s_;
  SpectralField nu0_;
  std::vector<double> w_;
};

}  // namespace chaosbench
