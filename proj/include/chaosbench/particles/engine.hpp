#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "chaosbench/core/empirical.hpp"
#include "chaosbench/core/error.hpp"
#include "chaosbench/drift/drift.hpp"
#include "chaosbench/particles/philox.hpp"

namespace chaosbench {

/// N interacting particles advanced by Euler-Maruyama. The phases
/// exp(-i 2 pi k x) computed for the empirical modes are kept and reused to
/// evaluate the drift, so each step costs one pass of sincos per coordinate.
class ParticleSystem {
 public:
  ParticleSystem(DriftSpec drift, std::vector<double> positions)
      : drift_(std::move(drift)),
        dim_(drift_dim(drift_)),
        lat_(dim_, std::max(1, drift_support(drift_))),
        x_(std::move(positions)) {
    validate(drift_);
    if (x_.empty() || x_.size() % static_cast<std::size_t>(dim_) != 0)
      throw InvalidInput("ParticleSystem: need N >= 1 complete particles");
    for (auto& v : x_) {
      if (!std::isfinite(v)) throw InvalidInput("ParticleSystem: non-finite coordinate");
      v = wrap_coordinate(v);
    }
    side_ = static_cast<std::size_t>(lat_.side());
    powers_.resize(x_.size() * side_);
    noise_.resize(x_.size());
    b_.resize(x_.size());
  }

  int dim() const { return dim_; }
  std::size_t size() const { return x_.size() / static_cast<std::size_t>(dim_); }
  std::span<const double> positions() const { return x_; }
  const ModeLattice& support_lattice() const { return lat_; }
  const DriftSpec& drift_spec() const { return drift_; }

  /// Empirical modes on the support lattice (always contains the first mode).
  const Modes& modes() {
    if (stale_) refresh();
    return modes_;
  }

  /// mu^N applied to exp(-i 2 pi e_1.x).
  cplx first_mode() {
    Mode e1{};
    e1[0] = 1;
    return modes()[*lat_.find(e1)];
  }

  /// b(x_i, mu^N) for the current state, flat.
  std::span<const double> drift_values() {
    if (stale_) refresh();
    if (drift_stale_) evaluate_drift();
    return b_;
  }

  /// x <- wrap(x + b dt + sqrt(dt) xi).
  template <NoiseSource Noise>
  void step(double dt, const Noise& noise, std::uint32_t replica, std::uint32_t step_index) {
    drift_values();
    noise.gaussians(replica, step_index, noise_);
    const double sq = std::sqrt(dt);
    for (std::size_t j = 0; j < x_.size(); ++j) x_[j] = wrap_coordinate(x_[j] + b_[j] * dt + sq * noise_[j]);
    stale_ = drift_stale_ = true;
  }

  EmpiricalMeasure snapshot(int cache_cutoff) const { return EmpiricalMeasure(dim_, x_, cache_cutoff); }

 private:
  // Same arithmetic as fourier_modes_of_empirical, with the phases kept.
  void refresh() {
    const std::size_t d = static_cast<std::size_t>(dim_);
    const int cutoff = lat_.cutoff();
    const std::size_t n = size(), half = lat_.size() / 2 + 1;
    std::vector<detail::ExactSum> re(half), im(half);
    for (std::size_t p = 0; p < n; ++p) {
      cplx* pw = powers_.data() + p * d * side_;
      for (std::size_t j = 0; j < d; ++j)
        detail::fill_phase_powers(x_[p * d + j], cutoff, std::span<cplx>(pw + j * side_, side_));
      for (std::size_t i = 0; i < half; ++i) {
        const Mode& m = lat_.mode(i);
        cplx v = pw[m[0] + cutoff];
        for (std::size_t j = 1; j < d; ++j) v *= pw[j * side_ + static_cast<std::size_t>(m[j] + cutoff)];
        re[i].add(v.real());
        im[i].add(v.imag());
      }
    }
    modes_.assign(lat_.size(), cplx{});
    for (std::size_t i = 0; i < half; ++i) {
      modes_[i] = cplx(re[i].mean(n), im[i].mean(n));
      modes_[lat_.negated(i)] = std::conj(modes_[i]);
    }
    modes_[lat_.zero_index()] = 1.0;
    stale_ = false;
  }

  void evaluate_drift() {
    const std::size_t d = static_cast<std::size_t>(dim_);
    const int cutoff = lat_.cutoff();
    const std::size_t n = size();
    if (auto* k = std::get_if<Kuramoto>(&drift_)) {
      const cplx m1 = modes_[lat_.zero_index() + 1];
      for (std::size_t p = 0; p < n; ++p)
        b_[p] = -two_pi * k->kappa * (std::conj(powers_[p * side_ + static_cast<std::size_t>(cutoff + 1)]) * m1).imag();
      drift_stale_ = false;
      return;
    }
    const VectorModes field = eval_drift_field(drift_, lat_, modes_);
    const std::size_t half = lat_.size() / 2;
    for (std::size_t p = 0; p < n; ++p) {
      const cplx* pw = powers_.data() + p * d * side_;
      for (std::size_t j = 0; j < d; ++j) {
        const Modes& bj = field[j];
        double acc = bj[half].real();
        for (std::size_t i = 0; i < half; ++i) {
          if (bj[i] == cplx{}) continue;
          const Mode& m = lat_.mode(i);
          cplx e = std::conj(pw[m[0] + cutoff]);
          for (std::size_t q = 1; q < d; ++q) e *= std::conj(pw[q * side_ + static_cast<std::size_t>(m[q] + cutoff)]);
          acc += 2.0 * (bj[i] * e).real();
        }
        b_[p * d + j] = acc;
      }
    }
    drift_stale_ = false;
  }

  DriftSpec drift_;
  int dim_;
  ModeLattice lat_;
  std::vector<double> x_;
  std::size_t side_ = 0;
  std::vector<cplx> powers_;
  Modes modes_;
  std::vector<double> noise_, b_;
  bool stale_ = true, drift_stale_ = true;
};

/// One Euler-Maruyama step of an empirical measure.
template <NoiseSource Noise>
EmpiricalMeasure step_em(const EmpiricalMeasure& state, const DriftSpec& drift, double dt, const Noise& noise,
                         std::uint32_t replica = 0, std::uint32_t step_index = 0) {
  if (!(dt > 0.0)) throw InvalidInput("step_em: dt must be positive");
  ParticleSystem sys(drift, std::vector<double>(state.positions().begin(), state.positions().end()));
  sys.step(dt, noise, replica, step_index);
  return sys.snapshot(state.cached_modes().lattice().cutoff());
}

}  // namespace chaosbench
