#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chaosbench/core/empirical.hpp"
#include "chaosbench/core/error.hpp"
#include "chaosbench/core/spectral_field.hpp"
#include "chaosbench/drift/potential.hpp"

namespace chaosbench {

/// b(x, mu) = -kappa grad (W * mu)(x).
struct ConvolutionGradient {
  PotentialSpec potential;
  double kappa = 0.0;
};

/// b(y, mu) = -2 pi kappa \int sin(2 pi (y - x)) mu(dx), d = 1.
struct Kuramoto {
  double kappa = 0.0;
};

/// b(x, mu) = b0(x) + eps \int B(x, y) mu(dy) with
/// B(x, y) = sum_{n,m} Bhat(n, m) exp(i 2 pi (n.x - m.y)).
/// One coefficient vector b0 and one kernel matrix (row n, column m, both in
/// lattice order) per component.
struct SmallMeanField {
  ModeLattice lattice;
  std::vector<Modes> b0_hat;
  std::vector<std::vector<cplx>> kernel_hat;
  double eps = 0.0;
};

using DriftSpec = std::variant<ConvolutionGradient, Kuramoto, SmallMeanField>;

/// Per-component Fourier coefficients of a vector field on a lattice.
using VectorModes = std::vector<Modes>;

inline int drift_dim(const DriftSpec& spec) {
  if (auto* c = std::get_if<ConvolutionGradient>(&spec)) return c->potential.dim();
  if (std::holds_alternative<Kuramoto>(spec)) return 1;
  return std::get<SmallMeanField>(spec).lattice.dim();
}

/// Cutoff of the modes the drift depends on (and produces).
inline int drift_support(const DriftSpec& spec) {
  if (auto* c = std::get_if<ConvolutionGradient>(&spec)) return c->potential.lattice().cutoff();
  if (std::holds_alternative<Kuramoto>(spec)) return 1;
  return std::get<SmallMeanField>(spec).lattice.cutoff();
}

inline const char* drift_name(const DriftSpec& spec) {
  if (std::holds_alternative<ConvolutionGradient>(spec)) return "convolution";
  if (std::holds_alternative<Kuramoto>(spec)) return "kuramoto";
  return "small-mean-field";
}

inline void validate(const DriftSpec& spec) {
  if (auto* c = std::get_if<ConvolutionGradient>(&spec)) {
    if (!std::isfinite(c->kappa)) throw InvalidInput("drift: kappa must be finite");
  } else if (auto* k = std::get_if<Kuramoto>(&spec)) {
    if (!std::isfinite(k->kappa)) throw InvalidInput("drift: kappa must be finite");
  } else {
    const auto& s = std::get<SmallMeanField>(spec);
    const std::size_t d = static_cast<std::size_t>(s.lattice.dim());
    const std::size_t l = s.lattice.size();
    if (s.b0_hat.size() != d || s.kernel_hat.size() != d)
      throw InvalidInput("drift: small-mean-field needs one b0 and one kernel per component");
    for (std::size_t j = 0; j < d; ++j) {
      if (s.b0_hat[j].size() != l || s.kernel_hat[j].size() != l * l)
        throw InvalidInput("drift: small-mean-field coefficient sizes do not match lattice");
      if (symmetry_defect(s.lattice, s.b0_hat[j]) > 1e-12) throw InvalidInput("drift: b0 must be real");
      // B real <=> Bhat(-n, -m) = conj(Bhat(n, m))
      for (std::size_t a = 0; a < l; ++a)
        for (std::size_t b = 0; b < l; ++b)
          if (std::abs(s.kernel_hat[j][s.lattice.negated(a) * l + s.lattice.negated(b)] - std::conj(s.kernel_hat[j][a * l + b])) > 1e-12)
            throw InvalidInput("drift: kernel must be real");
    }
    if (!std::isfinite(s.eps)) throw InvalidInput("drift: eps must be finite");
  }
}

namespace detail {

// Contribution b(.,q) on `lat` that is linear in the measure argument q;
// `with_constant` adds b0 for the small-mean-field class.
inline VectorModes drift_modes(const DriftSpec& spec, const ModeLattice& lat, std::span<const cplx> q, bool with_constant) {
  const int d = lat.dim();
  VectorModes out(static_cast<std::size_t>(d), Modes(lat.size()));
  if (auto* c = std::get_if<ConvolutionGradient>(&spec)) {
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const Mode& n = lat.mode(i);
      const double w = c->potential.at(n);
      if (w == 0.0) continue;
      for (int j = 0; j < d; ++j)
        out[static_cast<std::size_t>(j)][i] = -c->kappa * cplx(0.0, two_pi * n[j]) * w * q[i];
    }
  } else if (auto* k = std::get_if<Kuramoto>(&spec)) {
    // W(x) = -cos(2 pi x): w(+-1) = -1/2, so b_{+-1} = i pi kappa (+-1) q_{+-1}
    if (lat.cutoff() >= 1) {
      const std::size_t z = lat.zero_index();
      out[0][z + 1] = cplx(0.0, std::numbers::pi * k->kappa) * q[z + 1];
      out[0][z - 1] = cplx(0.0, -std::numbers::pi * k->kappa) * q[z - 1];
    }
  } else {
    const auto& s = std::get<SmallMeanField>(spec);
    const ModeLattice& kl = s.lattice;
    const std::size_t l = kl.size();
    // restrict q to the kernel lattice once
    std::vector<cplx> qk(l);
    for (std::size_t b = 0; b < l; ++b)
      if (auto idx = lat.find(kl.mode(b))) qk[b] = q[*idx];
    for (std::size_t a = 0; a < l; ++a) {
      auto idx = lat.find(kl.mode(a));
      if (!idx) continue;
      for (int j = 0; j < d; ++j) {
        const auto& row = s.kernel_hat[static_cast<std::size_t>(j)];
        cplx acc{};
        for (std::size_t b = 0; b < l; ++b) acc += row[a * l + b] * qk[b];
        cplx v = s.eps * acc;
        if (with_constant) v += s.b0_hat[static_cast<std::size_t>(j)][a];
        out[static_cast<std::size_t>(j)][*idx] = v;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Coefficients of x -> b(x, m) on the lattice of m.
inline VectorModes eval_drift_field(const DriftSpec& spec, const ModeLattice& lat, std::span<const cplx> m) {
  if (drift_dim(spec) != lat.dim()) throw InvalidInput("eval_drift_field: dimension mismatch");
  return detail::drift_modes(spec, lat, m, true);
}

inline VectorModes eval_drift_field(const DriftSpec& spec, const SpectralField& m) {
  return eval_drift_field(spec, m.lattice(), m.coeffs());
}

/// Coefficients of x -> (delta b/delta m)(x, m)(q). Independent of m because
/// every supported drift is affine in the measure.
inline VectorModes eval_drift_derivative(const DriftSpec& spec, const ModeLattice& lat, std::span<const cplx> q) {
  if (drift_dim(spec) != lat.dim()) throw InvalidInput("eval_drift_derivative: dimension mismatch");
  return detail::drift_modes(spec, lat, q, false);
}

/// Adjoint of q -> (delta b/delta m)(q) paired against a vector field g:
/// returns A with sum_j <g_j, (delta b_j/delta m)(q)> = <A, q> for all real q.
inline Modes drift_derivative_adjoint(const DriftSpec& spec, const ModeLattice& lat, const VectorModes& g) {
  const int d = lat.dim();
  Modes out(lat.size());
  if (auto* s = std::get_if<SmallMeanField>(&spec)) {
    const ModeLattice& kl = s->lattice;
    const std::size_t l = kl.size();
    for (std::size_t b = 0; b < l; ++b) {
      auto ib = lat.find(kl.mode(b));
      if (!ib) continue;
      cplx acc{};
      for (std::size_t a = 0; a < l; ++a) {
        auto ia = lat.find(kl.mode(a));
        if (!ia) continue;
        for (int j = 0; j < d; ++j)
          acc += std::conj(s->eps * s->kernel_hat[static_cast<std::size_t>(j)][a * l + b]) * g[static_cast<std::size_t>(j)][*ia];
      }
      out[*ib] = acc;
    }
    return out;
  }
  // convolution-type kernels are diagonal: K_j(n, n) = -kappa i 2 pi n_j W(n)
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Mode& n = lat.mode(i);
    double w = 0.0, kappa = 0.0;
    if (auto* c = std::get_if<ConvolutionGradient>(&spec)) {
      w = c->potential.at(n);
      kappa = c->kappa;
    } else {
      w = (std::abs(n[0]) == 1) ? -0.5 : 0.0;
      kappa = std::get<Kuramoto>(spec).kappa;
    }
    if (w == 0.0) continue;
    cplx acc{};
    for (int j = 0; j < d; ++j) acc += std::conj(-kappa * cplx(0.0, two_pi * n[j]) * w) * g[static_cast<std::size_t>(j)][i];
    out[i] = acc;
  }
  return out;
}

/// Evaluate vector-field coefficients at flat particle positions; the result
/// is flat as well (N*d values).
inline std::vector<double> evaluate_vector_field(const ModeLattice& lat, const VectorModes& b, std::span<const double> positions) {
  const int d = lat.dim();
  const int cutoff = lat.cutoff();
  const std::size_t side = static_cast<std::size_t>(lat.side());
  const std::size_t n_particles = positions.size() / static_cast<std::size_t>(d);
  std::vector<double> out(positions.size(), 0.0);
  std::vector<cplx> powers(side * static_cast<std::size_t>(d));
  const std::size_t half = lat.size() / 2;
  for (std::size_t p = 0; p < n_particles; ++p) {
    for (int j = 0; j < d; ++j)
      // fill_phase_powers gives e^{-i...}; conj below turns it into e^{+i...}
      detail::fill_phase_powers(positions[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)], cutoff,
                                std::span<cplx>(powers).subspan(static_cast<std::size_t>(j) * side, side));
    // pair n with -n: b(x) = b_0 + 2 Re sum_{n < 0 in lattice order} b_n e^{i2pi n.x}
    for (int j = 0; j < d; ++j) {
      const Modes& bj = b[static_cast<std::size_t>(j)];
      double acc = bj[half].real();
      for (std::size_t i = 0; i < half; ++i) {
        if (bj[i] == cplx{}) continue;
        const Mode& n = lat.mode(i);
        cplx e = std::conj(powers[static_cast<std::size_t>(n[0] + cutoff)]);
        for (int k = 1; k < d; ++k) e *= std::conj(powers[static_cast<std::size_t>(k) * side + static_cast<std::size_t>(n[k] + cutoff)]);
        acc += 2.0 * (bj[i] * e).real();
      }
      out[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] = acc;
    }
  }
  return out;
}

/// Drift b(x_i, mu^N) for every particle, computed from empirical modes on
/// the drift's support lattice in O(N (2K+1)^d).
inline std::vector<double> eval_drift_on_particles(const DriftSpec& spec, const EmpiricalMeasure& mu) {
  if (drift_dim(spec) != mu.dim()) throw InvalidInput("eval_drift_on_particles: dimension mismatch");
  const int support = drift_support(spec);
  if (mu.cached_modes().lattice().cutoff() < support)
    throw TruncationError("eval_drift_on_particles: mode cache cutoff " +
                          std::to_string(mu.cached_modes().lattice().cutoff()) + " below drift support " +
                          std::to_string(support));
  const ModeLattice lat(mu.dim(), support);
  const SpectralField modes = mu.modes_on(lat);
  if (auto* k = std::get_if<Kuramoto>(&spec)) {
    // b(y) = -2 pi kappa Im[e^{i 2 pi y} mu^1]
    const cplx m1 = modes.at(1);
    std::vector<double> out(mu.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = -two_pi * k->kappa * (std::polar(1.0, two_pi * mu.positions()[i]) * m1).imag();
    return out;
  }
  return evaluate_vector_field(lat, eval_drift_field(spec, modes), mu.positions());
}

}  // namespace chaosbench
