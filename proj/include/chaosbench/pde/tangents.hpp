#pragma once

#include <utility>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/fejer.hpp"
#include "chaosbench/core/spectral_field.hpp"
#include "chaosbench/core/torus.hpp"
#include "chaosbench/functionals/functional.hpp"
#include "chaosbench/pde/solver.hpp"

namespace chaosbench {

/// Fejer pre-smoothing applied to Dirac-type initial data. level = 0 means
/// the lattice cutoff M; enabled = false keeps the raw truncated modes.
struct DiracSmoothing {
  bool enabled = true;
  int level = 0;
};

/// Truncated modes of the point mass at z: exp(-i 2 pi n.z).
inline SpectralField dirac_modes(const ModeLattice& lat, const TorusPoint& z, DiracSmoothing sm = {false, 0}) {
  if (z.dim() != lat.dim()) throw InvalidInput("dirac_modes: dimension mismatch");
  Modes c(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    double phase = 0.0;
    for (int j = 0; j < lat.dim(); ++j) phase += lat.mode(i)[j] * z[j];
    c[i] = std::polar(1.0, -two_pi * phase);
  }
  if (sm.enabled) apply_fejer(lat, c, sm.level > 0 ? sm.level : lat.cutoff());
  c[lat.zero_index()] = 1.0;
  return SpectralField(lat, std::move(c), FieldKind::density);
}

/// (D'_z)_i with <xi, D'_z> = d xi/dx_i (z): modes -(i 2 pi n_i) exp(-i 2 pi n.z).
inline SpectralField dirac_derivative_modes(const ModeLattice& lat, const TorusPoint& z, int component,
                                            DiracSmoothing sm = {}) {
  if (z.dim() != lat.dim()) throw InvalidInput("dirac_derivative_modes: dimension mismatch");
  if (component < 0 || component >= lat.dim()) throw InvalidInput("dirac_derivative_modes: bad component");
  Modes c(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    double phase = 0.0;
    for (int j = 0; j < lat.dim(); ++j) phase += lat.mode(i)[j] * z[j];
    c[i] = cplx(0.0, -two_pi * lat.mode(i)[component]) * std::polar(1.0, -two_pi * phase);
  }
  if (sm.enabled) apply_fejer(lat, c, sm.level > 0 ? sm.level : lat.cutoff());
  return SpectralField(lat, std::move(c), FieldKind::signed_distribution);
}

/// Flow and tangent blocks sampled on the solver's record grid.
struct TangentSeries {
  ModeLattice lattice;
  std::vector<double> t;
  std::vector<SpectralField> m;
  std::vector<std::vector<SpectralField>> first;   // [record][block]
  std::vector<std::vector<SpectralField>> second;  // [record][pair]
  std::vector<std::string> warnings;

  std::size_t index_of(double time) const {
    for (std::size_t k = 0; k < t.size(); ++k)
      if (std::abs(t[k] - time) <= 1e-9 * std::max(1.0, time)) return k;
    throw InvalidInput("TangentSeries: time " + std::to_string(time) + " was not recorded");
  }
};

/// Solve the flow together with first-order tangents started from q0 and
/// second-order tangents for the given pairs (zero initial data).
inline TangentSeries solve_tangents(const DriftSpec& drift, const SpectralField& mu, const std::vector<SpectralField>& q0,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs, const SolverConfig& cfg) {
  if (mu.kind() != FieldKind::density) throw InvalidInput("solve_tangents: base measure must be a density");
  const ModeLattice& lat = cfg.lattice;
  AugmentedState u{embed(mu.lattice(), mu.coeffs(), lat), {}, std::vector<Modes>(pairs.size(), Modes(lat.size()))};
  for (const auto& q : q0) {
    if (std::abs(q[q.lattice().zero_index()]) > 1e-12)
      throw InvalidInput("solve_tangents: tangent initial data must have zero mass");
    u.first.push_back(embed(q.lattice(), q.coeffs(), lat));
  }
  AugmentedSolver solver(drift, cfg, pairs);
  AugmentedSeries s = solver.run(std::move(u));
  TangentSeries out{lat, std::move(s.t), {}, {}, {}, std::move(s.warnings)};
  for (auto& st : s.states) {
    out.m.emplace_back(lat, std::move(st.m), FieldKind::density, 1e-6);
    std::vector<SpectralField> f, g;
    for (auto& q : st.first) f.emplace_back(lat, std::move(q), FieldKind::signed_distribution, 1e-6);
    for (auto& r : st.second) g.emplace_back(lat, std::move(r), FieldKind::signed_distribution, 1e-6);
    out.first.push_back(std::move(f));
    out.second.push_back(std::move(g));
  }
  return out;
}

/// m1(t; mu, nu): derivative of the flow in the direction nu - mu.
inline TangentSeries solve_m1(const DriftSpec& drift, const SpectralField& mu, const SpectralField& nu, const SolverConfig& cfg) {
  const ModeLattice& lat = cfg.lattice;
  const SpectralField q = difference(embed(nu, lat), embed(mu, lat));
  return solve_tangents(drift, mu, {q}, {}, cfg);
}

/// Overload taking a recorded flow: its initial state is the base measure.
inline TangentSeries solve_m1(const DriftSpec& drift, const FlowSeries& flow, const SpectralField& nu, const SolverConfig& cfg) {
  if (flow.m.empty()) throw InvalidInput("solve_m1: empty flow");
  if (!flow.t.empty() && flow.t.back() < cfg.t_end - 1e-12) throw InvalidInput("solve_m1: flow too short");
  return solve_m1(drift, flow.m.front(), nu, cfg);
}

/// d1(t; mu, z)_i: tangent started from the (smoothed) derivative of the Dirac mass.
inline TangentSeries solve_d1(const DriftSpec& drift, const SpectralField& mu, const TorusPoint& z, int component,
                              const SolverConfig& cfg, DiracSmoothing sm = {}) {
  return solve_tangents(drift, mu, {dirac_derivative_modes(cfg.lattice, z, component, sm)}, {}, cfg);
}

/// m2(t; mu, nu_a, nu_b) with zero initial condition, solved together with
/// the two first-order tangents it is driven by.
inline TangentSeries solve_m2(const DriftSpec& drift, const SpectralField& mu, const SpectralField& nu_a,
                              const SpectralField& nu_b, const SolverConfig& cfg) {
  const ModeLattice& lat = cfg.lattice;
  const SpectralField m0 = embed(mu, lat);
  return solve_tangents(drift, mu, {difference(embed(nu_a, lat), m0), difference(embed(nu_b, lat), m0)}, {{0, 1}}, cfg);
}

/// d2(t; mu, z1, z2)_{ij} with zero initial condition.
inline TangentSeries solve_d2(const DriftSpec& drift, const SpectralField& mu, const TorusPoint& z1, int i,
                              const TorusPoint& z2, int j, const SolverConfig& cfg, DiracSmoothing sm = {}) {
  const ModeLattice& lat = cfg.lattice;
  return solve_tangents(drift, mu, {dirac_derivative_modes(lat, z1, i, sm), dirac_derivative_modes(lat, z2, j, sm)}, {{0, 1}},
                        cfg);
}

/// d U/d m (t, mu)(z) = <dPhi/dm(m(t; mu)), m1(t; mu, delta_z)> (normalised
/// derivative, so constant shifts of the direction do not matter).
inline double u_first_derivative(const DriftSpec& drift, const Functional& phi, const SpectralField& mu, double t,
                                 const TorusPoint& z, SolverConfig cfg, DiracSmoothing sm = {}) {
  cfg.t_end = t;
  const SpectralField delta = dirac_modes(cfg.lattice, z, sm);
  const TangentSeries s = solve_m1(drift, mu, delta, cfg);
  return phi.first_pairing(s.m.back(), s.first.back()[0]);
}

/// d_{z1,i} d_{z2,j} d^2 U/d m^2 (t, mu)(z1, z2) =
///   d^2Phi/dm^2(m_t)(d1_i(z1), d1_j(z2)) + dPhi/dm(m_t)(d2_ij(z1, z2)).
inline double u_second_mixed_derivative(const DriftSpec& drift, const Functional& phi, const SpectralField& mu, double t,
                                        const TorusPoint& z1, int i, const TorusPoint& z2, int j, SolverConfig cfg,
                                        DiracSmoothing sm = {}) {
  cfg.t_end = t;
  const TangentSeries s = solve_d2(drift, mu, z1, i, z2, j, cfg, sm);
  const SpectralField& mt = s.m.back();
  return phi.second_bilinear(mt, s.first.back()[0], s.first.back()[1]) + phi.first_pairing(mt, s.second.back()[0]);
}

/// Same quantity at every recorded time of one solve.
struct MixedDerivativeSeries {
  std::vector<double> t;
  std::vector<double> value;
};

inline MixedDerivativeSeries u_second_mixed_series(const DriftSpec& drift, const Functional& phi, const SpectralField& mu,
                                                   const TorusPoint& z1, int i, const TorusPoint& z2, int j,
                                                   const SolverConfig& cfg, DiracSmoothing sm = {}) {
  const TangentSeries s = solve_d2(drift, mu, z1, i, z2, j, cfg, sm);
  MixedDerivativeSeries out;
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    out.t.push_back(s.t[k]);
    out.value.push_back(phi.second_bilinear(s.m[k], s.first[k][0], s.first[k][1]) + phi.first_pairing(s.m[k], s.second[k][0]));
  }
  return out;
}

}  // namespace chaosbench
