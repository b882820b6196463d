#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chaosbench/core/norms.hpp"
#include "chaosbench/core/stats.hpp"
#include "chaosbench/pde/family_distance.hpp"
#include "chaosbench/pde/solver.hpp"

namespace chaosbench {

enum class DecayTarget {
  reference,        // ||m(t) - nu||, nu given
  long_time,        // nu = m(t_long) from the same flow
  kuramoto_family,  // min over rotations of the stationary profile
};

struct DecayCase {
  std::string name;
  DriftSpec drift;
  SpectralField mu0;
  DecayTarget target = DecayTarget::reference;
  std::optional<SpectralField> reference;  // for DecayTarget::reference; uniform when empty
  double s = 1.0;
  double t_min = 1.0, t_max = 30.0;
  double t_long = 80.0;
  // Distances below the floor are rounding, not decay. Modes that tend to
  // exactly zero keep relative precision, so the floor can sit near underflow
  // there; a limit with O(1) modes loses it at ~1e-16 of their size.
  double floor = 1e-280;
  SolverConfig solver{};
  int record_stride = 10;
};

struct DecayCaseResult {
  std::string name;
  DecayFit fit;
  std::vector<double> t, distance;
};

inline DecayCaseResult run_decay_case(const DecayCase& c) {
  DecayCaseResult out{c.name, {}, {}, {}};
  if (!(c.t_max > c.t_min)) throw InvalidInput("ergodic_decay: empty fit window in case " + c.name);
  if (c.target == DecayTarget::kuramoto_family) {
    const auto* k = std::get_if<Kuramoto>(&c.drift);
    if (!k) throw InvalidInput("ergodic_decay: family distance needs a Kuramoto drift (case " + c.name + ")");
    const auto s = kuramoto_family_distance(k->kappa, c.mu0, c.solver.dt, c.t_max, c.record_stride,
                                            c.solver.lattice.cutoff(), c.s);
    out.t = s.t;
    out.distance = s.distance;
  } else {
    SolverConfig sc = c.solver;
    sc.t_end = c.target == DecayTarget::long_time ? std::max(c.t_long, c.t_max) : c.t_max;
    sc.record_stride = c.record_stride;
    const FlowSeries flow = solve_nonlinear_fp(c.drift, c.mu0, sc);
    const SpectralField nu = c.target == DecayTarget::long_time
                                 ? flow.m.back()
                                 : (c.reference ? embed(*c.reference, sc.lattice) : SpectralField::uniform(sc.lattice));
    for (std::size_t k = 0; k < flow.t.size() && flow.t[k] <= c.t_max + 1e-9; ++k) {
      out.t.push_back(flow.t[k]);
      out.distance.push_back(dual_norm(difference(flow.m[k], nu), c.s));
    }
  }
  out.fit = decay_rate_fit(out.t, out.distance, c.t_min, c.t_max, c.floor);
  return out;
}

inline std::vector<DecayCaseResult> ergodic_decay_experiment(const std::vector<DecayCase>& cases) {
  std::vector<DecayCaseResult> out;
  for (const auto& c : cases) out.push_back(run_decay_case(c));
  return out;
}

}  // namespace chaosbench
