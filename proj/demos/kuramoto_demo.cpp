// Kuramoto at kappa = 2: particles synchronise towards the stationary order
// parameter r, and the mean-field flow from a slightly tilted start does the
// same.
//
//   kuramoto_demo [N] [replicas]

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "chaosbench/experiments/presets.hpp"
#include "chaosbench/particles/simulate.hpp"
#include "chaosbench/pde/solver.hpp"
#include "chaosbench/pde/stationary.hpp"

using namespace chaosbench;

int main(int argc, char** argv) {
  const double kappa = 2.0;
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1000;
  const std::size_t replicas = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 8;

  const KuramotoProfile prof = stationary_kuramoto_profile(kappa, 32);
  std::printf("stationary r = %.6f (kappa = %g)\n\n", prof.r, kappa);

  SimConfig sc;
  sc.n_particles = n;
  sc.replicas = replicas;
  sc.dt = 1e-3;
  sc.t_end = 4.0;
  sc.record_stride = 500;
  sc.seed = 2024;
  sc.observables.push_back(FourierModesObservable{1});
  const auto runs = simulate(sc, presets::kuramoto(kappa), SpectralField::uniform(ModeLattice(1, 8)));

  SolverConfig pc;
  pc.lattice = ModeLattice(1, 32);
  pc.dt = 1e-3;
  pc.t_end = sc.t_end;
  pc.record_stride = 500;
  const FlowSeries flow = solve_nonlinear_fp(presets::kuramoto(kappa), presets::cosine_density(32, 0.02), pc);

  std::printf("%6s  %18s  %14s\n", "t", "mean |mu^N(1)|", "|m_t(1)| (PDE)");
  const std::size_t z = flow.lattice.zero_index();
  for (std::size_t k = 0; k < runs.front().t.size(); ++k) {
    double mean = 0.0;
    for (const auto& r : runs) mean += std::abs(r.values[0][k]);
    mean /= double(runs.size());
    std::printf("%6.2f  %18.6f  %14.6f\n", runs.front().t[k], mean, std::abs(flow.m[k][z + 1]));
  }
}
