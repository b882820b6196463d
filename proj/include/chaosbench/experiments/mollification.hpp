#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "chaosbench/core/fejer.hpp"
#include "chaosbench/core/wasserstein.hpp"
#include "chaosbench/functionals/mollify.hpp"
#include "chaosbench/particles/philox.hpp"

namespace chaosbench {

struct StressMeasure {
  std::string label;
  std::variant<SpectralField, EmpiricalMeasure> mu;
};

/// Twenty d = 1 measures: single atoms, clusters of atoms, uniform samples
/// and smooth densities from flat to strongly peaked.
inline std::vector<StressMeasure> mollification_stress_set(std::uint64_t seed = 1, int cutoff = 64) {
  const ModeLattice lat(1, cutoff);
  std::vector<StressMeasure> out;
  std::uint32_t block = 0;
  auto uniform2 = [&] { return philox_uniform2(seed, {block++, 0u, 0u, 0x57e55u}); };

  for (int k = 0; k < 4; ++k) {
    const double x = 0.05 + 0.23 * k;
    out.push_back({"atom", EmpiricalMeasure(1, std::vector<double>{x}, lat)});
  }
  for (int k = 0; k < 4; ++k) {
    // a tight cluster and its far partner
    const double c = uniform2()[0];
    std::vector<double> x{c, wrap_coordinate(c + 0.01 * (k + 1)), wrap_coordinate(c + 0.5)};
    out.push_back({"cluster", EmpiricalMeasure(1, x, lat)});
  }
  for (int k = 0; k < 6; ++k) {
    std::vector<double> x;
    const std::size_t n = std::size_t(8) << k;
    while (x.size() < n) {
      const auto u = uniform2();
      x.push_back(u[0]);
      if (x.size() < n) x.push_back(u[1]);
    }
    out.push_back({"sample", EmpiricalMeasure(1, x, lat)});
  }
  for (int k = 0; k < 6; ++k) {
    // von Mises with concentration 2^k, rotated
    const double a = std::ldexp(1.0, k);
    const double shift = 0.1 * k;
    const int grid = 4 * cutoff + 4;
    std::vector<double> f(static_cast<std::size_t>(grid));
    for (int g = 0; g < grid; ++g) f[static_cast<std::size_t>(g)] = std::exp(a * std::cos(two_pi * (double(g) / grid - shift)));
    Modes c(lat.size());
    for (int n = -cutoff; n <= cutoff; ++n) {
      cplx acc{};
      for (int g = 0; g < grid; ++g) acc += f[static_cast<std::size_t>(g)] * std::polar(1.0, -two_pi * n * double(g) / grid);
      c[static_cast<std::size_t>(n + cutoff)] = acc;
    }
    const cplx z = c[lat.zero_index()];
    for (auto& v : c) v /= z;
    out.push_back({"von-mises", SpectralField(lat, std::move(c), FieldKind::density, 1e-9)});
  }
  return out;
}

struct MollificationLevel {
  int n_moll = 0;
  double eps = 0.0;
  double max_error = 0.0;  // max over the set of |Phi_{N,eps} - Phi|
};

struct FejerLevel {
  int n = 0;
  double max_w1 = 0.0;  // max over the set of W1(Fejer_N(mu), mu)
};

struct MollificationResult {
  std::vector<MollificationLevel> mollified;
  std::vector<FejerLevel> fejer;
};

inline MollificationResult mollification_experiment(const FunctionalPtr& inner,
                                                    const std::vector<std::pair<int, double>>& levels,
                                                    const std::vector<int>& fejer_levels, std::uint64_t seed = 1,
                                                    int qmc_points = 256) {
  if (!inner) throw InvalidInput("mollification: inner functional missing");
  const auto set = mollification_stress_set(seed);
  MollificationResult res;
  for (const auto& [n, eps] : levels) {
    const auto phi = mollify(inner, n, eps, qmc_points);
    MollificationLevel lv{n, eps, 0.0};
    for (const auto& s : set) {
      const double e = std::visit([&](const auto& mu) { return std::abs(phi->value(mu) - inner->value(mu)); }, s.mu);
      lv.max_error = std::max(lv.max_error, e);
    }
    res.mollified.push_back(lv);
  }
  for (int n : fejer_levels) {
    FejerLevel lv{n, 0.0};
    for (const auto& s : set) {
      const double w = std::visit([&](const auto& mu) { return wasserstein1_1d(fejer_smooth(mu, n), mu); }, s.mu);
      lv.max_w1 = std::max(lv.max_w1, w);
    }
    res.fejer.push_back(lv);
  }
  return res;
}

}  // namespace chaosbench
