#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/lattice.hpp"

namespace chaosbench {

/// Even interaction potential W given by its real Fourier coefficients.
class PotentialSpec {
 public:
  PotentialSpec() = default;
  PotentialSpec(ModeLattice lattice, std::vector<double> w_hat) : lattice_(std::move(lattice)), w_hat_(std::move(w_hat)) {
    if (w_hat_.size() != lattice_.size())
      throw InvalidInput("PotentialSpec: coefficient count does not match lattice");
    for (std::size_t i = 0; i < w_hat_.size(); ++i) {
      if (!std::isfinite(w_hat_[i])) throw InvalidInput("PotentialSpec: non-finite coefficient");
      const double other = w_hat_[lattice_.negated(i)];
      if (std::abs(w_hat_[i] - other) > 1e-14 * std::max(1.0, std::abs(other)))
        throw InvalidInput("PotentialSpec: coefficients must satisfy w(n) = w(-n)");
    }
  }

  /// d=1 potential from coefficients w_1..w_K of the nonzero modes (w_0 = 0).
  static PotentialSpec cosine_series(const std::vector<double>& w_pos) {
    const int k = static_cast<int>(w_pos.size());
    ModeLattice lat(1, k);
    std::vector<double> w(lat.size(), 0.0);
    for (int n = 1; n <= k; ++n) {
      w[static_cast<std::size_t>(k + n)] = w_pos[static_cast<std::size_t>(n - 1)];
      w[static_cast<std::size_t>(k - n)] = w_pos[static_cast<std::size_t>(n - 1)];
    }
    return PotentialSpec(lat, std::move(w));
  }

  /// W(x) = -cos(2 pi x), the Kuramoto interaction.
  static PotentialSpec kuramoto() { return cosine_series({-0.5}); }

  const ModeLattice& lattice() const { return lattice_; }
  const std::vector<double>& w_hat() const { return w_hat_; }
  int dim() const { return lattice_.dim(); }

  double at(const Mode& n) const {
    auto idx = lattice_.find(n);
    return idx ? w_hat_[*idx] : 0.0;
  }

 private:
  ModeLattice lattice_;
  std::vector<double> w_hat_;
};

struct HStability {
  bool h_stable = true;
  Mode worst_mode{};
  double worst_value = std::numeric_limits<double>::infinity();
};

/// H-stable iff every coefficient is >= -1e-14.
inline HStability h_stability_check(const PotentialSpec& potential) {
  HStability out;
  const ModeLattice& lat = potential.lattice();
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const double w = potential.w_hat()[i];
    if (w < out.worst_value) {
      out.worst_value = w;
      out.worst_mode = lat.mode(i);
    }
  }
  out.h_stable = out.worst_value >= -1e-14;
  return out;
}

}  // namespace chaosbench
