#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "chaosbench/core/error.hpp"

namespace chaosbench {

inline constexpr int max_dim = 3;

/// Integer frequency vector; only the first `dim` entries are meaningful.
using Mode = std::array<int, max_dim>;

/// Truncated integer lattice {n in Z^d : max_j |n_j| <= M}.
///
/// Modes are enumerated lexicographically with the first coordinate most
/// significant and every coordinate running from -M to M. With this order the
/// index of -n is size()-1-index(n), and the zero mode sits in the middle.
class ModeLattice {
 public:
  ModeLattice() : ModeLattice(1, 0) {}
  ModeLattice(int dim, int cutoff) : dim_(dim), cutoff_(cutoff) {
    if (dim < 1 || dim > max_dim) throw UnsupportedDimension("ModeLattice: dimension must be 1..3");
    if (cutoff < 0) throw InvalidInput("ModeLattice: negative cutoff");
    side_ = 2 * cutoff + 1;
    std::size_t size = 1;
    for (int j = 0; j < dim; ++j) size *= static_cast<std::size_t>(side_);
    auto tables = std::make_shared<Tables>();
    tables->modes.resize(size);
    tables->norm_sq.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t rest = i;
      Mode n{};
      for (int j = dim - 1; j >= 0; --j) {
        n[static_cast<std::size_t>(j)] = static_cast<int>(rest % static_cast<std::size_t>(side_)) - cutoff;
        rest /= static_cast<std::size_t>(side_);
      }
      tables->modes[i] = n;
      double s = 0.0;
      for (int j = 0; j < dim; ++j) s += double(n[j]) * double(n[j]);
      tables->norm_sq[i] = s;
    }
    tables_ = std::move(tables);
  }

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  int side() const { return side_; }
  std::size_t size() const { return tables_->modes.size(); }
  const Mode& mode(std::size_t i) const { return tables_->modes[i]; }
  double norm_sq(std::size_t i) const { return tables_->norm_sq[i]; }
  std::size_t zero_index() const { return size() / 2; }
  std::size_t negated(std::size_t i) const { return size() - 1 - i; }

  int max_abs(std::size_t i) const {
    int m = 0;
    const Mode& n = mode(i);
    for (int j = 0; j < dim_; ++j) m = std::max(m, std::abs(n[j]));
    return m;
  }

  std::optional<std::size_t> find(const Mode& n) const {
    std::size_t idx = 0;
    for (int j = 0; j < dim_; ++j) {
      if (std::abs(n[j]) > cutoff_) return std::nullopt;
      idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(n[j] + cutoff_);
    }
    return idx;
  }

  friend bool operator==(const ModeLattice& a, const ModeLattice& b) {
    return a.dim_ == b.dim_ && a.cutoff_ == b.cutoff_;
  }

 private:
  int dim_;
  int cutoff_;
  int side_ = 1;
  struct Tables {
    std::vector<Mode> modes;
    std::vector<double> norm_sq;
  };
  std::shared_ptr<const Tables> tables_;
};

}  // namespace chaosbench
