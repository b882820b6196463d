#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace chaosbench {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011 constants).
/// Stateless: the same (counter, key) always maps to the same 128 bits, so
/// every random number in a run is addressed rather than drawn in sequence.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter c, Key k) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
      c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return c;
  }

  static Key key_from_seed(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }
};

namespace detail {

// 53 random bits mapped to the open interval (0, 1).
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t u = (std::uint64_t{hi} << 32 | lo) >> 11;
  return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Two uniforms in (0,1) from one Philox block.
inline std::array<double, 2> philox_uniform2(std::uint64_t seed, const Philox4x32::Counter& ctr) {
  const auto r = Philox4x32::block(ctr, Philox4x32::key_from_seed(seed));
  return {detail::open_unit(r[0], r[1]), detail::open_unit(r[2], r[3])};
}

/// Two independent standard normals (Box-Muller) from one Philox block.
inline std::array<double, 2> philox_normal2(std::uint64_t seed, const Philox4x32::Counter& ctr) {
  const auto u = philox_uniform2(seed, ctr);
  const double rad = std::sqrt(-2.0 * std::log(u[0]));
  const double th = 2.0 * std::numbers::pi * u[1];
  return {rad * std::cos(th), rad * std::sin(th)};
}

/// Stream tags keep the increments and the initial draws apart.
enum class RngStream : std::uint32_t { increments = 0, initial = 1, rejection = 2 };

/// Gaussian increments addressed by (seed, replica, step, slot), where slot =
/// particle * dim + coordinate. Slot j is independent of the particle count,
/// so runs at different N with the same seed share their noise (common
/// random numbers).
struct PhiloxNoise {
  std::uint64_t seed = 0;

  void gaussians(std::uint32_t replica, std::uint32_t step, std::span<double> out) const {
    const std::size_t n = out.size();
    for (std::size_t j = 0; j < n; j += 2) {
      const Philox4x32::Counter ctr{static_cast<std::uint32_t>(j / 2), step, replica,
                                    static_cast<std::uint32_t>(RngStream::increments)};
      const auto g = philox_normal2(seed, ctr);
      out[j] = g[0];
      if (j + 1 < n) out[j + 1] = g[1];
    }
  }
};

/// Test hook: no noise at all.
struct ZeroNoise {
  void gaussians(std::uint32_t, std::uint32_t, std::span<double> out) const {
    for (auto& v : out) v = 0.0;
  }
};

template <class T>
concept NoiseSource = requires(const T& n, std::uint32_t r, std::uint32_t k, std::span<double> out) {
  n.gaussians(r, k, out);
};

}  // namespace chaosbench
