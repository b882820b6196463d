#pragma once

#include <complex>

namespace chaosbench {

/// Complex hyperdual number a + b e1 + c e2 + d e1 e2 with e1^2 = e2^2 = 0.
/// Propagates one first derivative along each of two directions and their
/// mixed second derivative exactly (no truncation error).
struct HyperDual {
  using C = std::complex<double>;
  C a{}, b{}, c{}, d{};

  HyperDual() = default;
  HyperDual(C v) : a(v) {}  // NOLINT(google-explicit-constructor)
  HyperDual(double v) : a(v) {}  // NOLINT(google-explicit-constructor)
  HyperDual(C a_, C b_, C c_, C d_) : a(a_), b(b_), c(c_), d(d_) {}

  HyperDual& operator+=(const HyperDual& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    d += o.d;
    return *this;
  }
  HyperDual& operator-=(const HyperDual& o) {
    a -= o.a;
    b -= o.b;
    c -= o.c;
    d -= o.d;
    return *this;
  }
  HyperDual& operator*=(const HyperDual& o) { return *this = *this * o; }

  friend HyperDual operator+(HyperDual x, const HyperDual& y) { return x += y; }
  friend HyperDual operator-(HyperDual x, const HyperDual& y) { return x -= y; }
  friend HyperDual operator-(const HyperDual& x) { return {-x.a, -x.b, -x.c, -x.d}; }
  friend HyperDual operator*(const HyperDual& x, const HyperDual& y) {
    return {x.a * y.a, x.a * y.b + x.b * y.a, x.a * y.c + x.c * y.a,
            x.a * y.d + x.b * y.c + x.c * y.b + x.d * y.a};
  }
  friend HyperDual operator/(const HyperDual& x, const HyperDual& y) { return x * inverse(y); }

  // apply a scalar function with value f0 and derivatives f1, f2 at a
  HyperDual chain(C f0, C f1, C f2) const { return {f0, f1 * b, f1 * c, f1 * d + f2 * b * c}; }

  friend HyperDual inverse(const HyperDual& x) {
    const C inv = 1.0 / x.a;
    return x.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
  }
  friend HyperDual sqrt(const HyperDual& x) {
    const C s = std::sqrt(x.a);
    return x.chain(s, 0.5 / s, -0.25 / (s * x.a));
  }
};

inline std::complex<double> value_of(const std::complex<double>& z) { return z; }
inline std::complex<double> value_of(const HyperDual& z) { return z.a; }

}  // namespace chaosbench
