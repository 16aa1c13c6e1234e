#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <ostream>

namespace sorbd {

/// Bi-complex number a + i1 b + i2 c + i1i2 d with i1^2 = i2^2 = -1 and
/// i1 i2 = i2 i1. Perturbing two inputs along i1 and i2 and reading the i1i2
/// component gives second derivatives with no subtractive cancellation.
struct BiComplex {
  double re = 0.0, i1 = 0.0, i2 = 0.0, i12 = 0.0;

  BiComplex() = default;
  BiComplex(double r) : re(r) {}
  BiComplex(double r, double a, double b, double c) : re(r), i1(a), i2(b), i12(c) {}

  BiComplex operator-() const { return {-re, -i1, -i2, -i12}; }

  BiComplex& operator+=(const BiComplex& o) {
    re += o.re;
    i1 += o.i1;
    i2 += o.i2;
    i12 += o.i12;
    return *this;
  }
  BiComplex& operator-=(const BiComplex& o) {
    re -= o.re;
    i1 -= o.i1;
    i2 -= o.i2;
    i12 -= o.i12;
    return *this;
  }
  BiComplex& operator*=(const BiComplex& o) {
    *this = *this * o;
    return *this;
  }
  BiComplex& operator/=(const BiComplex& o) {
    *this = *this / o;
    return *this;
  }

  friend BiComplex operator+(const BiComplex& x, const BiComplex& y) {
    return {x.re + y.re, x.i1 + y.i1, x.i2 + y.i2, x.i12 + y.i12};
  }
  friend BiComplex operator-(const BiComplex& x, const BiComplex& y) {
    return {x.re - y.re, x.i1 - y.i1, x.i2 - y.i2, x.i12 - y.i12};
  }
  // pairwise-balanced sums make multiplication bitwise commutative
  friend BiComplex operator*(const BiComplex& x, const BiComplex& y) {
    return {(x.re * y.re + x.i12 * y.i12) - (x.i1 * y.i1 + x.i2 * y.i2),
            (x.re * y.i1 + x.i1 * y.re) - (x.i2 * y.i12 + x.i12 * y.i2),
            (x.re * y.i2 + x.i2 * y.re) - (x.i1 * y.i12 + x.i12 * y.i1),
            (x.re * y.i12 + x.i12 * y.re) + (x.i1 * y.i2 + x.i2 * y.i1)};
  }
  friend BiComplex operator/(const BiComplex& x, const BiComplex& y);

  friend bool operator==(const BiComplex& x, const BiComplex& y) {
    return x.re == y.re && x.i1 == y.i1 && x.i2 == y.i2 && x.i12 == y.i12;
  }
  friend bool operator!=(const BiComplex& x, const BiComplex& y) { return !(x == y); }
};

namespace detail {

// z = p1 + i2 p2 with p1 = re + i1 b and p2 = c + i1 d viewed as ordinary
// complex numbers over i1. Keeping the two halves separate preserves the
// magnitude grading that complex-step perturbations rely on: components of
// size h and h^2 are never added to O(1) parts.
inline std::complex<double> part1(const BiComplex& z) { return {z.re, z.i1}; }
inline std::complex<double> part2(const BiComplex& z) { return {z.i2, z.i12}; }
inline BiComplex join(const std::complex<double>& p1, const std::complex<double>& p2) {
  return {p1.real(), p1.imag(), p2.real(), p2.imag()};
}

/// Idempotent decomposition z = alpha e+ + beta e- with e+- = (1 +- i1 i2)/2.
/// Accurate for O(1) arguments; used only where no graded identity exists.
inline void toIdempotent(const BiComplex& z, std::complex<double>& alpha,
                         std::complex<double>& beta) {
  alpha = {z.re + z.i12, z.i1 - z.i2};
  beta = {z.re - z.i12, z.i1 + z.i2};
}

inline BiComplex fromIdempotent(const std::complex<double>& alpha,
                                const std::complex<double>& beta) {
  return {0.5 * (alpha.real() + beta.real()), 0.5 * (alpha.imag() + beta.imag()),
          0.5 * (beta.imag() - alpha.imag()), 0.5 * (alpha.real() - beta.real())};
}

inline bool secondPartIsTiny(const BiComplex& z) {
  const double n1 = std::abs(z.re) + std::abs(z.i1);
  const double n2 = std::abs(z.i2) + std::abs(z.i12);
  return n2 <= 1e-8 * std::max(n1, 1e-300);
}

}  // namespace detail

inline BiComplex operator/(const BiComplex& x, const BiComplex& y) {
  // y^-1 = (p1 - i2 p2) / (p1^2 + p2^2), all in complex arithmetic
  const std::complex<double> y1 = detail::part1(y), y2 = detail::part2(y);
  const std::complex<double> den = y1 * y1 + y2 * y2;
  return x * detail::join(y1 / den, -y2 / den);
}

// sin/cos/exp split exactly over z = p1 + i2 p2 (angle-addition identities
// with cos(i2 w) = cosh(w), sin(i2 w) = i2 sinh(w)).
inline BiComplex sin(const BiComplex& z) {
  const std::complex<double> p1 = detail::part1(z), p2 = detail::part2(z);
  return detail::join(std::sin(p1) * std::cosh(p2), std::cos(p1) * std::sinh(p2));
}
inline BiComplex cos(const BiComplex& z) {
  const std::complex<double> p1 = detail::part1(z), p2 = detail::part2(z);
  return detail::join(std::cos(p1) * std::cosh(p2), -std::sin(p1) * std::sinh(p2));
}
inline BiComplex exp(const BiComplex& z) {
  const std::complex<double> p1 = detail::part1(z), p2 = detail::part2(z);
  const std::complex<double> e = std::exp(p1);
  return detail::join(e * std::cos(p2), e * std::sin(p2));
}

inline BiComplex sqrt(const BiComplex& z) {
  if (detail::secondPartIsTiny(z)) {
    const std::complex<double> p1 = detail::part1(z), p2 = detail::part2(z);
    const std::complex<double> s = std::sqrt(p1);
    return detail::join(s + p2 * p2 / (8.0 * s * s * s), p2 / (2.0 * s));
  }
  std::complex<double> a, b;
  detail::toIdempotent(z, a, b);
  return detail::fromIdempotent(std::sqrt(a), std::sqrt(b));
}

inline BiComplex log(const BiComplex& z) {
  if (detail::secondPartIsTiny(z)) {
    const std::complex<double> p1 = detail::part1(z), p2 = detail::part2(z);
    return detail::join(std::log(p1) + p2 * p2 / (2.0 * p1 * p1), p2 / p1);
  }
  std::complex<double> a, b;
  detail::toIdempotent(z, a, b);
  return detail::fromIdempotent(std::log(a), std::log(b));
}

/// Magnitude proxy for pivoting in generic linear solves; the physical value
/// lives in the real part, the imaginary parts are infinitesimal.
inline double pivotWeight(const BiComplex& z) { return std::abs(z.re); }

inline std::ostream& operator<<(std::ostream& os, const BiComplex& z) {
  return os << z.re << " + " << z.i1 << "*i1 + " << z.i2 << "*i2 + " << z.i12 << "*i12";
}

}  // namespace sorbd

namespace Eigen {

template <>
struct NumTraits<sorbd::BiComplex> : GenericNumTraits<sorbd::BiComplex> {
  typedef sorbd::BiComplex Real;
  typedef sorbd::BiComplex NonInteger;
  typedef sorbd::BiComplex Nested;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 4,
    MulCost = 16,
  };
  static inline sorbd::BiComplex epsilon() { return sorbd::BiComplex(1e-16); }
  static inline sorbd::BiComplex dummy_precision() { return sorbd::BiComplex(1e-12); }
  static inline int digits10() { return 15; }
};

}  // namespace Eigen
