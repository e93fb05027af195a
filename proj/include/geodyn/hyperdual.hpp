#pragma once

#include <cmath>
#include <ostream>

namespace geodyn {

/// Hyper-dual number a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0.
///
/// Seeding e1 along x_i and e2 along x_j yields f, df/dx_i, df/dx_j and the
/// exact mixed second derivative d2f/dx_i dx_j in one evaluation, with no
/// truncation error.
template <typename T>
struct HyperDual {
  T re{};
  T e1{};
  T e2{};
  T e12{};

  constexpr HyperDual() = default;
  constexpr HyperDual(T value) : re(value) {}  // NOLINT(google-explicit-constructor)
  constexpr HyperDual(T value, T d1, T d2, T d12) : re(value), e1(d1), e2(d2), e12(d12) {}

  constexpr HyperDual& operator+=(const HyperDual& o) {
    re += o.re; e1 += o.e1; e2 += o.e2; e12 += o.e12;
    return *this;
  }
  constexpr HyperDual& operator-=(const HyperDual& o) {
    re -= o.re; e1 -= o.e1; e2 -= o.e2; e12 -= o.e12;
    return *this;
  }
  constexpr HyperDual& operator*=(const HyperDual& o) { return *this = *this * o; }
  constexpr HyperDual& operator/=(const HyperDual& o) { return *this = *this / o; }

  friend constexpr HyperDual operator+(HyperDual a, const HyperDual& b) { return a += b; }
  friend constexpr HyperDual operator-(HyperDual a, const HyperDual& b) { return a -= b; }
  friend constexpr HyperDual operator-(const HyperDual& a) { return {-a.re, -a.e1, -a.e2, -a.e12}; }
  friend constexpr HyperDual operator*(const HyperDual& a, const HyperDual& b) {
    return {a.re * b.re, a.e1 * b.re + a.re * b.e1, a.e2 * b.re + a.re * b.e2,
            a.e12 * b.re + a.e1 * b.e2 + a.e2 * b.e1 + a.re * b.e12};
  }
  friend constexpr HyperDual operator/(const HyperDual& a, const HyperDual& b) {
    return a * inverse(b);
  }

  friend constexpr bool operator<(const HyperDual& a, const HyperDual& b) { return a.re < b.re; }
  friend constexpr bool operator>(const HyperDual& a, const HyperDual& b) { return a.re > b.re; }

  friend std::ostream& operator<<(std::ostream& os, const HyperDual& x) {
    return os << '(' << x.re << ", " << x.e1 << ", " << x.e2 << ", " << x.e12 << ')';
  }
};

/// Applies a scalar function given its value and first two derivatives at re.
template <typename T>
constexpr HyperDual<T> chain(const HyperDual<T>& x, T f, T df, T d2f) {
  return {f, df * x.e1, df * x.e2, df * x.e12 + d2f * x.e1 * x.e2};
}

template <typename T>
constexpr HyperDual<T> inverse(const HyperDual<T>& x) {
  const T inv = T(1) / x.re;
  return chain(x, inv, -inv * inv, T(2) * inv * inv * inv);
}

template <typename T>
HyperDual<T> sin(const HyperDual<T>& x) {
  using std::sin, std::cos;
  return chain(x, sin(x.re), cos(x.re), -sin(x.re));
}
template <typename T>
HyperDual<T> cos(const HyperDual<T>& x) {
  using std::sin, std::cos;
  return chain(x, cos(x.re), -sin(x.re), -cos(x.re));
}
template <typename T>
HyperDual<T> tan(const HyperDual<T>& x) {
  using std::tan;
  const T t = tan(x.re);
  const T d = T(1) + t * t;
  return chain(x, t, d, T(2) * t * d);
}
template <typename T>
HyperDual<T> exp(const HyperDual<T>& x) {
  using std::exp;
  const T e = exp(x.re);
  return chain(x, e, e, e);
}
template <typename T>
HyperDual<T> log(const HyperDual<T>& x) {
  using std::log;
  return chain(x, log(x.re), T(1) / x.re, T(-1) / (x.re * x.re));
}
template <typename T>
HyperDual<T> sqrt(const HyperDual<T>& x) {
  using std::sqrt;
  const T s = sqrt(x.re);
  return chain(x, s, T(0.5) / s, T(-0.25) / (s * x.re));
}
template <typename T>
HyperDual<T> pow(const HyperDual<T>& x, T p) {
  using std::pow;
  return chain(x, pow(x.re, p), p * pow(x.re, p - T(1)), p * (p - T(1)) * pow(x.re, p - T(2)));
}
template <typename T>
HyperDual<T> pow(const HyperDual<T>& x, const HyperDual<T>& p) {
  return exp(p * log(x));
}
template <typename T>
HyperDual<T> abs(const HyperDual<T>& x) {
  return x.re < T(0) ? -x : x;
}

template <typename T>
constexpr T value_of(const HyperDual<T>& x) { return x.re; }
constexpr double value_of(double x) { return x; }

/// Integer power by repeated multiplication; exact for polynomial fields.
template <typename S>
S ipow(S base, int exponent) {
  S result(1.0);
  bool negative = exponent < 0;
  unsigned e = negative ? static_cast<unsigned>(-exponent) : static_cast<unsigned>(exponent);
  while (e) {
    if (e & 1u) result = result * base;
    base = base * base;
    e >>= 1u;
  }
  if (negative) return S(1.0) / result;
  return result;
}

using Dual2 = HyperDual<double>;

}  // namespace geodyn
