#pragma once

// Forward-mode dual numbers with a fixed number of tangent directions.

#include <array>
#include <cmath>
#include <cstddef>

namespace leafgeo {

template <std::size_t N>
struct Dual {
  double value = 0.0;
  std::array<double, N> grad{};

  constexpr Dual() = default;
  constexpr Dual(double v) : value(v) {}  // NOLINT: implicit lift of constants
  constexpr Dual(double v, const std::array<double, N>& g) : value(v), grad(g) {}

  /// Independent variable seeded along direction `i`.
  static constexpr Dual variable(double v, std::size_t i) {
    Dual d(v);
    d.grad[i] = 1.0;
    return d;
  }

  constexpr Dual& operator+=(const Dual& o) {
    value += o.value;
    for (std::size_t i = 0; i < N; ++i) grad[i] += o.grad[i];
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    value -= o.value;
    for (std::size_t i = 0; i < N; ++i) grad[i] -= o.grad[i];
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    for (std::size_t i = 0; i < N; ++i) grad[i] = grad[i] * o.value + value * o.grad[i];
    value *= o.value;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.value;
    for (std::size_t i = 0; i < N; ++i) grad[i] = (grad[i] - value * inv * o.grad[i]) * inv;
    value *= inv;
    return *this;
  }
};

template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a) {
  a.value = -a.value;
  for (auto& g : a.grad) g = -g;
  return a;
}

template <std::size_t N>
constexpr Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <std::size_t N>
constexpr Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <std::size_t N>
constexpr Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }

template <std::size_t N>
constexpr Dual<N> operator+(Dual<N> a, double b) { a.value += b; return a; }
template <std::size_t N>
constexpr Dual<N> operator+(double a, Dual<N> b) { b.value += a; return b; }
template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a, double b) { a.value -= b; return a; }
template <std::size_t N>
constexpr Dual<N> operator-(double a, const Dual<N>& b) { return Dual<N>(a) - b; }
template <std::size_t N>
constexpr Dual<N> operator*(Dual<N> a, double b) {
  a.value *= b;
  for (auto& g : a.grad) g *= b;
  return a;
}
template <std::size_t N>
constexpr Dual<N> operator*(double a, Dual<N> b) { return b * a; }
template <std::size_t N>
constexpr Dual<N> operator/(Dual<N> a, double b) { return a * (1.0 / b); }
template <std::size_t N>
constexpr Dual<N> operator/(double a, const Dual<N>& b) { return Dual<N>(a) / b; }

namespace detail {
// f(a) with f'(a) = slope.
template <std::size_t N>
constexpr Dual<N> chain(const Dual<N>& a, double f, double slope) {
  Dual<N> r(f);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = slope * a.grad[i];
  return r;
}
}  // namespace detail

template <std::size_t N>
Dual<N> exp(const Dual<N>& a) {
  const double e = std::exp(a.value);
  return detail::chain(a, e, e);
}
template <std::size_t N>
Dual<N> log(const Dual<N>& a) { return detail::chain(a, std::log(a.value), 1.0 / a.value); }
template <std::size_t N>
Dual<N> sqrt(const Dual<N>& a) {
  const double s = std::sqrt(a.value);
  return detail::chain(a, s, 0.5 / s);
}
template <std::size_t N>
Dual<N> sin(const Dual<N>& a) { return detail::chain(a, std::sin(a.value), std::cos(a.value)); }
template <std::size_t N>
Dual<N> cos(const Dual<N>& a) { return detail::chain(a, std::cos(a.value), -std::sin(a.value)); }
template <std::size_t N>
Dual<N> sinh(const Dual<N>& a) { return detail::chain(a, std::sinh(a.value), std::cosh(a.value)); }
template <std::size_t N>
Dual<N> cosh(const Dual<N>& a) { return detail::chain(a, std::cosh(a.value), std::sinh(a.value)); }
template <std::size_t N>
Dual<N> tanh(const Dual<N>& a) {
  const double t = std::tanh(a.value);
  return detail::chain(a, t, 1.0 - t * t);
}

/// Integer powers keep exactness at a = 0 (pow(0, n) has a finite derivative).
template <std::size_t N>
Dual<N> ipow(const Dual<N>& a, int n) {
  if (n == 0) return Dual<N>(1.0);
  const double slope = n * std::pow(a.value, n - 1);
  return detail::chain(a, std::pow(a.value, n), slope);
}

/// General power a^b; requires a > 0 unless b is constant (handled by ipow / chain).
template <std::size_t N>
Dual<N> pow(const Dual<N>& a, const Dual<N>& b) {
  return exp(b * log(a));
}

// Scalar overloads so templated code can call ipow on plain doubles.
inline double ipow(double a, int n) { return std::pow(a, n); }

}  // namespace leafgeo
