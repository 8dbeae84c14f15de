#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<double>> yields second
// derivatives.

#include <array>
#include <cmath>
#include <cstddef>

namespace coneym {

template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(double value) : v(value), d(0.0) {}  // NOLINT(google-explicit-constructor)
  Dual(T value, T deriv) : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
  }
};

template <class T>
T value_of(const T& x) {
  return x;
}
template <class T>
auto value_of(const Dual<T>& x) {
  return value_of(x.v);
}

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  const T s = sqrt(x.v);
  return {s, x.d / (2.0 * s)};
}
template <class T>
Dual<T> exp(const Dual<T>& x) {
  const T e = exp(x.v);
  return {e, e * x.d};
}
template <class T>
Dual<T> log(const Dual<T>& x) {
  return {log(x.v), x.d / x.v};
}
template <class T>
Dual<T> sin(const Dual<T>& x) {
  return {sin(x.v), cos(x.v) * x.d};
}
template <class T>
Dual<T> cos(const Dual<T>& x) {
  return {cos(x.v), -sin(x.v) * x.d};
}

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

/// d/dx_a of f at x, for f templated on its scalar type.
template <class F, std::size_t N>
double partial(F&& f, const std::array<double, N>& x, int a) {
  std::array<Dual1, N> xd;
  for (std::size_t i = 0; i < N; ++i) xd[i] = Dual1(x[i], static_cast<int>(i) == a ? 1.0 : 0.0);
  return f(xd).d;
}

/// d^2/dx_a dx_b of f at x.
template <class F, std::size_t N>
double second_partial(F&& f, const std::array<double, N>& x, int a, int b) {
  std::array<Dual2, N> xd;
  for (std::size_t i = 0; i < N; ++i)
    xd[i] = Dual2(Dual1(x[i], static_cast<int>(i) == b ? 1.0 : 0.0),
                  Dual1(static_cast<int>(i) == a ? 1.0 : 0.0, 0.0));
  return f(xd).d.d;
}

}  // namespace coneym
