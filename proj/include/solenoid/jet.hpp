#pragma once

// Truncated Taylor series in one variable: c[n] = f^(n)(t0) / n!.

#include <array>
#include <cmath>
#include <complex>

namespace solenoid {

template <typename T, int N>
struct Jet {
  std::array<T, N + 1> c{};

  static Jet constant(T v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  static Jet variable(T v) {
    Jet j;
    j.c[0] = v;
    if constexpr (N >= 1) j.c[1] = T(1);
    return j;
  }

  /// n-th derivative at the expansion point.
  T derivative(int n) const {
    T f = c[n];
    for (int i = 2; i <= n; ++i) f *= T(i);
    return f;
  }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i <= N; ++i) c[i] += o.c[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i <= N; ++i) c[i] -= o.c[i];
    return *this;
  }
  Jet& operator*=(T s) {
    for (auto& x : c) x *= s;
    return *this;
  }
};

template <typename T, int N>
Jet<T, N> operator+(Jet<T, N> a, const Jet<T, N>& b) { return a += b; }
template <typename T, int N>
Jet<T, N> operator-(Jet<T, N> a, const Jet<T, N>& b) { return a -= b; }
template <typename T, int N>
Jet<T, N> operator*(Jet<T, N> a, T s) { return a *= s; }
template <typename T, int N>
Jet<T, N> operator*(T s, Jet<T, N> a) { return a *= s; }

template <typename T, int N>
Jet<T, N> operator-(const Jet<T, N>& a) {
  Jet<T, N> r = a;
  for (auto& x : r.c) x = -x;
  return r;
}

template <typename T, int N>
Jet<T, N> operator*(const Jet<T, N>& a, const Jet<T, N>& b) {
  Jet<T, N> r;
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i <= n; ++i) r.c[n] += a.c[i] * b.c[n - i];
  return r;
}

template <typename T, int N>
Jet<T, N> operator/(const Jet<T, N>& a, const Jet<T, N>& b) {
  Jet<T, N> q;
  for (int n = 0; n <= N; ++n) {
    T s = a.c[n];
    for (int i = 1; i <= n; ++i) s -= b.c[i] * q.c[n - i];
    q.c[n] = s / b.c[0];
  }
  return q;
}

template <typename T, int N>
Jet<T, N> exp(const Jet<T, N>& a) {
  using std::exp;
  Jet<T, N> e;
  e.c[0] = exp(a.c[0]);
  for (int n = 1; n <= N; ++n) {
    T s{};
    for (int i = 1; i <= n; ++i) s += T(i) * a.c[i] * e.c[n - i];
    e.c[n] = s / T(n);
  }
  return e;
}

}  // namespace solenoid
