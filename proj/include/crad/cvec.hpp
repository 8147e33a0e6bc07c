#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace crad {

using cplx = std::complex<double>;

/// Small fixed-size complex vector, used for integrands that return several
/// quantities at once (a field value and its gradient, say).
template <std::size_t N>
struct CVec {
  std::array<cplx, N> c{};

  cplx& operator[](std::size_t i) { return c[i]; }
  const cplx& operator[](std::size_t i) const { return c[i]; }

  CVec& operator+=(const CVec& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] += o.c[i];
    return *this;
  }
  CVec& operator-=(const CVec& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] -= o.c[i];
    return *this;
  }
  CVec& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  CVec& operator*=(cplx s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  friend CVec operator+(CVec a, const CVec& b) { return a += b; }
  friend CVec operator-(CVec a, const CVec& b) { return a -= b; }
  friend CVec operator*(double s, CVec a) { return a *= s; }
  friend CVec operator*(CVec a, double s) { return a *= s; }
  friend CVec operator*(cplx s, CVec a) { return a *= s; }
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const cplx& v) { return std::abs(v); }
template <std::size_t N>
double magnitude(const CVec<N>& v) {
  double m = 0.0;
  for (const auto& x : v.c) m = std::max(m, std::abs(x));
  return m;
}

template <class V>
V zero_value() {
  return V{};
}

/// Fixed-order pairwise (cascade) summation. The grouping depends only on the
/// length of the input, so equal inputs give bit-identical sums.
template <class V>
V pairwise_sum(std::span<const V> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return zero_value<V>();
  if (n <= 8) {
    V acc = xs[0];
    for (std::size_t i = 1; i < n; ++i) acc += xs[i];
    return acc;
  }
  const std::size_t half = n / 2;
  V left = pairwise_sum<V>(xs.subspan(0, half));
  left += pairwise_sum<V>(xs.subspan(half));
  return left;
}

template <class V>
V pairwise_sum(const std::vector<V>& xs) {
  return pairwise_sum<V>(std::span<const V>(xs.data(), xs.size()));
}

}  // namespace crad
