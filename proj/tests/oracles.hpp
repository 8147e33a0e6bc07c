#pragma once

// Reference computations used only by the tests. Each one is written
// independently of the library code it checks.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using std::numbers::pi;

/// Gauss-Legendre nodes by Golub-Welsch-free Newton iteration, on [-1, 1].
inline void gauss_nodes(int n, std::vector<long double>& x, std::vector<long double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    long double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    long double pp = 0;
    for (int it = 0; it < 200; ++it) {
      long double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (z * p1 - p0) / (z * z - 1);
      long double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-19L) break;
    }
    x[i] = z;
    w[i] = 2 / ((1 - z * z) * pp * pp);
  }
}

/// Composite Gauss rule with `panels` equal panels of order n on [a, b].
template <class F>
auto composite(F f, double a, double b, int panels = 64, int n = 20) {
  std::vector<long double> x, w;
  gauss_nodes(n, x, w);
  using R = decltype(f(a));
  R sum{};
  const double hw = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * hw;
    for (int i = 0; i < n; ++i) {
      const double t = lo + 0.5 * hw * (1 + static_cast<double>(x[i]));
      sum += static_cast<double>(0.5 * hw * w[i]) * f(t);
    }
  }
  return sum;
}

/// Bessel integral J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt.
inline double bessel_j(int n, double x) {
  return composite([&](double t) { return std::cos(n * t - x * std::sin(t)); }, 0.0, pi, 64, 24) / pi;
}

/// Y_n(x) = (1/pi) int_0^pi sin(x sin t - n t) dt
///        - (1/pi) int_0^inf (e^{n t} + (-1)^n e^{-n t}) e^{-x sinh t} dt.
inline double bessel_y(int n, double x) {
  const double a = composite([&](double t) { return std::sin(x * std::sin(t) - n * t); }, 0.0, pi, 64, 24) / pi;
  const double tmax = std::asinh(60.0 / x) + 2;
  const double sgn = n % 2 == 0 ? 1.0 : -1.0;
  const double b = composite(
      [&](double t) { return (std::exp(n * t) + sgn * std::exp(-n * t)) * std::exp(-x * std::sinh(t)); }, 0.0,
      tmax, 256, 24);
  return a - b / pi;
}

/// Plain double power series of J_1, for locating its zeros.
inline double bessel_j1_series(double x) {
  double term = x / 2, sum = term;
  for (int m = 1; m < 80; ++m) {
    term *= -(x * x / 4) / (m * (m + 1.0));
    sum += term;
  }
  return sum;
}

/// Bisection on [a, b] with a sign change.
template <class F>
double bisect(F f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace oracle
