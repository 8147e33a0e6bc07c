#include "crad/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "crad/errors.hpp"
#include "crad/gauss.hpp"

namespace crad {

namespace {

using std::numbers::pi;
constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

// Beyond this argument the Hankel asymptotic expansion reaches its smallest
// term below 1e-14; below it the long-double series loses fewer than seven digits.
constexpr double kAsymptoticFrom = 17.0;

struct Pair {
  double j, y;
  double err;
};

void check_order(int n) {
  if (n != 0 && n != 1) throw DomainError("Bessel order must be 0 or 1, got " + std::to_string(n));
}

// Ascending series. Y needs x > 0; at x == 0 only J is meaningful.
Pair series(int n, double xd) {
  const long double x = xd;
  const long double z = x / 2;
  const long double q = z * z;
  long double a = 1.0L;  // (-q)^m / (m! (m+n)!)
  long double sum_j = 0.0L, sum_y = 0.0L, abs_sum = 0.0L, harmonic = 0.0L;
  for (int m = 0; m < 200; ++m) {
    if (m > 0) {
      a *= -q / (static_cast<long double>(m) * (m + n));
      harmonic += 1.0L / m;
    }
    sum_j += a;
    abs_sum += std::fabs(a);
    if (n == 0) {
      sum_y -= harmonic * a;
    } else {
      sum_y += a * (2.0L * (harmonic - kEulerGamma) + 1.0L / (m + 1));
    }
    if (m > 2 && std::fabs(a) < 1e-22L * std::fabs(abs_sum)) break;
  }
  const long double eps = std::numeric_limits<long double>::epsilon();
  Pair out{};
  if (n == 0) {
    out.j = static_cast<double>(sum_j);
    if (x > 0) {
      const long double l = std::log(z) + kEulerGamma;
      out.y = static_cast<double>((2.0L / std::numbers::pi_v<long double>) * (l * sum_j + sum_y));
    }
  } else {
    const long double j = z * sum_j;
    out.j = static_cast<double>(j);
    if (x > 0) {
      const long double p = std::numbers::pi_v<long double>;
      out.y = static_cast<double>((2.0L / p) * j * std::log(z) - 2.0L / (p * x) - z * sum_y / p);
    }
  }
  out.err = static_cast<double>(64 * eps * abs_sum * (1 + std::fabs(std::log(std::max(z, 1e-300L))))) +
            4 * std::numeric_limits<double>::epsilon() * std::abs(out.j);
  return out;
}

Pair asymptotic(int n, double x) {
  const double mu = 4.0 * n * n;
  double p = 1.0, q = 0.0, t = 1.0, last = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = t * (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(t)) break;
    t = next;
    last = std::abs(t);
    const int phase = k % 4;
    if (phase == 1) q += t;
    if (phase == 2) p -= t;
    if (phase == 3) q -= t;
    if (phase == 0) p += t;
    if (last < 1e-18) break;
  }
  const double chi = x - (0.5 * n + 0.25) * pi;
  const double amp = std::sqrt(2.0 / (pi * x));
  const double c = std::cos(chi), s = std::sin(chi);
  return {amp * (p * c - q * s), amp * (p * s + q * c),
          amp * (last + 4 * std::numeric_limits<double>::epsilon() * (std::abs(p) + std::abs(q)) * (1 + x))};
}

Pair evaluate(int n, double x) {
  check_order(n);
  if (!std::isfinite(x)) throw DomainError("Bessel argument must be finite");
  return x <= kAsymptoticFrom ? series(n, x) : asymptotic(n, x);
}

}  // namespace

double bessel_j(int n, double x) {
  if (!std::isfinite(x) || x < 0) throw DomainError("bessel_j: argument must be finite and >= 0");
  return evaluate(n, x).j;
}

double bessel_y(int n, double x) {
  if (!(x > 0) || !std::isfinite(x)) throw DomainError("bessel_y: argument must be finite and > 0");
  return evaluate(n, x).y;
}

SpecFunResult hankel1_result(int n, double x) {
  if (!(x > 0) || !std::isfinite(x)) throw DomainError("hankel1: argument must be finite and > 0");
  const Pair p = evaluate(n, x);
  return {cplx(p.j, p.y), p.err};
}

cplx hankel1(int n, double x) { return hankel1_result(n, x).value; }

void hankel01(double x, cplx& h0, cplx& h1) {
  if (!(x > 0) || !std::isfinite(x)) throw DomainError("hankel01: argument must be finite and > 0");
  const Pair p0 = evaluate(0, x), p1 = evaluate(1, x);
  h0 = cplx(p0.j, p0.y);
  h1 = cplx(p1.j, p1.y);
}

double gamma_upper(double beta, double d) {
  if (!(beta > 0) || !std::isfinite(beta)) throw DomainError("gamma_upper: beta must be > 0");
  if (!(d >= 0) || !std::isfinite(d)) throw DomainError("gamma_upper: d must be >= 0");
  if (d == 0) return std::tgamma(beta);
  if (beta == std::floor(beta) && beta <= 170) {
    const int n = static_cast<int>(beta);
    double term = 1.0, sum = 1.0;
    for (int j = 1; j < n; ++j) {
      term *= d / j;
      sum += term;
    }
    return std::tgamma(beta) * std::exp(-d) * sum;
  }
  AdaptiveOptions opt;
  opt.abs_tol = std::numeric_limits<double>::min();
  opt.rel_tol = 1e-14;
  opt.max_intervals = 4000;
  double total = 0.0;
  double tail_from = d;
  if (beta < 1 && d < 1) {
    // w = t^beta removes the t^(beta-1) endpoint singularity.
    auto g = [&](double w) { return std::exp(-std::pow(w, 1.0 / beta)) / beta; };
    total += integrate_adaptive<double>(g, std::pow(d, beta), 1.0, opt).value;
    tail_from = 1.0;
  }
  // t = a + (1 - v)/v maps (0, 1] onto [a, inf).
  auto h = [&](double v) {
    if (v <= 0) return 0.0;
    const double t = tail_from + (1 - v) / v;
    return std::exp((beta - 1) * std::log(t) - t) / (v * v);
  };
  total += integrate_adaptive<double>(h, 0.0, 1.0, opt).value;
  return total;
}

}  // namespace crad
