#include <cmath>
#include <numbers>
#include <random>

#include "crad/errors.hpp"
#include "crad/specfun.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crad;
using std::numbers::pi;

TEST_CASE("bessel_j fixed values") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  const double j11 = oracle::bisect(oracle::bessel_j1_series, 3.0, 4.5);
  CHECK(std::abs(j11 - 3.8317059702) < 1e-9);
  CHECK(std::abs(bessel_j(1, 3.8317059702)) <= 1e-9);
  CHECK(std::abs(bessel_j(1, j11)) <= 1e-13);
}

TEST_CASE("bessel_j and bessel_y match integral representations on (0, 60]") {
  for (int n : {0, 1}) {
    for (double x = 0.05; x <= 60.0; x += 0.37) {
      CHECK(std::abs(bessel_j(n, x) - oracle::bessel_j(n, x)) <= 1e-12);
      CHECK(std::abs(bessel_y(n, x) - oracle::bessel_y(n, x)) <= 1e-10);
    }
  }
}

TEST_CASE("series and asymptotic branches agree across the crossover") {
  for (int n : {0, 1}) {
    for (double x = 16.0; x <= 18.0; x += 0.05) {
      CHECK(std::abs(bessel_j(n, x) - oracle::bessel_j(n, x)) <= 1e-12);
      CHECK(std::abs(bessel_y(n, x) - oracle::bessel_y(n, x)) <= 1e-10);
    }
  }
}

TEST_CASE("hankel1 values") {
  const cplx h = hankel1(0, 1.0);
  CHECK(std::abs(h.real() - 0.76519768656) < 1e-10);
  CHECK(std::abs(h.imag() - 0.08825696421) < 1e-10);
  const double w = bessel_j(1, 1.0) * bessel_y(0, 1.0) - bessel_j(0, 1.0) * bessel_y(1, 1.0);
  CHECK(std::abs(w - 2 / pi) < 1e-12);
  const cplx lead = std::sqrt(2 / (pi * 50.0)) * std::polar(1.0, 50.0 - pi / 4);
  CHECK(std::abs(hankel1(0, 50.0) - lead) < 0.01 * std::abs(lead));
  for (double x : {1e-6, 1e-3, 0.5, 7.0, 20.0, 59.0}) {
    for (int n : {0, 1}) {
      CHECK(std::abs(hankel1(n, x) - cplx(bessel_j(n, x), bessel_y(n, x))) <= 1e-14 * std::abs(hankel1(n, x)));
      cplx h0, h1;
      hankel01(x, h0, h1);
      CHECK(hankel1(0, x) == h0);
      CHECK(hankel1(1, x) == h1);
    }
  }
}

TEST_CASE("hankel1 error estimate covers the observed error") {
  for (double x = 0.1; x < 60; x += 1.3) {
    for (int n : {0, 1}) {
      const auto r = hankel1_result(n, x);
      const cplx ref(oracle::bessel_j(n, x), oracle::bessel_y(n, x));
      CHECK(std::abs(r.value - ref) <= r.est_error + 2e-12);
    }
  }
}

TEST_CASE("small-argument Hankel behaviour") {
  // Y0(x) ~ (2/pi)(ln(x/2) + gamma), Y1(x) ~ -2/(pi x).
  const double x = 1e-6;
  CHECK(std::abs(bessel_y(0, x) - (2 / pi) * (std::log(x / 2) + 0.5772156649015329)) < 1e-10);
  CHECK(std::abs(bessel_y(1, x) * x + 2 / pi) < 1e-10);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(bessel_j(0, std::nan("")), DomainError);
  CHECK_THROWS_AS(bessel_j(2, 1.0), DomainError);
  CHECK_THROWS_AS(hankel1(0, 0.0), DomainError);
  CHECK_THROWS_AS(hankel1(1, -1.0), DomainError);
  CHECK_THROWS_AS(gamma_upper(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(gamma_upper(-1.0, 1.0), DomainError);
}

TEST_CASE("J0' = -J1 by finite differences") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.01, 40.0);
  const double h = 1e-4;
  for (int i = 0; i < 50; ++i) {
    const double x = u(gen);
    const double d = (bessel_j(0, x + h) - bessel_j(0, x - h)) / (2 * h);
    CHECK(std::abs(d + bessel_j(1, x)) <= 1e-6);
  }
}

TEST_CASE("gamma_upper closed forms") {
  CHECK(gamma_upper(4, 0) == doctest::Approx(6.0).epsilon(1e-14));
  for (double d : {0.1, 1.0, 3.0, 17.5}) CHECK(std::abs(gamma_upper(1, d) / std::exp(-d) - 1) < 1e-12);
  CHECK(std::abs(gamma_upper(4, 10) / (1366 * std::exp(-10.0)) - 1) < 1e-12);
  CHECK(std::abs(gamma_upper(4, 10) - 0.062018) < 5e-6);
}

TEST_CASE("gamma_upper for non-integer beta") {
  // Gamma(1/2, d) = sqrt(pi) erfc(sqrt(d)); Gamma(3/2, d) = sqrt(d) e^-d + Gamma(1/2, d)/2.
  for (double d : {0.0, 1e-4, 0.3, 1.0, 2.5, 9.0, 30.0}) {
    const double g12 = std::sqrt(pi) * std::erfc(std::sqrt(d));
    CHECK(std::abs(gamma_upper(0.5, d) / g12 - 1) < 1e-10);
    const double g32 = std::sqrt(d) * std::exp(-d) + 0.5 * g12;
    CHECK(std::abs(gamma_upper(1.5, d) / g32 - 1) < 1e-10);
  }
  // Gamma(4.5, d) through the recurrence Gamma(b+1, d) = b Gamma(b, d) + d^b e^-d.
  for (double d : {0.5, 4.0, 12.0}) {
    double g = std::sqrt(pi) * std::erfc(std::sqrt(d));
    for (double b = 0.5; b < 4.5; b += 1) g = b * g + std::pow(d, b) * std::exp(-d);
    CHECK(std::abs(gamma_upper(4.5, d) / g - 1) < 1e-10);
  }
}

TEST_CASE("gamma_upper tail bound 2^beta Gamma(beta) e^{-d/2}") {
  for (double beta : {1.0, 2.0, 4.0, 8.0})
    for (double d = 0.5; d <= 20.0; d += 0.5)
      CHECK(gamma_upper(beta, d) <= std::pow(2.0, beta) * gamma_upper(beta, 0) * std::exp(-d / 2));
}
