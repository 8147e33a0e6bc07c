#pragma once

#include "crad/cvec.hpp"

namespace crad {

/// A special-function value with an estimate of the evaluation method's
/// truncation and rounding error (absolute).
struct SpecFunResult {
  cplx value;
  double est_error;
};

/// J_n(x) for n in {0, 1}, x >= 0. Absolute error below 1e-12 for x <= 60.
double bessel_j(int n, double x);

/// Y_n(x) for n in {0, 1}, x > 0.
double bessel_y(int n, double x);

/// H_n^(1)(x) = J_n(x) + i Y_n(x) for n in {0, 1}, x > 0.
cplx hankel1(int n, double x);

/// H_0^(1)(x) and H_1^(1)(x) from one evaluation, x > 0.
void hankel01(double x, cplx& h0, cplx& h1);

/// hankel1 together with its error estimate.
SpecFunResult hankel1_result(int n, double x);

/// Upper incomplete gamma function Gamma(beta, d) = int_d^inf t^(beta-1) e^(-t) dt,
/// relative error below 1e-10. gamma_upper(beta, 0) is Gamma(beta).
double gamma_upper(double beta, double d);

}  // namespace crad
