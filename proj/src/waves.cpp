#include "crad/waves.hpp"

#include <cmath>
#include <numbers>

#include "crad/errors.hpp"

namespace crad {

namespace {

using std::numbers::pi;

// G = (s z)^a on branch m, as a complex number.
cplx exponent(const BranchExponential& p, Vec2 x, double& r) {
  if (x.y == 0.0 && x.x <= 0.0) throw BranchCutError("branch_exp: point on the branch cut or at the origin");
  if (!(p.s > 0)) throw DomainError("branch_exp: scale s must be positive");
  r = norm(x);
  const double theta = std::atan2(x.y, x.x);
  return std::polar(std::pow(p.s * r, p.a), p.a * (theta + 2 * pi * p.m));
}

}  // namespace

cplx branch_exp(const BranchExponential& p, Vec2 x) {
  double r;
  return std::exp(exponent(p, x, r));
}

WaveSample branch_exp_sample(const BranchExponential& p, Vec2 x) {
  double r;
  const cplx g = exponent(p, x, r);
  const cplx u = std::exp(g);
  // d/dz exp(G) = a G / z exp(G); for an analytic F, grad F = (F', i F').
  const cplx d = p.a * g / cplx(x.x, x.y) * u;
  return {u, {d, cplx(0, 1) * d}};
}

std::array<cplx, 2> branch_exp_gradient(const BranchExponential& p, Vec2 x) {
  return branch_exp_sample(p, x).grad;
}

cplx branch_exp_radial_derivative(const BranchExponential& p, Vec2 x) {
  double r;
  const cplx g = exponent(p, x, r);
  return p.a * g / r * std::exp(g);
}

IkehataWave IkehataWave::make(Vec2 omega, double tau, double t, double k) {
  const double n = norm(omega);
  if (std::abs(n - 1.0) > 1e-12) throw DomainError("IkehataWave: omega must be a unit vector");
  if (!(tau > 0) || !(k > 0)) throw DomainError("IkehataWave: tau and k must be positive");
  return {omega, {-omega.y, omega.x}, tau, t, k};
}

std::array<cplx, 2> IkehataWave::zeta() const {
  const double b = std::sqrt(tau * tau + k * k);
  return {cplx(tau * omega.x, b * omega_perp.x), cplx(tau * omega.y, b * omega_perp.y)};
}

WaveSample ikehata_sample(const IkehataWave& w, Vec2 x) {
  const double re = w.tau * (dot(x, w.omega) - w.t);
  if (re > 700) throw OverflowError("ikehata_wave: tau (x.omega - t) exceeds 700; rescale t");
  const double b = std::sqrt(w.tau * w.tau + w.k * w.k);
  const cplx u = std::polar(std::exp(re), b * dot(x, w.omega_perp));
  const auto z = w.zeta();
  return {u, {z[0] * u, z[1] * u}};
}

cplx ikehata_wave(const IkehataWave& w, Vec2 x) { return ikehata_sample(w, x).value; }

}  // namespace crad
