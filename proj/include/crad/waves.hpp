#pragma once

#include <array>

#include "crad/cvec.hpp"
#include "crad/geometry.hpp"

namespace crad {

/// u0(s x) = exp(G) with G = (s z)^a on branch m, z = x1 + i x2, arg z in (-pi, pi].
/// The branch value of z^a is r^a exp(i a (theta + 2 pi m)). With a = 1/2, m = 1
/// this is exp(sqrt(s r) (cos(theta/2 + pi) + i sin(theta/2 + pi))), which
/// decays in every direction off the cut.
struct BranchExponential {
  double a = 0.5;
  int m = 1;
  double s = 1.0;
};

/// Throws BranchCutError on the closed negative real axis (x2 == 0, x1 <= 0).
cplx branch_exp(const BranchExponential& p, Vec2 x);
cplx branch_exp_radial_derivative(const BranchExponential& p, Vec2 x);
std::array<cplx, 2> branch_exp_gradient(const BranchExponential& p, Vec2 x);

/// Value and gradient in one evaluation.
struct WaveSample {
  cplx value;
  std::array<cplx, 2> grad;
};
WaveSample branch_exp_sample(const BranchExponential& p, Vec2 x);

/// exp(x . zeta - tau t) with zeta = tau omega + i sqrt(tau^2 + k^2) omega_perp,
/// so zeta . zeta = -k^2 and the wave solves the Helmholtz equation.
struct IkehataWave {
  Vec2 omega;
  Vec2 omega_perp;
  double tau;
  double t;
  double k;

  /// omega_perp is omega rotated by +90 degrees.
  static IkehataWave make(Vec2 omega, double tau, double t, double k);
  std::array<cplx, 2> zeta() const;
};

/// Throws OverflowError when tau (x . omega - t) > 700.
cplx ikehata_wave(const IkehataWave& w, Vec2 x);
WaveSample ikehata_sample(const IkehataWave& w, Vec2 x);

}  // namespace crad
