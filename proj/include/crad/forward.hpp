#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "crad/cvec.hpp"
#include "crad/geometry.hpp"
#include "crad/quadrature.hpp"

namespace crad {

/// Closed-form source density with a declared Hoelder exponent and seminorm
/// bound near corners.
struct Density {
  std::string kind;
  std::function<cplx(Vec2)> eval;
  double alpha = 1.0;
  double holder_constant = 0.0;
  /// Circles across which the density is not smooth (quadrature breakpoints).
  std::vector<Circle> kinks;

  cplx operator()(Vec2 x) const { return eval(x); }

  static Density zero();
  static Density constant(cplx c);
  /// c0 + cx x1 + cy x2.
  static Density affine(cplx c0, cplx cx, cplx cy);
  /// base + amplitude |x - center|^alpha, alpha in (0, 1].
  static Density holder(cplx base, cplx amplitude, Vec2 center, double alpha);
};

/// f = chi_Omega phi with wavenumber k. Immutable after construction.
class SourceTerm {
 public:
  /// Checks the declared Hoelder bound on 1000 samples within radius 0.1 of
  /// every vertex; throws DomainError when it fails.
  SourceTerm(Polygon support, Density density, double k);

  const Polygon& support() const { return support_; }
  const Density& density() const { return density_; }
  double k() const { return k_; }
  /// f(x): the density inside the support, zero outside.
  cplx f(Vec2 x) const;

 private:
  Polygon support_;
  Density density_;
  double k_;
};

/// c_k converts a Fourier value to the far-field amplitude of u:
/// u(x) ~ c_k fhat(k xhat) exp(i k |x|) / sqrt(|x|).
cplx far_field_constant(double k);

struct FarField {
  double k = 0.0;
  std::vector<Vec2> directions;
  /// fhat(k xhat_j) = int_Omega exp(-i k xhat_j . y) phi(y) dy.
  std::vector<cplx> values;
  cplx physical_constant;
};

struct FieldSample {
  cplx u;
  std::array<cplx, 2> grad;
};

/// Sampled Cauchy data on a boundary rule.
struct CauchyData {
  BoundaryRule rule;
  std::vector<cplx> u;
  std::vector<cplx> du_dnu;
  std::size_t size() const { return rule.size(); }
};

/// Fixed point-source discretization of a source: nodes y_j, weights w_j with
/// int f g ~ sum w_j f(y_j) g(y_j).
struct VolumeRule {
  std::vector<Vec2> nodes;
  std::vector<cplx> weighted_f;
};

/// Field u = -Phi_k * f with (Delta + k^2) Phi_k = -delta, Phi_k = (i/4) H0(k|x|),
/// so that (Delta + k^2) u = f and u is outgoing.
class ForwardSolver {
 public:
  /// field_spec.abs_tol is scaled by max(1, sup|phi| * area).
  explicit ForwardSolver(SourceTerm source, QuadratureSpec field_spec = default_field_spec());

  static QuadratureSpec default_field_spec();

  const SourceTerm& source() const { return source_; }

  /// values[j] to absolute tolerance abs_tol; parallel over directions.
  FarField far_field(const std::vector<Vec2>& directions, double abs_tol = 1e-9) const;

  /// Adaptive volume potential with the singular fan apex at x.
  cplx field(Vec2 x) const;
  FieldSample sample(Vec2 x) const;
  std::vector<FieldSample> sample_many(const std::vector<Vec2>& xs) const;

  /// Tensor Gauss rule of the given order on each fan triangle (apex = centroid).
  VolumeRule volume_rule(int order) const;

 private:
  SourceTerm source_;
  QuadratureSpec spec_;
};

/// Field of a point-source discretization at x (x must avoid the nodes).
FieldSample sample_from_rule(const VolumeRule& rule, double k, Vec2 x);

/// (u, du/dnu) at every node of the rule, adaptive route, parallel over nodes.
CauchyData cauchy_data(const ForwardSolver& solver, const BoundaryRule& rule);

/// Same data from a fixed volume rule; the boundary indicator of such data
/// reproduces the discrete source sum without adaptive noise.
CauchyData cauchy_data_from_rule(const VolumeRule& volume, double k, const BoundaryRule& rule);

/// Nonradiating source f = (Delta + k^2) v with v = (1 - |x - c|^2 / rho^2)^3 in
/// the disc, 0 outside. The support is a circumscribing 16-gon.
SourceTerm h20_source(Vec2 center, double radius, double k);
/// The profile v of h20_source and its analytic Laplacian.
double h20_profile(Vec2 center, double radius, Vec2 x);
double h20_laplacian(Vec2 center, double radius, Vec2 x);

/// n-gon approximating the disc of radius r0 whose mean radius (average of the
/// boundary distance over angle) equals r0, so its Fourier transform matches
/// the disc's to second order in 1/n.
Polygon disc_polygon(Vec2 center, double r0, int n = 256);
SourceTerm disc_source(Vec2 center, double r0, double k, cplx value = 1.0, int n = 256);

/// Adds independent N(0, sigma^2) perturbations to the real and imaginary
/// parts of u and du/dnu, reproducible from the seed.
void add_gaussian_noise(CauchyData& data, double sigma, std::uint64_t seed);

/// Columns dir_x, dir_y, re, im.
void write_far_field_csv(std::ostream& os, const FarField& ff);

/// n unit vectors at angles 2 pi j / n.
std::vector<Vec2> uniform_directions(int n);

}  // namespace crad
