#pragma once

// Edges of prisms reduced to 2D corners: the axial transform T_xi with a
// smooth window, the transformed right-hand side F_xi, and recovery of the
// edge value of Delta u by per-frequency corner extraction and Fourier
// inversion along the edge.

#include <array>
#include <functional>
#include <vector>

#include "crad/corner.hpp"
#include "crad/cvec.hpp"
#include "crad/forward.hpp"
#include "crad/geometry.hpp"

namespace crad {

/// phi(x) = exp(-1 / (1 - (x/L)^2)) on (-L, L), zero outside, with closed-form
/// first and second derivatives.
struct Window {
  double L = 1.0;

  static Window bump(double L);
  double phi(double x) const;
  double phi1(double x) const;
  double phi2(double x) const;
  /// sup phi = phi(0) = 1/e.
  double sup() const { return phi(0.0); }
};

/// Gauss-Legendre rule on [-L, L]; exact for polynomials of degree 2n - 1.
struct AxialRule {
  double L = 1.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  static AxialRule gauss(double L, int n);
  std::size_t size() const { return nodes.size(); }
};

/// Samples g(x', x_n) on transverse points x' times axial nodes; value
/// (i, j) is stored at i * axial.size() + j.
struct GridFunction3 {
  std::vector<Vec2> points;
  AxialRule axial;
  std::vector<cplx> values;

  static GridFunction3 sample(std::vector<Vec2> points, AxialRule axial,
                              const std::function<cplx(Vec2, double)>& g);
  cplx at(std::size_t i, std::size_t j) const { return values[i * axial.size() + j]; }
};

/// Polar tensor points in the sector cap B(0, r_max): radii (i + 1/2) r_max / nr,
/// angles at the centres of nt equal subintervals.
std::vector<Vec2> polar_points(const Sector& sector, double r_max, int nr, int nt);

/// T_xi g(x') = int e^{-i x_n xi} phi(x_n) g(x', x_n) dx_n by the axial rule.
std::vector<cplx> t_xi(const GridFunction3& g, const Window& w, double xi);

/// The same transform with phi replaced by phi' (order 1) or phi'' (order 2).
std::vector<cplx> t_xi_derivative(const GridFunction3& g, const Window& w, double xi, int order);

/// Axial transforms of a single axial profile sampled on the rule nodes.
cplx t_xi_profile(const AxialRule& axial, const std::vector<cplx>& values, const Window& w, double xi, int order = 0);

/// The u-part of F_xi: -T[phi''] u + 2 i xi T[phi'] u + xi^2 T u, which equals
/// -T_xi(d^2 u / dx_n^2) by integration by parts.
cplx axial_u_terms(const AxialRule& axial, const std::vector<cplx>& u, const Window& w, double xi);

struct FXi {
  std::vector<cplx> values;
  /// Max relative residual of a finite-difference check of Delta u = f, or
  /// -1 when the grid has no stencil structure to check.
  double fd_residual = -1.0;
  bool consistent = true;
};

/// F_xi = -T[phi''] u + 2 i xi T[phi'] u + xi^2 T u + T f, so Delta' T_xi u = F_xi
/// whenever Delta u = f. u and f must share the grid. With stencil_spacing > 0
/// the grid must come from stencil_points and Delta u = f is checked by
/// finite differences.
FXi f_xi(const GridFunction3& u, const GridFunction3& f, const Window& w, double xi, double stencil_spacing = 0.0);

/// Relative residual of Delta u = f by second differences on a Cartesian
/// stencil grid (see stencil_points); consistent below 1e-2.
double fd_consistency_residual(const GridFunction3& u, const GridFunction3& f, double spacing);

/// Centres plus their four neighbours at distance spacing, in the order
/// centre, +x, -x, +y, -y for each centre.
std::vector<Vec2> stencil_points(const std::vector<Vec2>& centres, double spacing);

/// Cauchy data of u on corner_curve(frame, h) times the axial rule, plus u and
/// its transverse gradient along the edge x' = vertex.
struct EdgeData {
  CornerFrame frame;
  double h = 0.0;
  BoundaryRule rule;
  AxialRule axial;
  std::vector<cplx> u;        // [node * nz + j]
  std::vector<cplx> du_dnu;   // [node * nz + j]
  std::vector<cplx> u_edge;   // u(vertex, z_j)
  std::vector<std::array<cplx, 2>> grad_edge;
  /// Corner schedule the rule was built for.
  std::vector<double> s_values;
};

/// Data of u(x', x_n) = c(x_n) U(x') from 2D corner data of U and U, grad U at
/// the vertex.
EdgeData extrude(const CornerData& base, const std::vector<double>& s_values, const FieldSample& at_vertex,
                 const AxialRule& axial, const std::function<double(double)>& c);

/// extrude() applied to the 2D radiated field U of a polygon source at one of
/// its vertices.
EdgeData extruded_edge_data(const ForwardSolver& solver, std::size_t vertex_index, const AxialRule& axial,
                            const std::function<double(double)>& c, const CornerRecoveryOptions& options = {});

struct EdgeRecoveryOptions {
  int xi_count = 65;
  /// The xi grid spans [-xi_span / L, xi_span / L].
  double xi_span = 16.0;
  double alpha_hint = 1.0;
  /// Recovered profile points; empty: 21 points on [-L/2, L/2].
  std::vector<double> profile_points;
};

struct EdgeRecovery {
  std::vector<double> xi;
  /// Extracted corner value F_xi(0) per xi and T_xi f(0) after removing the u-terms.
  std::vector<cplx> corner_values;
  std::vector<cplx> transformed;
  std::vector<double> x_n;
  /// f(vertex, x_n), with f = Delta u.
  std::vector<cplx> profile;
};

/// Per xi: transform the data, extract F_xi(0) as a 2D corner value, subtract
/// the u-terms at the edge; then invert f(0, x_n) phi(x_n) =
/// (2 pi)^-1 int e^{i x_n xi} T_xi f(0) dxi by the trapezoid rule. Throws
/// ExtractionError naming every failing xi.
EdgeRecovery edge_value_recover(const EdgeData& data, const Window& w, const EdgeRecoveryOptions& options = {});

}  // namespace crad
