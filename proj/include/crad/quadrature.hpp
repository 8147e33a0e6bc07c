#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "crad/cvec.hpp"
#include "crad/errors.hpp"
#include "crad/gauss.hpp"
#include "crad/geometry.hpp"

namespace crad {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  /// Gauss-Legendre order per panel of the fixed boundary rules.
  int base_rule = 16;

  /// Throws DomainError when rel_tol < 1e-13 or a field is non-positive.
  void validate() const;
};

template <class V>
struct QuadResult {
  V value{};
  double error = 0.0;
  bool converged = true;
  long evaluations = 0;
};

/// Radial cutoff in the decay variable t = decay_rate * sqrt(r).
inline constexpr double kSectorDecayCutoff = 45.0;

namespace detail {

inline AdaptiveOptions inner_options(const QuadratureSpec& spec, double abs_tol) {
  AdaptiveOptions o;
  o.abs_tol = abs_tol;
  o.rel_tol = 0.1 * spec.rel_tol;
  o.max_intervals = spec.max_subdivisions;
  return o;
}

inline AdaptiveOptions outer_options(const QuadratureSpec& spec) {
  AdaptiveOptions o;
  o.abs_tol = spec.abs_tol;
  o.rel_tol = spec.rel_tol;
  o.max_intervals = spec.max_subdivisions;
  return o;
}

template <class V>
std::complex<double> as_complex(const V& v) {
  if constexpr (std::is_same_v<V, double>) {
    return {v, 0.0};
  } else if constexpr (std::is_same_v<V, cplx>) {
    return v;
  } else {
    return v[0];
  }
}

template <class V>
void require(const QuadResult<V>& r, const char* what) {
  if (!r.converged)
    throw AccuracyError(std::string(what) + ": tolerance not reached within max_subdivisions", as_complex(r.value),
                        r.error);
}

}  // namespace detail

/// Integral of f over {theta_min < arg x < theta_max, r_min < |x| < r_max} in polar
/// coordinates. With decay_rate c > 0 the radius is written r = (t/c)^2 and t is
/// truncated at kSectorDecayCutoff, which is exact to double precision for
/// integrands bounded by exp(-c sqrt(r)) times a polynomial. r_max may be
/// infinite only when c > 0. Throws AccuracyError on non-convergence.
template <class V, class F>
QuadResult<V> integrate_sector_t(F&& f, const Sector& sector, double r_max, double decay_rate,
                                 const QuadratureSpec& spec, double r_min = 0.0) {
  spec.validate();
  if (!(decay_rate >= 0)) throw DomainError("integrate_sector: decay_rate must be >= 0");
  if (!std::isfinite(r_max) && !(decay_rate > 0))
    throw DomainError("integrate_sector: an unbounded radius needs a positive decay rate");
  if (!(r_max > r_min) || !(r_min >= 0)) throw DomainError("integrate_sector: need 0 <= r_min < r_max");
  const double c = decay_rate;
  const double t_max = c > 0 ? std::min(kSectorDecayCutoff, c * std::sqrt(std::min(r_max, 1e300))) : 0.0;
  const double t_min = c * std::sqrt(r_min);
  QuadResult<V> out;
  if (c > 0 && t_min >= t_max) return out;
  bool inner_ok = true;
  double inner_err = 0.0;
  const double inner_abs = 0.1 * spec.abs_tol / sector.opening();
  auto radial = [&](double theta) {
    const Vec2 dir = unit(theta);
    AdaptiveOutcome<V> r;
    if (c > 0) {
      auto g = [&](double t) -> V {
        if (t <= 0) return zero_value<V>();
        const double rr = (t / c) * (t / c);
        return (2 * t * t * t / (c * c * c * c)) * f(rr * dir);
      };
      r = integrate_adaptive<V>(g, t_min, t_max, detail::inner_options(spec, inner_abs));
    } else {
      auto g = [&](double rr) -> V { return rr * f(rr * dir); };
      r = integrate_adaptive<V>(g, r_min, r_max, detail::inner_options(spec, inner_abs));
    }
    out.evaluations += r.evaluations;
    inner_ok = inner_ok && r.converged;
    inner_err = std::max(inner_err, r.error);
    return r.value;
  };
  auto outer = integrate_adaptive<V>(radial, sector.theta_min, sector.theta_max, detail::outer_options(spec));
  out.value = outer.value;
  out.error = outer.error + sector.opening() * inner_err;
  out.converged = outer.converged && inner_ok;
  detail::require(out, "integrate_sector");
  return out;
}

using ScalarField = std::function<cplx(Vec2)>;

QuadResult<cplx> integrate_sector(const ScalarField& f, const Sector& sector, double r_max, double decay_rate,
                                  const QuadratureSpec& spec, double r_min = 0.0);

/// Ear-clipping triangulation of a simple counterclockwise polygon.
std::vector<std::array<Vec2, 3>> triangulate(const Polygon& polygon);

/// Closest point of a triangle to p (p itself when inside).
Vec2 closest_point_on_triangle(const std::array<Vec2, 3>& tri, Vec2 p);

namespace detail {

// Integral over the triangle (p, a, b), signed by its orientation, with
// y = p + mu^2 (a + t (b - a) - p). Adds the result to parts. An integrand
// taking (y, y - s) receives the offset from the singular point s computed
// without cancellation; offset_p is p - s.
template <class V, class F>
void fan_triangle(F& f, Vec2 p, Vec2 a, Vec2 b, double abs_tol, const QuadratureSpec& spec,
                  const std::vector<Circle>& kinks, std::vector<V>& parts, QuadResult<V>& out,
                  Vec2 offset_p = {0, 0}) {
  const double twice_area = cross(a - p, b - p);
  const double edge = norm(b - a);
  const double scale = std::max({norm(a - p), norm(b - p), edge});
  if (std::abs(twice_area) <= 1e-14 * scale * edge) return;
  const double jac = 2 * twice_area;  // lambda dlambda = 2 mu^3 dmu
  const double inner_abs = 0.1 * abs_tol / std::abs(jac);
  double inner_err = 0.0;
  auto ray = [&](double t) -> V {
    // (a - p) first: keeps d accurate when p is close to the edge line.
    const Vec2 d = (a - p) + t * (b - a);
    std::vector<double> breaks;
    for (const auto& k : kinks) {
      // |p + lambda d - c| = R, solved for lambda in (0, 1), mapped to mu.
      const Vec2 pc = p - k.center;
      const double A = dot(d, d), B = 2 * dot(pc, d), C = dot(pc, pc) - k.radius * k.radius;
      const double disc = B * B - 4 * A * C;
      if (disc <= 0) continue;
      const double sq = std::sqrt(disc);
      for (double lam : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)})
        if (lam > 0 && lam < 1) breaks.push_back(std::sqrt(lam));
    }
    auto g = [&](double mu) -> V {
      if (mu <= 0) return zero_value<V>();
      if constexpr (std::is_invocable_v<F&, Vec2, Vec2>)
        return (mu * mu * mu) * f(p + (mu * mu) * d, offset_p + (mu * mu) * d);
      else
        return (mu * mu * mu) * f(p + (mu * mu) * d);
    };
    auto r = integrate_adaptive<V>(g, 0.0, 1.0, inner_options(spec, inner_abs), breaks);
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
    inner_err = std::max(inner_err, r.error);
    return r.value;
  };
  // The foot of the perpendicular from p to the edge line is where the ray
  // length is smallest and a near-singular kernel peaks.
  std::vector<double> tb;
  const double foot = dot(p - a, b - a) / (edge * edge);
  if (foot > 0 && foot < 1) tb.push_back(foot);
  AdaptiveOptions o = outer_options(spec);
  o.abs_tol = abs_tol / std::abs(jac);
  auto r = integrate_adaptive<V>(ray, 0.0, 1.0, o, tb);
  out.converged = out.converged && r.converged;
  out.error += std::abs(jac) * (r.error + inner_err);
  parts.push_back(jac * r.value);
}

}  // namespace detail

/// Integral of f over a polygon. Pieces are triangles fanned from an apex and
/// parametrized y = p + mu^2 (e(t) - p), which absorbs a logarithmic or
/// 1/|y - p| singularity at the apex p. When the singular point (or, without
/// one, the centroid) sees every edge, or when the singular point lies in the
/// closed polygon, one signed fan from it covers the polygon. An exterior
/// singular point moves to its closest boundary point if that point sees
/// every edge. Otherwise the polygon is triangulated and each triangle is
/// fanned from its point closest to the singular point. Non-smooth circles of the
/// integrand (kinks) become breakpoints along every ray.
template <class V, class F>
QuadResult<V> integrate_polygon_t(F&& f, const Polygon& polygon, std::optional<Vec2> singular_point,
                                  const QuadratureSpec& spec, const std::vector<Circle>& kinks = {}) {
  spec.validate();
  const Vec2 sp = singular_point ? *singular_point : polygon.centroid();
  QuadResult<V> out;
  std::vector<V> parts;
  const double diam = polygon.diameter();
  auto sees_all_edges = [&](Vec2 q) {
    for (std::size_t i = 0; i < polygon.size(); ++i) {
      const Vec2 a = polygon[i], b = polygon.at(static_cast<long>(i) + 1);
      if (cross(a - q, b - q) < -1e-14 * diam * norm(b - a)) return false;
    }
    return true;
  };
  // An exterior singular point is moved to its closest boundary point: the
  // integrand is smooth in between and the fan stays inside the polygon.
  Vec2 p = sp;
  bool star = sees_all_edges(p);
  // A singular point inside or on the polygon is always the apex: the signed
  // fan covers the polygon with winding number one for any apex, and the
  // parts outside cancel with magnitudes bounded by the polygon size.
  const bool inside = singular_point && (point_in_polygon(polygon, sp) || distance_to_boundary(polygon, sp) <= 1e-12 * diam);
  if (inside) star = true;
  if (!star && singular_point && !inside) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < polygon.size(); ++i) {
      const Vec2 a = polygon[i], ab = polygon.at(static_cast<long>(i) + 1) - a;
      const double u = std::clamp(dot(sp - a, ab) / dot(ab, ab), 0.0, 1.0);
      const Vec2 q = a + u * ab;
      if (norm(q - sp) < best) {
        best = norm(q - sp);
        p = q;
      }
    }
    star = sees_all_edges(p);
  }
  if (star) {
    const double tri_abs = spec.abs_tol / static_cast<double>(polygon.size());
    for (std::size_t i = 0; i < polygon.size(); ++i)
      detail::fan_triangle<V>(f, p, polygon[i], polygon.at(static_cast<long>(i) + 1), tri_abs, spec, kinks, parts,
                              out, p - sp);
  } else {
    const auto tris = triangulate(polygon);
    const double tri_abs = spec.abs_tol / (3.0 * static_cast<double>(tris.size()));
    for (const auto& t : tris) {
      const Vec2 q = singular_point ? closest_point_on_triangle(t, sp) : (1.0 / 3) * (t[0] + t[1] + t[2]);
      for (int e = 0; e < 3; ++e)
        detail::fan_triangle<V>(f, q, t[e], t[(e + 1) % 3], tri_abs, spec, kinks, parts, out, q - sp);
    }
  }
  out.value = pairwise_sum<V>(parts);
  detail::require(out, "integrate_polygon");
  return out;
}

QuadResult<cplx> integrate_polygon(const ScalarField& f, const Polygon& polygon, std::optional<Vec2> singular_point,
                                   const QuadratureSpec& spec);

/// A boundary piece traversed from start to end. Segments run a -> b; arcs run
/// from angle theta0 to theta1 about center (counterclockwise when theta1 > theta0).
/// The normal passed to integrands is the unit tangent rotated by -90 degrees,
/// which is the outward normal of a counterclockwise boundary.
struct BoundaryPiece {
  enum class Kind { Segment, Arc };
  Kind kind = Kind::Segment;
  Vec2 a, b;
  Vec2 center;
  double radius = 0.0, theta0 = 0.0, theta1 = 0.0;
  /// Integrand behaves like dist^(-1/2) at this endpoint.
  bool singular_start = false;
  bool singular_end = false;

  static BoundaryPiece segment(Vec2 a, Vec2 b, bool singular_start = false, bool singular_end = false);
  static BoundaryPiece arc(Vec2 center, double radius, double theta0, double theta1);

  double length() const;
  /// Point, unit normal at parameter u in [0, 1].
  Vec2 point(double u) const;
  Vec2 normal(double u) const;
};

using Curve = std::vector<BoundaryPiece>;
using BoundaryField = std::function<cplx(Vec2 x, Vec2 normal)>;

/// Line integral of f(x, n) ds over the curve. Flagged endpoints use
/// u -> u^2 toward the singular end, which removes a dist^(-1/2) singularity.
QuadResult<cplx> integrate_boundary(const BoundaryField& f, const Curve& curve, const QuadratureSpec& spec);

/// Fixed quadrature nodes on a curve, with unit normals and arclength weights.
struct BoundaryRule {
  std::vector<Vec2> nodes;
  std::vector<Vec2> normals;
  std::vector<double> weights;
  /// Piece index of each node, so callers can drop pieces.
  std::vector<int> piece;
  std::size_t size() const { return nodes.size(); }
};

/// Trapezoid rule with n equispaced nodes on a counterclockwise circle.
BoundaryRule circle_rule(Vec2 center, double radius, int n);

/// Composite Gauss-Legendre rule on a curve, `panels` equal panels per piece
/// except that flagged singular ends are graded geometrically (ratio 1/2, down
/// to 2^-grading_levels of the piece) in the variable u^2.
BoundaryRule composite_rule(const Curve& curve, int panels, int order, int grading_levels);

/// Boundary of C cap B(0, h) of a corner frame, counterclockwise in world
/// coordinates: side along theta_min (outward from the vertex), the arc, side
/// along theta_max (back to the vertex). Piece order is 0 = first side, 1 = arc,
/// 2 = second side; the vertex ends are flagged singular.
Curve corner_curve(const CornerFrame& frame, double h);

/// Rule on corner_curve tuned for the corner indicator up to decay scale
/// sqrt(s_max h): radial sides graded toward the vertex, arc panels scaled to
/// the oscillation of the branch exponential.
BoundaryRule corner_rule(const CornerFrame& frame, double h, double s_max, int order = 16);

template <class V>
V apply_rule(const BoundaryRule& rule, const std::vector<V>& values) {
  std::vector<V> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = rule.weights[i] * values[i];
  return pairwise_sum<V>(terms);
}

}  // namespace crad
