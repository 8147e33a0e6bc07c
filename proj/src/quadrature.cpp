#include "crad/quadrature.hpp"

#include <numbers>

namespace crad {

using std::numbers::pi;

void QuadratureSpec::validate() const {
  if (!(rel_tol >= 1e-13)) throw DomainError("QuadratureSpec: rel_tol must be >= 1e-13");
  if (!(abs_tol > 0)) throw DomainError("QuadratureSpec: abs_tol must be positive");
  if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be positive");
  if (base_rule < 1) throw DomainError("QuadratureSpec: base_rule must be positive");
}

QuadResult<cplx> integrate_sector(const ScalarField& f, const Sector& sector, double r_max, double decay_rate,
                                  const QuadratureSpec& spec, double r_min) {
  return integrate_sector_t<cplx>(f, sector, r_max, decay_rate, spec, r_min);
}

QuadResult<cplx> integrate_polygon(const ScalarField& f, const Polygon& polygon, std::optional<Vec2> singular_point,
                                   const QuadratureSpec& spec) {
  return integrate_polygon_t<cplx>(f, polygon, singular_point, spec);
}

std::vector<std::array<Vec2, 3>> triangulate(const Polygon& polygon) {
  std::vector<Vec2> v = polygon.vertices();
  std::vector<std::array<Vec2, 3>> tris;
  auto inside = [](Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
    return cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0;
  };
  while (v.size() > 3) {
    const std::size_t n = v.size();
    std::size_t ear = n;
    // Prefer the ear with the largest minimum angle proxy for well-shaped triangles.
    double best = -1;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
      const double cr = cross(b - a, c - b);
      if (cr <= 0) continue;
      bool ok = true;
      for (std::size_t j = 0; j < n && ok; ++j) {
        if (j == i || j == (i + 1) % n || j == (i + n - 1) % n) continue;
        if (inside(v[j], a, b, c)) ok = false;
      }
      if (!ok) continue;
      const double quality = cr / (dot(b - a, b - a) + dot(c - b, c - b) + dot(a - c, a - c));
      if (quality > best) {
        best = quality;
        ear = i;
      }
    }
    if (ear == n) throw DomainError("triangulate: no ear found (polygon not simple?)");
    tris.push_back({v[(ear + n - 1) % n], v[ear], v[(ear + 1) % n]});
    v.erase(v.begin() + static_cast<long>(ear));
  }
  tris.push_back({v[0], v[1], v[2]});
  return tris;
}

Vec2 closest_point_on_triangle(const std::array<Vec2, 3>& t, Vec2 p) {
  bool in = true;
  for (int e = 0; e < 3; ++e) in = in && cross(t[(e + 1) % 3] - t[e], p - t[e]) >= 0;
  if (in) return p;
  Vec2 best = t[0];
  double bd = 1e300;
  for (int e = 0; e < 3; ++e) {
    const Vec2 a = t[e], b = t[(e + 1) % 3];
    const Vec2 ab = b - a;
    const double u = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
    const Vec2 q = a + u * ab;
    if (norm(q - p) < bd) {
      bd = norm(q - p);
      best = q;
    }
  }
  return best;
}

BoundaryPiece BoundaryPiece::segment(Vec2 a, Vec2 b, bool singular_start, bool singular_end) {
  if (a == b) throw DomainError("BoundaryPiece: degenerate segment");
  BoundaryPiece p;
  p.kind = Kind::Segment;
  p.a = a;
  p.b = b;
  p.singular_start = singular_start;
  p.singular_end = singular_end;
  return p;
}

BoundaryPiece BoundaryPiece::arc(Vec2 center, double radius, double theta0, double theta1) {
  if (!(radius > 0) || theta0 == theta1) throw DomainError("BoundaryPiece: degenerate arc");
  BoundaryPiece p;
  p.kind = Kind::Arc;
  p.center = center;
  p.radius = radius;
  p.theta0 = theta0;
  p.theta1 = theta1;
  return p;
}

double BoundaryPiece::length() const {
  return kind == Kind::Segment ? norm(b - a) : radius * std::abs(theta1 - theta0);
}

Vec2 BoundaryPiece::point(double u) const {
  if (kind == Kind::Segment) return a + u * (b - a);
  return center + radius * unit(theta0 + u * (theta1 - theta0));
}

Vec2 BoundaryPiece::normal(double u) const {
  if (kind == Kind::Segment) return (1.0 / norm(b - a)) * right_normal(b - a);
  const Vec2 radial = unit(theta0 + u * (theta1 - theta0));
  return theta1 > theta0 ? radial : -radial;
}

QuadResult<cplx> integrate_boundary(const BoundaryField& f, const Curve& curve, const QuadratureSpec& spec) {
  spec.validate();
  QuadResult<cplx> out;
  std::vector<cplx> parts;
  const AdaptiveOptions opt = [&] {
    AdaptiveOptions o = detail::outer_options(spec);
    o.abs_tol = spec.abs_tol / std::max<std::size_t>(1, curve.size());
    return o;
  }();
  for (const auto& piece : curve) {
    const double len = piece.length();
    auto at = [&](double u) { return f(piece.point(u), piece.normal(u)); };
    // toward_start: u = v^2 on [0, 1/2] of the piece; otherwise u = 1 - v^2.
    auto graded = [&](bool toward_start, double vmax) {
      auto g = [&](double v) -> cplx {
        const double u = toward_start ? v * v : 1 - v * v;
        return 2 * v * len * at(u);
      };
      return integrate_adaptive<cplx>(g, 0.0, vmax, opt);
    };
    std::vector<AdaptiveOutcome<cplx>> rs;
    if (piece.singular_start && piece.singular_end) {
      rs.push_back(graded(true, std::sqrt(0.5)));
      rs.push_back(graded(false, std::sqrt(0.5)));
    } else if (piece.singular_start) {
      rs.push_back(graded(true, 1.0));
    } else if (piece.singular_end) {
      rs.push_back(graded(false, 1.0));
    } else {
      auto g = [&](double u) -> cplx { return len * at(u); };
      rs.push_back(integrate_adaptive<cplx>(g, 0.0, 1.0, opt));
    }
    for (const auto& r : rs) {
      parts.push_back(r.value);
      out.error += r.error;
      out.evaluations += r.evaluations;
      out.converged = out.converged && r.converged;
    }
  }
  out.value = pairwise_sum<cplx>(parts);
  detail::require(out, "integrate_boundary");
  return out;
}

BoundaryRule circle_rule(Vec2 center, double radius, int n) {
  if (n < 3 || !(radius > 0)) throw DomainError("circle_rule: need n >= 3 and a positive radius");
  BoundaryRule rule;
  for (int j = 0; j < n; ++j) {
    const Vec2 d = unit(2 * pi * j / n);
    rule.nodes.push_back(center + radius * d);
    rule.normals.push_back(d);
    rule.weights.push_back(2 * pi * radius / n);
    rule.piece.push_back(0);
  }
  return rule;
}

namespace {

// Gauss-Legendre panels over [lo, hi] of a variable v, mapped to the piece
// parameter by u(v) with du/dv = du(v).
template <class U, class DU>
void add_panel(BoundaryRule& rule, const BoundaryPiece& piece, int index, double lo, double hi, int order, U u,
               DU du) {
  const GaussRule& g = gauss_legendre(order);
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  const double len = piece.length();
  for (int i = 0; i < order; ++i) {
    const double v = c + h * g.x[i];
    const double uu = u(v);
    rule.nodes.push_back(piece.point(uu));
    rule.normals.push_back(piece.normal(uu));
    rule.weights.push_back(h * g.w[i] * du(v) * len);
    rule.piece.push_back(index);
  }
}

void add_graded(BoundaryRule& rule, const BoundaryPiece& piece, int index, bool toward_start, double vmax,
                int panels, int order, int levels) {
  auto u = [&](double v) { return toward_start ? v * v : 1 - v * v; };
  auto du = [](double v) { return 2 * v; };
  // Geometric panels [vmax 2^-(j+1), vmax 2^-j] near the singular end, then
  // uniform panels on [vmax/2, vmax].
  std::vector<std::pair<double, double>> spans;
  spans.emplace_back(0.0, vmax * std::ldexp(1.0, -levels));
  for (int j = levels; j >= 2; --j) spans.emplace_back(vmax * std::ldexp(1.0, -j), vmax * std::ldexp(1.0, -j + 1));
  const int uniform = std::max(1, panels / 2);
  for (int j = 0; j < uniform; ++j)
    spans.emplace_back(vmax * (0.5 + 0.5 * j / uniform), vmax * (0.5 + 0.5 * (j + 1) / uniform));
  // Keep node order along the traversal direction of the piece.
  if (!toward_start) std::reverse(spans.begin(), spans.end());
  for (auto [lo, hi] : spans) {
    if (toward_start)
      add_panel(rule, piece, index, lo, hi, order, u, du);
    else
      add_panel(rule, piece, index, hi, lo, order, u, [&](double v) { return -du(v); });
  }
}

}  // namespace

BoundaryRule composite_rule(const Curve& curve, int panels, int order, int grading_levels) {
  if (panels < 1 || order < 1 || grading_levels < 1) throw DomainError("composite_rule: invalid parameters");
  BoundaryRule rule;
  for (std::size_t p = 0; p < curve.size(); ++p) {
    const auto& piece = curve[p];
    const int idx = static_cast<int>(p);
    if (piece.singular_start && piece.singular_end) {
      add_graded(rule, piece, idx, true, std::sqrt(0.5), panels, order, grading_levels);
      add_graded(rule, piece, idx, false, std::sqrt(0.5), panels, order, grading_levels);
    } else if (piece.singular_start) {
      add_graded(rule, piece, idx, true, 1.0, panels, order, grading_levels);
    } else if (piece.singular_end) {
      add_graded(rule, piece, idx, false, 1.0, panels, order, grading_levels);
    } else {
      for (int j = 0; j < panels; ++j)
        add_panel(rule, piece, idx, static_cast<double>(j) / panels, static_cast<double>(j + 1) / panels, order,
                  [](double v) { return v; }, [](double) { return 1.0; });
    }
  }
  return rule;
}

Curve corner_curve(const CornerFrame& frame, double h) {
  if (!(h > 0)) throw DomainError("corner_curve: h must be positive");
  const double a0 = frame.rotation + frame.sector.theta_min;
  const double a1 = frame.rotation + frame.sector.theta_max;
  return {BoundaryPiece::segment(frame.vertex, frame.vertex + h * unit(a0), true, false),
          BoundaryPiece::arc(frame.vertex, h, a0, a1),
          BoundaryPiece::segment(frame.vertex + h * unit(a1), frame.vertex, false, true)};
}

BoundaryRule corner_rule(const CornerFrame& frame, double h, double s_max, int order) {
  if (!(s_max > 0)) throw DomainError("corner_rule: s_max must be positive");
  const Curve curve = corner_curve(frame, h);
  const double scale = std::sqrt(s_max * h);
  // Radial sides: exp(-scale delta v) in v = sqrt(r/h); grade down to well below 1/scale.
  const int levels = std::clamp(static_cast<int>(std::ceil(std::log2(std::max(scale, 1.0)))) + 8, 10, 30);
  const int side_panels = 8;
  // Arc: the phase sqrt(s h) sin(theta/2 + pi) turns by at most scale * opening / 2.
  const int arc_panels = std::max(8, static_cast<int>(std::ceil(scale * frame.opening / 4)));
  BoundaryRule rule;
  auto merge = [&](const BoundaryRule& r, int idx) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      rule.nodes.push_back(r.nodes[i]);
      rule.normals.push_back(r.normals[i]);
      rule.weights.push_back(r.weights[i]);
      rule.piece.push_back(idx);
    }
  };
  merge(composite_rule({curve[0]}, side_panels, order, levels), 0);
  merge(composite_rule({curve[1]}, arc_panels, order, levels), 1);
  merge(composite_rule({curve[2]}, side_panels, order, levels), 2);
  return rule;
}

}  // namespace crad
