#include "crad/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

#include "crad/errors.hpp"

namespace crad {

using std::numbers::pi;

Sector::Sector(double tmin, double tmax) : theta_min(tmin), theta_max(tmax) {
  if (!(tmin > -pi && tmin < tmax && tmax < pi)) {
    std::ostringstream os;
    os << "sector (" << tmin << ", " << tmax << ") violates -pi < theta_min < theta_max < pi";
    throw DomainError(os.str());
  }
}

Sector Sector::symmetric(double opening) { return Sector(-opening / 2, opening / 2); }

double Sector::delta_c() const {
  // cos(theta/2) is even and decreasing in |theta| on (-pi, pi).
  return std::cos(std::max(std::abs(theta_min), std::abs(theta_max)) / 2);
}

double signed_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

namespace {

int orient(Vec2 a, Vec2 b, Vec2 c) {
  const double d = cross(b - a, c - a);
  return (d > 0) - (d < 0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

void validate_polygon(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  if (n < 3) throw DomainError("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i].x) || !std::isfinite(v[i].y))
      throw DomainError("polygon vertex " + std::to_string(i) + " is not finite");
    if (v[i] == v[(i + 1) % n])
      throw DomainError("polygon vertices " + std::to_string(i) + " and " + std::to_string((i + 1) % n) +
                        " coincide");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges may only share their common vertex: reject folding back.
        const std::size_t shared = (j == i + 1) ? j : i;
        const Vec2 p = v[(shared + n - 1) % n], q = v[shared], r = v[(shared + 1) % n];
        if (orient(p, q, r) == 0 && dot(p - q, r - q) > 0)
          throw DomainError("polygon edges " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        continue;
      }
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
        throw DomainError("polygon is self-intersecting: edges " + std::to_string(i) + " and " +
                          std::to_string(j) + " cross");
    }
  }
  if (!(signed_area(v) > 0)) throw DomainError("polygon must be counterclockwise with positive area");
}

Polygon::Polygon(std::vector<Vec2> vertices) : v_(std::move(vertices)) { validate_polygon(v_); }

Polygon make_polygon_unchecked(std::vector<Vec2> v) { return Polygon(std::move(v), Polygon::Unchecked{}); }

const Vec2& Polygon::at(long i) const {
  const long n = static_cast<long>(v_.size());
  return v_[static_cast<std::size_t>(((i % n) + n) % n)];
}

double Polygon::area() const { return signed_area(v_); }

Vec2 Polygon::centroid() const {
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const Vec2 p = v_[i], q = v_[(i + 1) % v_.size()];
    const double c = cross(p, q);
    a += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {cx / (3 * a), cy / (3 * a)};
}

double Polygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i)
    for (std::size_t j = i + 1; j < v_.size(); ++j) d = std::max(d, norm(v_[i] - v_[j]));
  return d;
}

Polygon Polygon::translated(Vec2 d) const {
  std::vector<Vec2> w = v_;
  for (auto& p : w) p += d;
  return make_polygon_unchecked(std::move(w));
}

double interior_angle(const Polygon& polygon, std::size_t i) {
  const long k = static_cast<long>(i);
  const Vec2 v = polygon.at(k);
  const Vec2 out = polygon.at(k + 1) - v;
  const Vec2 in = polygon.at(k - 1) - v;
  double a = std::atan2(in.y, in.x) - std::atan2(out.y, out.x);
  while (a <= 0) a += 2 * pi;
  while (a >= 2 * pi) a -= 2 * pi;
  return a;
}

CornerFrame corner_frame(const Polygon& polygon, std::size_t i) {
  if (i >= polygon.size()) throw DomainError("corner_frame: vertex index out of range");
  const double opening = interior_angle(polygon, i);
  if (std::abs(opening - pi) < 1e-12) throw DegenerateCornerError("vertex has interior angle pi: not a corner");
  const Vec2 v = polygon[i];
  const Vec2 out = polygon.at(static_cast<long>(i) + 1) - v;
  const double rotation = std::atan2(out.y, out.x) + opening / 2;
  return {v, rotation, Sector::symmetric(opening), opening};
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double l2 = dot(ab, ab);
  double t = l2 > 0 ? dot(p - a, ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double distance_to_boundary(const Polygon& polygon, Vec2 p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < polygon.size(); ++i)
    d = std::min(d, distance_to_segment(p, polygon[i], polygon.at(static_cast<long>(i) + 1)));
  return d;
}

double distance_to_nonadjacent_edges(const Polygon& polygon, std::size_t i) {
  const std::size_t n = polygon.size();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < n; ++e) {
    if (e == i || (e + 1) % n == i) continue;
    d = std::min(d, distance_to_segment(polygon[i], polygon[e], polygon[(e + 1) % n]));
  }
  return d;
}

double default_ball_radius(const Polygon& polygon, std::size_t i) {
  return 0.4 * distance_to_nonadjacent_edges(polygon, i);
}

double support_function(const Polygon& polygon, Vec2 omega) {
  if (std::abs(norm(omega) - 1.0) > 1e-12) throw DomainError("support_function: omega must be a unit vector");
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& v : polygon.vertices()) h = std::max(h, dot(v, omega));
  return h;
}

namespace {

std::vector<Vec2> clip(const std::vector<Vec2>& poly, Vec2 omega, double h) {
  std::vector<Vec2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = poly[i], q = poly[(i + 1) % n];
    const double fp = dot(p, omega) - h, fq = dot(q, omega) - h;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
      const double t = fp / (fp - fq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

std::vector<Vec2> clean(std::vector<Vec2> v, double tol) {
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
      const std::size_t n = v.size();
      const Vec2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
      const bool dup = norm(b - c) <= tol;
      const bool collinear = std::abs(cross(b - a, c - b)) <= tol * std::max(norm(c - a), tol);
      if (dup || collinear) {
        v.erase(v.begin() + static_cast<long>(dup ? (i + 1) % n : i));
        changed = true;
        break;
      }
    }
  }
  return v;
}

}  // namespace

Polygon halfplane_hull(const std::vector<Vec2>& omegas, const std::vector<double>& h) {
  if (omegas.size() != h.size()) throw DomainError("halfplane_hull: omegas and h differ in length");
  if (omegas.size() < 3) throw CoverageError("halfplane_hull: need at least 3 directions");
  std::vector<double> angles;
  for (const auto& w : omegas) {
    if (std::abs(norm(w) - 1.0) > 1e-12) throw DomainError("halfplane_hull: directions must be unit vectors");
    angles.push_back(std::atan2(w.y, w.x));
  }
  std::sort(angles.begin(), angles.end());
  double max_gap = angles.front() + 2 * pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  if (max_gap >= pi - 1e-12) throw CoverageError("halfplane_hull: directions leave an angular gap >= pi");

  double scale = 1.0;
  for (double v : h) scale = std::max(scale, std::abs(v));
  const double big = 1e3 * scale / std::sin(std::max(1e-6, (pi - max_gap) / 2));
  std::vector<Vec2> poly = {{-big, -big}, {big, -big}, {big, big}, {-big, big}};
  for (std::size_t j = 0; j < omegas.size() && !poly.empty(); ++j) poly = clip(poly, omegas[j], h[j]);
  poly = clean(std::move(poly), 1e-12 * scale);
  if (poly.size() < 3 || signed_area(poly) <= 1e-24 * scale * scale) return Polygon();
  return make_polygon_unchecked(std::move(poly));
}

bool point_in_polygon(const Polygon& polygon, Vec2 x) {
  const std::size_t n = polygon.size();
  if (n == 0) return false;
  double scale = 0.0;
  for (const auto& v : polygon.vertices()) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
  const double tol = 1e-12 * std::max(scale, 1.0);
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = polygon[j], b = polygon[i];
    if (distance_to_segment(x, a, b) <= tol) return true;
    if ((b.y > x.y) != (a.y > x.y)) {
      const double xc = b.x + (x.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (x.x < xc) inside = !inside;
    }
  }
  return inside;
}

Polygon convex_hull(const std::vector<Vec2>& points) {
  std::vector<Vec2> p = points;
  std::sort(p.begin(), p.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) throw DomainError("convex_hull: need at least 3 distinct points");
  std::vector<Vec2> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], p[i - 1] - hull[k - 2]) <= 0) --k;
    hull[k++] = p[i - 1];
  }
  hull.resize(k - 1);
  return Polygon(std::move(hull));
}

double hausdorff_distance_convex(const Polygon& a, const Polygon& b) {
  auto one_way = [](const Polygon& from, const Polygon& to) {
    double d = 0.0;
    for (const auto& v : from.vertices())
      if (!point_in_polygon(to, v)) d = std::max(d, distance_to_boundary(to, v));
    return d;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

Circle minimal_enclosing_circle(const std::vector<Vec2>& pts) {
  if (pts.empty()) throw DomainError("minimal_enclosing_circle: no points");
  auto contains = [&](const Circle& c) {
    for (const auto& p : pts)
      if (norm(p - c.center) > c.radius * (1 + 1e-12) + 1e-15) return false;
    return true;
  };
  Circle best{pts[0], 0.0};
  bool found = pts.size() == 1;
  auto consider = [&](const Circle& c) {
    if ((!found || c.radius < best.radius) && contains(c)) {
      best = c;
      found = true;
    }
  };
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      consider({0.5 * (pts[i] + pts[j]), 0.5 * norm(pts[i] - pts[j])});
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        const Vec2 a = pts[i], b = pts[j], c = pts[k];
        const double d = 2 * cross(b - a, c - a);
        if (std::abs(d) < 1e-300) continue;
        const double ba = dot(b - a, b - a), ca = dot(c - a, c - a);
        const Vec2 center = a + Vec2{((c - a).y * ba - (b - a).y * ca) / d, ((b - a).x * ca - (c - a).x * ba) / d};
        consider({center, norm(center - a)});
      }
    }
  return best;
}

}  // namespace crad
