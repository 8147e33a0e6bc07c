#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace crad {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline Vec2 rotate(Vec2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}
/// Rotation by -90 degrees: the outward normal of a counterclockwise boundary.
inline Vec2 right_normal(Vec2 t) { return {t.y, -t.x}; }

/// Open cone {x != 0 : theta_min < arg x < theta_max} with -pi < theta_min < theta_max < pi.
struct Sector {
  double theta_min;
  double theta_max;

  /// Validates -pi < theta_min < theta_max < pi; throws DomainError otherwise.
  Sector(double theta_min, double theta_max);
  /// Sector symmetric about the positive x-axis.
  static Sector symmetric(double opening);

  double opening() const { return theta_max - theta_min; }
  /// delta_C = -max over the sector of cos(theta/2 + pi) = min of cos(theta/2).
  double delta_c() const;
};

class Polygon {
 public:
  /// Validated construction: at least three finite vertices, consecutive ones
  /// distinct, no self-intersection, positive signed area (counterclockwise).
  explicit Polygon(std::vector<Vec2> vertices);
  /// The empty polygon, returned by halfplane_hull for inconsistent input.
  Polygon() = default;

  const std::vector<Vec2>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  const Vec2& operator[](std::size_t i) const { return v_[i]; }
  /// Vertex with cyclic indexing.
  const Vec2& at(long i) const;

  double area() const;
  Vec2 centroid() const;
  double diameter() const;
  Polygon translated(Vec2 d) const;

 private:
  struct Unchecked {};
  Polygon(std::vector<Vec2> vertices, Unchecked) : v_(std::move(vertices)) {}
  friend Polygon make_polygon_unchecked(std::vector<Vec2>);
  std::vector<Vec2> v_;
};

/// Wraps vertices without validation. For constructions that are convex and
/// counterclockwise by design (hull clipping, translation).
Polygon make_polygon_unchecked(std::vector<Vec2> vertices);

/// Throws DomainError naming the first violated polygon invariant.
void validate_polygon(const std::vector<Vec2>& vertices);

double signed_area(const std::vector<Vec2>& vertices);

/// Interior angle at a vertex of a counterclockwise polygon, in (0, 2*pi).
double interior_angle(const Polygon& polygon, std::size_t vertex_index);

/// Local frame at a polygon vertex: world = vertex + R(rotation) * local. In
/// local coordinates the interior bisector is the positive x-axis.
struct CornerFrame {
  Vec2 vertex;
  double rotation;
  Sector sector;
  double opening;

  Vec2 to_world(Vec2 local) const { return vertex + rotate(local, rotation); }
  Vec2 to_local(Vec2 world) const { return rotate(world - vertex, -rotation); }
  Vec2 dir_to_world(Vec2 local) const { return rotate(local, rotation); }
  Vec2 dir_to_local(Vec2 world) const { return rotate(world, -rotation); }
};

/// Throws DegenerateCornerError when the interior angle equals pi.
CornerFrame corner_frame(const Polygon& polygon, std::size_t vertex_index);

/// Distance from a vertex to the nearest edge not incident to it.
double distance_to_nonadjacent_edges(const Polygon& polygon, std::size_t vertex_index);

/// Ball radius for corner analysis: 0.4 times distance_to_nonadjacent_edges.
double default_ball_radius(const Polygon& polygon, std::size_t vertex_index);

/// h(omega) = max over the polygon of x . omega. omega must be unit length.
double support_function(const Polygon& polygon, Vec2 omega);

/// Bounded intersection of {x : x . omega_j <= h_j}. Returns the empty polygon
/// when the intersection is empty; throws CoverageError when it is unbounded.
Polygon halfplane_hull(const std::vector<Vec2>& omegas, const std::vector<double>& h);

/// Even-odd membership; points on the boundary count as inside.
bool point_in_polygon(const Polygon& polygon, Vec2 x);

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);
double distance_to_boundary(const Polygon& polygon, Vec2 p);

/// Convex hull, counterclockwise, collinear points dropped.
Polygon convex_hull(const std::vector<Vec2>& points);

/// Hausdorff distance between two convex polygons viewed as closed regions.
double hausdorff_distance_convex(const Polygon& a, const Polygon& b);

/// Smallest disc containing all vertices.
struct Circle {
  Vec2 center;
  double radius;
};
Circle minimal_enclosing_circle(const std::vector<Vec2>& points);

/// Edge geometry (B cap C) x (-L, L): a sector, the ball radius and the half length.
struct Prism {
  Sector base;
  double radius;
  double half_length;
};

}  // namespace crad
