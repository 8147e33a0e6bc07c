#include <cmath>
#include <numbers>

#include "crad/corner.hpp"
#include "crad/errors.hpp"
#include "crad/quadrature.hpp"
#include "crad/waves.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crad;
using std::numbers::pi;

namespace {

CornerFrame local_frame(const Sector& q) { return CornerFrame{{0, 0}, 0.0, q, q.opening()}; }

// Cauchy data of w on the corner curve, in the local frame.
template <class W, class G>
CornerData manufactured(const Sector& q, double h, double s_max, W w, G grad) {
  const auto frame = local_frame(q);
  CornerData cd{frame, h, {corner_rule(frame, h, s_max), {}, {}}};
  for (std::size_t j = 0; j < cd.data.rule.size(); ++j) {
    const Vec2 x = cd.data.rule.nodes[j], n = cd.data.rule.normals[j];
    const Vec2 g = grad(x);
    cd.data.u.push_back(w(x));
    cd.data.du_dnu.push_back(dot(g, n));
  }
  return cd;
}

// int over the truncated sector of exp(-sqrt(s r) e^{i theta/2}) r dr dtheta, with r = t^2.
cplx oracle_truncated_moment(const Sector& q, double s, double h) {
  const double rs = std::sqrt(s), th = std::sqrt(h);
  auto inner = [&](double theta) {
    const cplx w = std::polar(1.0, theta / 2);
    return oracle::composite([&](double t) { return std::exp(-rs * t * w) * (2 * t * t * t); }, 0.0, th, 64);
  };
  return oracle::composite(inner, q.theta_min, q.theta_max, 16);
}

Polygon centered_square() { return Polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}); }
// Acute: the measurement circle keeps a margin in every direction.
Polygon triangle() { return Polygon({{0.7, -0.1}, {-0.4, 0.6}, {-0.3, -0.6}}); }
Polygon l_shape(Vec2 shift = {0, 0}) {
  return Polygon({Vec2{0, 0} + shift, Vec2{2, 0} + shift, Vec2{2, 1} + shift, Vec2{1, 1} + shift, Vec2{1, 2} + shift,
                  Vec2{0, 2} + shift});
}
Polygon pentagon() {
  const auto dirs = uniform_directions(32);
  std::vector<Vec2> normals;
  for (int i : {0, 7, 13, 19, 26}) normals.push_back(dirs[i]);
  return halfplane_hull(normals, std::vector<double>(5, 0.5));
}

CauchyData enclosure_data(const Polygon& p, double k = 1.0) {
  ForwardSolver s(SourceTerm(p, Density::constant(1.0), k));
  const Circle c = enclosure_circle(p);
  return cauchy_data_from_rule(s.volume_rule(48), k, circle_rule(c.center, c.radius, 512));
}

const std::vector<double> kOpenings = {pi / 6,      pi / 3,      pi / 2,      2 * pi / 3, 5 * pi / 6,
                                       7 * pi / 6,  4 * pi / 3,  3 * pi / 2,  5 * pi / 3, 11 * pi / 6};

}  // namespace

TEST_CASE("sector moment closed form") {
  CHECK(std::abs(sector_moment(Sector(0, pi / 2), 1.0) - cplx(0, -12)) < 1e-13);
  CHECK(std::abs(sector_moment(Sector(-pi / 4, pi / 4), 2.0) - cplx(3, 0)) < 1e-13);
  CHECK_THROWS_AS(sector_moment(Sector(-pi / 2, pi / 2), 3.0), DegenerateCornerError);
  CHECK_THROWS_AS(sector_moment(Sector(-pi / 4, pi / 4), 0.0), DomainError);
}

TEST_CASE("contour identity int_0^inf e^{-w t} t^3 dt = 6 / w^4") {
  for (double theta : {-2.5, -1.0, 0.0, 0.7, 2.9}) {
    const cplx w = std::polar(1.0, theta / 2);
    const cplx num = oracle::composite([&](double t) { return std::exp(-w * t) * (t * t * t); }, 0.0, 400.0 / w.real(), 512);
    CHECK(std::abs(num - 6.0 / (w * w * w * w)) <= 1e-10);
  }
}

TEST_CASE("sector moment matches sector quadrature, convex and non-convex") {
  QuadratureSpec spec;
  // 11 pi / 6 sits at the round-off floor of the radial integral below 1e-9.
  spec.rel_tol = 1e-8;
  spec.abs_tol = 1e-12;
  int count = 0;
  const auto sectors = moment_suite();
  REQUIRE(sectors.size() == 12);
  for (std::size_t i = 0; i < sectors.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(sectors[i].opening() - sectors[j].opening()) > 1e-3);
  for (const auto& q : sectors) {
    for (double s : {1.0, 10.0}) {
      BranchExponential p;
      p.s = s;
      const auto num = integrate_sector([&](Vec2 x) { return branch_exp(p, x); }, q, INFINITY, q.delta_c() * std::sqrt(s), spec);
      const cplx exact = sector_moment(q, s);
      CHECK(std::abs(num.value - exact) <= 1e-6 * std::abs(exact));
      ++count;
    }
  }
  CHECK(count == 24);
}

TEST_CASE("sector moment scaling law") {
  for (double o : kOpenings) {
    const auto q = Sector::symmetric(o);
    const cplx m = sector_moment_coefficient(q);
    for (double s : {0.5, 3.0, 1e4}) CHECK(std::abs(sector_moment(q, s) * s * s - m) <= 1e-15 * std::abs(m));
  }
}

TEST_CASE("lower incomplete gamma and truncated moment") {
  // Series and closed-form branches agree near the switch radius.
  for (cplx z : {cplx(1.99, 0.1), cplx(-0.5, 1.93), cplx(0, 1.999)}) {
    const cplx closed = 6.0 - std::exp(-z) * (((z + 3.0) * z + 6.0) * z + 6.0);
    CHECK(std::abs(lower_gamma4(z) - closed) <= 1e-13 * std::abs(closed));
  }
  CHECK(std::abs(lower_gamma4(cplx(1e-3, 0)) - (0.25e-12 - 0.2e-15 + 1e-18 / 12)) < 1e-22);
  for (double o : {pi / 2, 3 * pi / 2}) {
    const auto q = Sector::symmetric(o);
    for (double s : {1.0, 50.0}) {
      const cplx a = truncated_sector_moment(q, s, 0.7), b = oracle_truncated_moment(q, s, 0.7);
      CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));
    }
    // For delta_C sqrt(h s) large the truncation is invisible.
    const double s = 4e4;
    CHECK(std::abs(truncated_sector_moment(q, s, 1.0) - sector_moment(q, s)) <= 1e-8 * std::abs(sector_moment(q, s)));
  }
}

TEST_CASE("schedule validation") {
  const auto q = Sector::symmetric(pi / 2);
  const auto sch = SSchedule::for_corner(q, 0.5);
  CHECK(sch.s_values.size() == 6);
  CHECK(q.delta_c() * std::sqrt(0.5 * sch.s_values[0]) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK_NOTHROW(sch.validate(q, 0.5));
  CHECK_THROWS_AS(sch.validate(q, 0.25), DomainError);
  CHECK_THROWS_AS(SSchedule::geometric(1, 2, 3).validate(q, 1e6), DomainError);
  CHECK_THROWS_AS(SSchedule::geometric(1, 1, 5), DomainError);
}

TEST_CASE("indicator: zero data and the Laplacian-one example") {
  const auto q = Sector::symmetric(pi / 2);
  const auto zero = manufactured(q, 1.0, 400, [](Vec2) { return cplx(0); }, [](Vec2) { return Vec2{0, 0}; });
  CHECK(corner_indicator(zero, 400) == cplx(0));

  const auto cd = manufactured(q, 1.0, 400, [](Vec2 x) { return cplx(dot(x, x) / 4); }, [](Vec2 x) { return 0.5 * x; });
  const cplx i = corner_indicator(cd, 400);
  // Green's identity turns I into the truncated moment; checked by the polar oracle.
  CHECK(std::abs(i - oracle_truncated_moment(q, 400, 1.0)) <= 1e-9 * std::abs(i));
  // Tail bound: |I - M/s^2| <= 192 / s^2 * Gamma(4, delta sqrt(s h)) / delta^4, loosely.
  const double d = q.delta_c() * std::sqrt(400.0);
  const double tail = 2 * 6 * std::exp(-d) * (d * d * d / 6 + d * d / 2 + d + 1) / std::pow(q.delta_c(), 4) / (400.0 * 400);
  CHECK(std::abs(i - 7.5e-5) <= tail);
  CHECK(std::abs(i - 7.5e-5) < 1e-9);
}

TEST_CASE("indicator vanishes for harmonic polynomials") {
  using P = std::pair<std::function<double(Vec2)>, std::function<Vec2(Vec2)>>;
  const std::vector<P> harmonic = {
      {[](Vec2) { return 1.0; }, [](Vec2) { return Vec2{0, 0}; }},
      {[](Vec2 x) { return x.x - 2 * x.y; }, [](Vec2) { return Vec2{1, -2}; }},
      {[](Vec2 x) { return x.x * x.x - x.y * x.y; }, [](Vec2 x) { return Vec2{2 * x.x, -2 * x.y}; }},
      {[](Vec2 x) { return x.x * x.y; }, [](Vec2 x) { return Vec2{x.y, x.x}; }},
      {[](Vec2 x) { return x.x * x.x * x.x - 3 * x.x * x.y * x.y; },
       [](Vec2 x) { return Vec2{3 * x.x * x.x - 3 * x.y * x.y, -6 * x.x * x.y}; }},
      {[](Vec2 x) { return 3 * x.x * x.x * x.y - x.y * x.y * x.y; },
       [](Vec2 x) { return Vec2{6 * x.x * x.y, 3 * x.x * x.x - 3 * x.y * x.y}; }},
      {[](Vec2 x) { return std::pow(x.x, 4) - 6 * x.x * x.x * x.y * x.y + std::pow(x.y, 4); },
       [](Vec2 x) { return Vec2{4 * std::pow(x.x, 3) - 12 * x.x * x.y * x.y, -12 * x.x * x.x * x.y + 4 * std::pow(x.y, 3)}; }},
      {[](Vec2 x) { return x.x * x.x * x.x * x.y - x.x * x.y * x.y * x.y; },
       [](Vec2 x) { return Vec2{3 * x.x * x.x * x.y - std::pow(x.y, 3), std::pow(x.x, 3) - 3 * x.x * x.y * x.y}; }},
  };
  for (double o : {pi / 2, 3 * pi / 2}) {
    const auto q = Sector::symmetric(o);
    for (const auto& [w, g] : harmonic) {
      const auto cd = manufactured(q, 1.0, 1000, [&](Vec2 x) { return cplx(w(x)); }, g);
      double norm = 0;
      for (auto v : cd.data.u) norm = std::max(norm, std::abs(v));
      for (double s : {10.0, 100.0, 1000.0}) CHECK(std::abs(corner_indicator(cd, s)) <= 1e-8 * norm);
    }
  }
}

TEST_CASE("arc-only regime and missing data") {
  const auto q = Sector::symmetric(pi / 2);
  // w = x1^2 x2^2 ... vanishes on the axes but not on the sides here, so use
  // a function vanishing with its normal derivative on both sides: w = (r sin(2 theta'))^2
  // with theta' measured from the lower side: w = (x.y cos a - x.x sin a)^2 (..)^2 product.
  const double a = q.theta_min, b = q.theta_max;
  auto l1 = [&](Vec2 x) { return -x.x * std::sin(a) + x.y * std::cos(a); };
  auto l2 = [&](Vec2 x) { return x.x * std::sin(b) - x.y * std::cos(b); };
  const Vec2 g1{-std::sin(a), std::cos(a)}, g2{std::sin(b), -std::cos(b)};
  auto w = [&](Vec2 x) { return cplx(l1(x) * l1(x) * l2(x) * l2(x)); };
  auto gw = [&](Vec2 x) { return (2 * l1(x) * l2(x) * l2(x)) * g1 + (2 * l1(x) * l1(x) * l2(x)) * g2; };
  const auto cd = manufactured(q, 1.0, 400, w, gw);
  for (double s : {100.0, 400.0}) {
    const cplx full = corner_indicator(cd, s), arc = corner_indicator(cd, s, IndicatorRegime::ArcOnly);
    CHECK(std::abs(full - arc) <= 1e-12 * std::abs(full));
  }
  CornerData arc_only = cd;
  std::vector<std::size_t> keep;
  CauchyData trimmed{{}, {}, {}};
  for (std::size_t j = 0; j < cd.data.rule.size(); ++j) {
    if (cd.data.rule.piece[j] != 1) continue;
    trimmed.rule.nodes.push_back(cd.data.rule.nodes[j]);
    trimmed.rule.normals.push_back(cd.data.rule.normals[j]);
    trimmed.rule.weights.push_back(cd.data.rule.weights[j]);
    trimmed.rule.piece.push_back(1);
    trimmed.u.push_back(cd.data.u[j]);
    trimmed.du_dnu.push_back(cd.data.du_dnu[j]);
  }
  arc_only.data = trimmed;
  CHECK_NOTHROW(corner_indicator(arc_only, 100, IndicatorRegime::ArcOnly));
  CHECK_THROWS_AS(corner_indicator(arc_only, 100), MissingDataError);
}

TEST_CASE("extraction: manufactured, zero and rate law") {
  for (double o : {pi / 2, 3 * pi / 2}) {
    const auto q = Sector::symmetric(o);
    const double h = 1.0;
    const auto sch = SSchedule::for_corner(q, h);
    {
      const auto cd = manufactured(q, h, sch.s_values.back(), [](Vec2 x) { return cplx(dot(x, x) / 4); },
                                   [](Vec2 x) { return 0.5 * x; });
      std::vector<cplx> ind;
      for (double s : sch.s_values) ind.push_back(corner_indicator(cd, s));
      const auto est = extract_corner_value(sch.s_values, ind, q, h, 1.0);
      CHECK(std::abs(est.value - 1.0) <= 1e-3);
      CHECK(est.residuals.size() == 6);
    }
    {
      std::vector<cplx> ind(sch.s_values.size(), 0.0);
      const auto est = extract_corner_value(sch.s_values, ind, q, h, 0.5);
      CHECK(est.value == cplx(0));
    }
    for (double alpha : {0.5, 1.0}) {
      // Delta w = 1 + r^alpha.
      const double p = alpha + 2;
      auto w = [&](Vec2 x) { const double r = norm(x); return cplx(r * r / 4 + std::pow(r, p) / (p * p)); };
      auto g = [&](Vec2 x) { const double r = norm(x); return (0.5 + std::pow(r, p - 2) / p) * x; };
      const auto cd = manufactured(q, h, sch.s_values.back(), w, g);
      std::vector<cplx> ind;
      for (double s : sch.s_values) ind.push_back(corner_indicator(cd, s));
      const auto est = extract_corner_value(sch.s_values, ind, q, h, alpha);
      CHECK(est.fitted_rate >= 0.7 * alpha);
      CHECK(est.fitted_rate <= 1.3 * alpha);
      CHECK(std::abs(est.value - 1.0) <= 1e-2);
    }
  }
}

TEST_CASE("extraction rejects an inconsistent indicator") {
  const auto q = Sector::symmetric(pi / 2);
  const auto sch = SSchedule::for_corner(q, 1.0);
  std::vector<cplx> ind;
  for (std::size_t j = 0; j < sch.s_values.size(); ++j)
    ind.push_back(sector_moment(q, sch.s_values[j]) * (j % 2 ? 1.0 : -1.0));
  CHECK_THROWS_AS(extract_corner_value(sch.s_values, ind, q, 1.0, 1.0), ExtractionError);
}

TEST_CASE("physical corner recovery at a square vertex") {
  const double k = 1.0;
  ForwardSolver s(SourceTerm(Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), Density::affine(2, 1, 0), k));
  const auto r = recover_corner(s, 0);
  CHECK(std::abs(r.target - (2.0 - k * k * r.u_vertex)) < 1e-14);
  CHECK(std::abs(r.estimate.value - r.target) <= 0.02 * std::abs(r.target));
  CHECK(r.estimate.fitted_rate > 0);
}

TEST_CASE("nonradiating test") {
  const auto h20 = h20_source({0.2, -0.1}, 1.0, 2.0);
  CHECK(nonradiating_test(ForwardSolver(h20).far_field(uniform_directions(32)), h20.support().area()).is_nonradiating);
  const double j11 = oracle::bisect(oracle::bessel_j1_series, 3.0, 4.5);
  const auto disc = disc_source({0, 0}, j11, 1.0);
  CHECK(nonradiating_test(ForwardSolver(disc).far_field(uniform_directions(32)), disc.support().area()).is_nonradiating);
  const Polygon l = l_shape();
  const auto res = nonradiating_test(ForwardSolver(SourceTerm(l, Density::constant(1.0), 1.0)).far_field(uniform_directions(32)),
                                     l.area());
  CHECK_FALSE(res.is_nonradiating);
  CHECK(res.norm > 0.1);
  CHECK_THROWS_AS(nonradiating_test(FarField{}, 0.0), DomainError);
}

TEST_CASE("enclosure support of a centered square") {
  const auto data = enclosure_data(centered_square());
  const auto est = enclosure_support_detail(data, {1, 0}, 1.0, {5, 10, 20, 40});
  CHECK(std::abs(est.h - 0.5) <= 0.02);
  CauchyData zero = data;
  for (auto& v : zero.u) v = 0;
  for (auto& v : zero.du_dnu) v = 0;
  CHECK_THROWS_AS(enclosure_support(zero, {1, 0}, 1.0, default_tau_schedule()), UndetectableDirectionError);
  CHECK_THROWS_AS(enclosure_support(data, {1, 0}, 1.0, {5, 10, 20}), DomainError);
}

TEST_CASE("enclosure support of a triangle in 32 directions") {
  const Polygon t = triangle();
  const auto data = enclosure_data(t);
  for (Vec2 om : uniform_directions(32)) CHECK(std::abs(enclosure_support(data, om, 1.0, default_tau_schedule()) - support_function(t, om)) <= 0.02);
}

TEST_CASE("enclosure hull: square, pentagon and the hull of an L") {
  const auto dirs = uniform_directions(32);
  for (const Polygon& p : {centered_square(), pentagon()}) {
    const Polygon hull = enclosure_hull(enclosure_data(p), 1.0, dirs, default_tau_schedule());
    CHECK(hausdorff_distance_convex(hull, p) <= 0.02 * p.diameter());
  }
  const Polygon l = l_shape({-1, -1});
  const Polygon hull = enclosure_hull(enclosure_data(l), 1.0, dirs, default_tau_schedule());
  const Polygon truth = convex_hull(l.vertices());
  CHECK(hausdorff_distance_convex(hull, truth) <= 0.02 * l.diameter());
  // The reflex vertex is not recovered: the hull contains the notch.
  CHECK(point_in_polygon(hull, {0.3, 0.3}));
  CHECK_THROWS_AS(enclosure_hull(enclosure_data(l), 1.0, uniform_directions(7), default_tau_schedule()), DomainError);
}
