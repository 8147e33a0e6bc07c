#include <cmath>
#include <numbers>

#include "crad/errors.hpp"
#include "crad/quadrature.hpp"
#include "crad/specfun.hpp"
#include "crad/waves.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crad;
using std::numbers::pi;

namespace {

QuadratureSpec tight() {
  QuadratureSpec s;
  s.rel_tol = 1e-12;
  s.abs_tol = 1e-14;
  return s;
}

Polygon unit_square() { return Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

Polygon regular_polygon(int n, double r) {
  std::vector<Vec2> v;
  for (int j = 0; j < n; ++j) v.push_back(r * unit(2 * pi * j / n));
  return Polygon(v);
}

// Tensor Gauss oracle on the unit square.
template <class F>
cplx tensor_square(F f) {
  return oracle::composite(
      [&](double x) { return oracle::composite([&](double y) { return f(Vec2{x, y}); }, 0.0, 1.0, 4, 30); }, 0.0,
      1.0, 4, 30);
}

}  // namespace

TEST_CASE("sector integrals") {
  const auto area = integrate_sector([](Vec2) { return cplx(1); }, Sector(-pi / 4, pi / 4), 1.0, 0.0, tight());
  CHECK(std::abs(area.value - pi / 4) < 1e-13);

  const Sector q(0, pi / 2);
  BranchExponential p;
  const auto m = integrate_sector([&](Vec2 x) { return branch_exp(p, x); }, q, INFINITY, q.delta_c(), tight());
  CHECK(std::abs(m.value - cplx(0, -12)) < 1e-6 * 12);

  const auto g = integrate_sector([](Vec2 x) { return cplx(std::exp(-dot(x, x))); }, Sector(-pi / 2, pi / 2),
                                  INFINITY, 1.0, tight());
  CHECK(std::abs(g.value - pi / 2) < 1e-12);

  CHECK_THROWS_AS(integrate_sector([](Vec2) { return cplx(1); }, q, INFINITY, 0.0, tight()), DomainError);
}

TEST_CASE("sector quadrature reports accuracy failure with the best estimate") {
  QuadratureSpec s = tight();
  s.max_subdivisions = 2;
  try {
    integrate_sector([](Vec2 x) { return cplx(std::sin(200 * x.x)); }, Sector(-1, 1), 1.0, 0.0, s);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(std::isfinite(e.best_estimate.real()));
    CHECK(e.achieved_error > 0);
  }
}

TEST_CASE("polygon integrals") {
  CHECK(std::abs(integrate_polygon([](Vec2) { return cplx(1); }, unit_square(), std::nullopt, tight()).value - 1.0) <
        1e-14);
  const auto l = integrate_polygon([](Vec2 x) { return cplx(std::log(norm(x))); }, regular_polygon(64, 1.0),
                                   Vec2{0, 0}, tight());
  CHECK(std::abs(l.value + pi / 2) < 1e-4);
  const auto j = integrate_polygon([](Vec2 x) { return cplx(bessel_j(0, norm(x))); }, unit_square(), std::nullopt,
                                   tight());
  const cplx ref = tensor_square([](Vec2 x) { return cplx(oracle::bessel_j(0, norm(x))); });
  CHECK(std::abs(j.value - ref) < 1e-9);
}

TEST_CASE("polygon signed fan handles non-convex polygons and outside apexes") {
  const Polygon l({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  auto f = [](Vec2 x) { return cplx(x.x * x.x + 3 * x.y); };
  // Exact: x^2 + 3y over the L = [0,2]x[0,1] + [0,1]x[1,2].
  const double exact = (8.0 / 3 + 3.0) + (1.0 / 3 + 4.5);
  for (auto apex : {std::optional<Vec2>{}, std::optional<Vec2>{Vec2{1.5, 1.5}}, std::optional<Vec2>{Vec2{1, 1}},
                    std::optional<Vec2>{Vec2{-3, 0.2}}}) {
    CHECK(std::abs(integrate_polygon(f, l, apex, tight()).value - exact) < 1e-12);
  }
}

TEST_CASE("polygon log singularity at a vertex and on an edge") {
  // int over [0,1]^2 of log|x| = (ln 2 - 3 + pi/2)/2.
  const double exact = (std::log(2.0) - 3 + pi / 2) / 2;
  const auto r = integrate_polygon([](Vec2 x) { return cplx(std::log(norm(x))); }, unit_square(), Vec2{0, 0}, tight());
  CHECK(std::abs(r.value - exact) < 1e-12);
  // Singularity at an edge midpoint: the same integral shifted by (-1/2, 0) is twice the half-square value.
  const Polygon shifted({{-0.5, 0}, {0.5, 0}, {0.5, 1}, {-0.5, 1}});
  const double half = oracle::composite(
      [](double x) { return oracle::composite([&](double y) { return 0.5 * std::log(x * x + y * y); }, 0.0, 1.0, 64, 20); },
      0.0, 0.5, 64, 20);
  const auto e = integrate_polygon([](Vec2 x) { return cplx(std::log(norm(x))); }, shifted, Vec2{0, 0}, tight());
  CHECK(std::abs(e.value - 2 * half) < 1e-8);
}

TEST_CASE("boundary integrals") {
  const Curve circle = {BoundaryPiece::arc({0, 0}, 2.0, 0, 2 * pi)};
  CHECK(std::abs(integrate_boundary([](Vec2, Vec2) { return cplx(1); }, circle, tight()).value - 4 * pi) < 1e-13);
  const Curve seg = {BoundaryPiece::segment({0, 0}, {1, 0}, true, false)};
  const auto r = integrate_boundary([](Vec2 x, Vec2) { return cplx(1 / std::sqrt(x.x)); }, seg, tight());
  CHECK(std::abs(r.value - 2.0) < 1e-12);
  // Outward normals of a counterclockwise circle.
  integrate_boundary(
      [](Vec2 x, Vec2 n) {
        CHECK(norm(n - 0.5 * x) < 1e-12);
        return cplx(0);
      },
      circle, tight());
}

TEST_CASE("Green identity on a corner region: boundary vs sector quadrature") {
  // int_{dD} (u0 dn g - g dn u0) = int_D u0 for g = |x|^2/4.
  for (double opening : {pi / 2, 3 * pi / 2}) {
    const Polygon frame_host = opening < pi ? unit_square()
                                            : Polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
    const auto frame = corner_frame(frame_host, opening < pi ? 0 : 3);
    const double h = 0.4;
    BranchExponential p;
    p.s = 50.0;
    auto bf = [&](Vec2 x, Vec2 n) {
      const Vec2 xl = frame.to_local(x), nl = frame.dir_to_local(n);
      const auto w = branch_exp_sample(p, xl);
      const double g = dot(xl, xl) / 4;
      const double dg = 0.5 * dot(xl, nl);
      return w.value * dg - g * (w.grad[0] * nl.x + w.grad[1] * nl.y);
    };
    const auto lhs = integrate_boundary(bf, corner_curve(frame, h), tight());
    const auto rhs = integrate_sector([&](Vec2 x) { return branch_exp(p, x); }, frame.sector, h,
                                      frame.sector.delta_c() * std::sqrt(p.s), tight());
    CHECK(std::abs(lhs.value - rhs.value) < 1e-10 * std::abs(rhs.value));
    // The fixed corner rule agrees with the adaptive one.
    const auto rule = corner_rule(frame, h, p.s);
    std::vector<cplx> vals;
    for (std::size_t i = 0; i < rule.size(); ++i) vals.push_back(bf(rule.nodes[i], rule.normals[i]));
    CHECK(std::abs(apply_rule(rule, vals) - rhs.value) < 1e-10 * std::abs(rhs.value));
  }
}

TEST_CASE("fixed rules") {
  const auto c = circle_rule({1, 2}, 3.0, 64);
  double len = 0;
  for (double w : c.weights) len += w;
  CHECK(std::abs(len - 6 * pi) < 1e-12);
  const Curve seg = {BoundaryPiece::segment({0, 0}, {1, 0}, true, false)};
  const auto r = composite_rule(seg, 4, 16, 20);
  std::vector<cplx> v;
  for (auto x : r.nodes) v.push_back(1 / std::sqrt(x.x));
  CHECK(std::abs(apply_rule(r, v) - 2.0) < 1e-13);
}

TEST_CASE("error estimates bound the true error on closed-form integrands") {
  const auto s = tight();
  struct Case {
    const char* name;
    QuadResult<cplx> r;
    cplx exact;
  };
  BranchExponential p;
  const Sector q(0, pi / 2);
  const double k = 7.0;
  const Vec2 d = unit(0.3);
  auto osc1d = [&](double a) { return std::abs(a) < 1e-14 ? cplx(1) : (std::exp(cplx(0, a)) - 1.0) / cplx(0, a); };
  std::vector<Case> cases = {
      {"sector area", integrate_sector([](Vec2) { return cplx(1); }, Sector(-pi / 4, pi / 4), 1.0, 0.0, s), pi / 4},
      {"sector moment",
       integrate_sector([&](Vec2 x) { return branch_exp(p, x); }, q, INFINITY, q.delta_c(), s), cplx(0, -12)},
      {"sector gaussian",
       integrate_sector([](Vec2 x) { return cplx(std::exp(-dot(x, x))); }, Sector(-pi / 2, pi / 2), INFINITY, 1.0, s),
       pi / 2},
      {"polygon constant", integrate_polygon([](Vec2) { return cplx(1); }, unit_square(), std::nullopt, s), 1.0},
      {"polygon log", integrate_polygon([](Vec2 x) { return cplx(std::log(norm(x))); }, unit_square(), Vec2{0, 0}, s),
       (std::log(2.0) - 3 + pi / 2) / 2},
      {"polygon J0",
       integrate_polygon([](Vec2 x) { return cplx(bessel_j(0, norm(x))); }, unit_square(), std::nullopt, s),
       tensor_square([](Vec2 x) { return cplx(oracle::bessel_j(0, norm(x))); })},
      {"polygon gaussian",
       integrate_polygon([](Vec2 x) { return cplx(std::exp(-dot(x, x))); }, unit_square(), std::nullopt, s),
       std::pow(std::sqrt(pi) / 2 * std::erf(1.0), 2)},
      {"polygon polynomial", integrate_polygon([](Vec2 x) { return cplx(x.x * x.x * x.y); }, unit_square(),
                                               std::nullopt, s),
       1.0 / 6},
      {"polygon oscillatory",
       integrate_polygon([&](Vec2 x) { return std::exp(cplx(0, k * dot(x, d))); }, unit_square(), std::nullopt, s),
       osc1d(k * d.x) * osc1d(k * d.y)},
      {"boundary circle",
       integrate_boundary([](Vec2, Vec2) { return cplx(1); }, {BoundaryPiece::arc({0, 0}, 2.0, 0, 2 * pi)}, s),
       4 * pi},
      {"boundary sqrt", integrate_boundary([](Vec2 x, Vec2) { return cplx(1 / std::sqrt(x.x)); },
                                           {BoundaryPiece::segment({0, 0}, {1, 0}, true, false)}, s),
       2.0},
      {"boundary oscillatory",
       integrate_boundary([&](Vec2 x, Vec2) { return std::exp(cplx(0, k * x.x)); },
                          {BoundaryPiece::arc({0, 0}, 1.0, 0, 2 * pi)}, s),
       2 * pi * oracle::bessel_j(0, k)},
  };
  for (const auto& c : cases) {
    INFO(c.name);
    const double err = std::abs(c.r.value - c.exact);
    CHECK(err <= c.r.error + 1e-14 * std::abs(c.exact));
    CHECK(err <= 1e-10 * std::max(1.0, std::abs(c.exact)));
  }
}

TEST_CASE("upper bound: int_C |u0(sx)| |x|^alpha <= 2 opening Gamma(2a+4) / delta^(2a+4) s^(-a-2)") {
  for (double alpha : {0.25, 0.5, 1.0})
    for (double opening : {pi / 3, pi / 2, 3 * pi / 2})
      for (double s : {1.0, 4.0, 16.0, 64.0}) {
        const Sector sec = Sector::symmetric(opening);
        BranchExponential p;
        p.s = s;
        const double delta = sec.delta_c();
        const auto r = integrate_sector([&](Vec2 x) { return cplx(std::abs(branch_exp(p, x)) * std::pow(norm(x), alpha)); },
                                        sec, INFINITY, delta * std::sqrt(s), tight());
        const double bound =
            2 * opening * gamma_upper(2 * alpha + 4, 0) / std::pow(delta, 2 * alpha + 4) * std::pow(s, -alpha - 2);
        CHECK(r.value.real() <= bound);
      }
}

TEST_CASE("tail bound over C minus B(0,h), constant from the proof") {
  // int_h^inf e^{-delta sqrt(s r)} r dr = 2 Gamma(4, d) / (delta^4 s^2) with d = delta sqrt(h s), and
  // Gamma(4, d) <= 2^4 Gamma(4) e^{-d/2}, so the bound constant is 2 * 16 * 6 = 192.
  for (double opening : {pi / 3, pi / 2, 3 * pi / 2})
    for (double h : {0.5, 1.0, 2.0})
      for (double s : {16.0, 64.0, 256.0}) {
        const Sector sec = Sector::symmetric(opening);
        BranchExponential p;
        p.s = s;
        const double delta = sec.delta_c();
        const auto r = integrate_sector([&](Vec2 x) { return cplx(std::abs(branch_exp(p, x))); }, sec, INFINITY,
                                        delta * std::sqrt(s), tight(), h);
        const double d = delta * std::sqrt(h * s);
        const double exact_envelope = opening * 2 * gamma_upper(4, d) / (std::pow(delta, 4) * s * s);
        const double bound = 192 * opening / std::pow(delta, 4) / (s * s) * std::exp(-d / 2);
        CHECK(r.value.real() > 0);
        CHECK(r.value.real() <= exact_envelope);
        CHECK(exact_envelope <= bound);
      }
}
