#include "crad/forward.hpp"

#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "crad/errors.hpp"
#include "crad/parallel.hpp"
#include "crad/specfun.hpp"

namespace crad {

using std::numbers::pi;

Density Density::zero() { return constant(0.0); }

Density Density::constant(cplx c) {
  Density d;
  d.kind = "constant";
  d.eval = [c](Vec2) { return c; };
  d.alpha = 1.0;
  d.holder_constant = 0.0;
  return d;
}

Density Density::affine(cplx c0, cplx cx, cplx cy) {
  Density d;
  d.kind = "affine";
  d.eval = [=](Vec2 x) { return c0 + cx * x.x + cy * x.y; };
  d.alpha = 1.0;
  d.holder_constant = std::hypot(std::abs(cx), std::abs(cy));
  return d;
}

Density Density::holder(cplx base, cplx amplitude, Vec2 center, double alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw DomainError("Density::holder: alpha must lie in (0, 1]");
  Density d;
  d.kind = "holder";
  d.eval = [=](Vec2 x) { return base + amplitude * std::pow(norm(x - center), alpha); };
  d.alpha = alpha;
  d.holder_constant = std::abs(amplitude);
  return d;
}

SourceTerm::SourceTerm(Polygon support, Density density, double k)
    : support_(std::move(support)), density_(std::move(density)), k_(k) {
  if (!(k > 0) || !std::isfinite(k)) throw DomainError("SourceTerm: wavenumber must be positive");
  if (support_.empty()) throw DomainError("SourceTerm: empty support");
  if (!density_.eval) throw DomainError("SourceTerm: density has no evaluator");
  if (!(density_.alpha > 0 && density_.alpha <= 1)) throw DomainError("SourceTerm: alpha must lie in (0, 1]");
  // Deterministic polar lattice of 1000 points per vertex: 25 radii x 40 angles.
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const Vec2 v = support_[i];
    const cplx fv = density_(v);
    for (int a = 0; a < 40; ++a) {
      for (int r = 1; r <= 25; ++r) {
        const double rad = 0.1 * r / 25.0;
        const Vec2 x = v + rad * unit(2 * pi * (a + 0.5) / 40);
        if (!point_in_polygon(support_, x)) continue;
        const double bound = density_.holder_constant * std::pow(rad, density_.alpha);
        if (std::abs(density_(x) - fv) > bound * (1 + 1e-9) + 1e-12)
          throw DomainError("SourceTerm: density violates its declared Hoelder bound near vertex " +
                            std::to_string(i));
      }
    }
  }
}

cplx SourceTerm::f(Vec2 x) const { return point_in_polygon(support_, x) ? density_(x) : cplx(0.0); }

cplx far_field_constant(double k) {
  return cplx(0, -0.25) * std::sqrt(2 / (pi * k)) * std::polar(1.0, -pi / 4);
}

ForwardSolver::ForwardSolver(SourceTerm source, QuadratureSpec field_spec)
    : source_(std::move(source)), spec_(field_spec) {
  spec_.validate();
  // Absolute tolerances are relative to the source mass scale sup|phi| * area,
  // so cancelling (nonradiating) integrals stay above the rounding floor.
  double sup = std::abs(source_.density()(source_.support().centroid()));
  for (const auto& v : source_.support().vertices()) sup = std::max(sup, std::abs(source_.density()(v)));
  spec_.abs_tol *= std::max(1.0, sup * source_.support().area());
}

QuadratureSpec ForwardSolver::default_field_spec() {
  QuadratureSpec s;
  s.rel_tol = 1e-12;
  s.abs_tol = 1e-13;
  s.max_subdivisions = 4000;
  return s;
}

FarField ForwardSolver::far_field(const std::vector<Vec2>& directions, double abs_tol) const {
  FarField ff;
  ff.k = source_.k();
  ff.directions = directions;
  ff.values.resize(directions.size());
  ff.physical_constant = far_field_constant(source_.k());
  for (const auto& d : directions)
    if (std::abs(norm(d) - 1.0) > 1e-12) throw DomainError("far_field: directions must be unit vectors");
  QuadratureSpec spec = spec_;
  spec.abs_tol = abs_tol;
  spec.rel_tol = std::max(1e-13, std::min(spec.rel_tol, abs_tol));
  const double k = source_.k();
  const auto& phi = source_.density();
  parallel_for(directions.size(), [&](std::size_t j) {
    const Vec2 d = directions[j];
    auto integrand = [&](Vec2 y) { return std::polar(1.0, -k * dot(d, y)) * phi(y); };
    ff.values[j] = integrate_polygon_t<cplx>(integrand, source_.support(), std::nullopt, spec, phi.kinks).value;
  });
  return ff;
}

FieldSample ForwardSolver::sample(Vec2 x) const {
  const double k = source_.k();
  const auto& phi = source_.density();
  // rel = y - x from the quadrature, exact near the apex.
  auto integrand = [&](Vec2 y, Vec2 rel) {
    const Vec2 d = -rel;
    const double rho = norm(d);
    if (!(rho > 0)) return CVec<3>{};
    cplx h0, h1;
    hankel01(k * rho, h0, h1);
    const cplx fy = phi(y);
    const cplx g = cplx(0, 0.25 * k) * h1 * fy / rho;
    CVec<3> out;
    out[0] = cplx(0, -0.25) * h0 * fy;
    out[1] = g * d.x;
    out[2] = g * d.y;
    return out;
  };
  const auto r = integrate_polygon_t<CVec<3>>(integrand, source_.support(), x, spec_, phi.kinks);
  return {r.value[0], {r.value[1], r.value[2]}};
}

cplx ForwardSolver::field(Vec2 x) const { return sample(x).u; }

std::vector<FieldSample> ForwardSolver::sample_many(const std::vector<Vec2>& xs) const {
  std::vector<FieldSample> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = sample(xs[i]); });
  return out;
}

VolumeRule ForwardSolver::volume_rule(int order) const {
  const GaussRule& g = gauss_legendre(order);
  const Polygon& poly = source_.support();
  const Vec2 p = poly.centroid();
  VolumeRule rule;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly.at(static_cast<long>(i) + 1);
    const double jac = 2 * cross(a - p, b - p);
    if (std::abs(jac) <= 1e-14 * poly.diameter() * norm(b - a)) continue;
    for (int it = 0; it < order; ++it) {
      const double t = 0.5 * (1 + g.x[it]);
      const Vec2 e = a + t * (b - a);
      for (int im = 0; im < order; ++im) {
        const double mu = 0.5 * (1 + g.x[im]);
        const Vec2 y = p + (mu * mu) * (e - p);
        const double w = 0.25 * g.w[it] * g.w[im] * jac * mu * mu * mu;
        rule.nodes.push_back(y);
        rule.weighted_f.push_back(w * source_.density()(y));
      }
    }
  }
  return rule;
}

FieldSample sample_from_rule(const VolumeRule& rule, double k, Vec2 x) {
  std::vector<CVec<3>> terms(rule.nodes.size());
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const Vec2 d = x - rule.nodes[j];
    const double rho = norm(d);
    if (!(rho > 0)) throw DomainError("sample_from_rule: evaluation point coincides with a source node");
    cplx h0, h1;
    hankel01(k * rho, h0, h1);
    const cplx fy = rule.weighted_f[j];
    const cplx g = cplx(0, 0.25 * k) * h1 * fy / rho;
    terms[j][0] = cplx(0, -0.25) * h0 * fy;
    terms[j][1] = g * d.x;
    terms[j][2] = g * d.y;
  }
  const CVec<3> s = pairwise_sum<CVec<3>>(terms);
  return {s[0], {s[1], s[2]}};
}

namespace {

CauchyData assemble(const BoundaryRule& rule, const std::vector<FieldSample>& samples) {
  CauchyData data;
  data.rule = rule;
  data.u.resize(rule.size());
  data.du_dnu.resize(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Vec2 n = rule.normals[i];
    data.u[i] = samples[i].u;
    data.du_dnu[i] = samples[i].grad[0] * n.x + samples[i].grad[1] * n.y;
  }
  return data;
}

}  // namespace

CauchyData cauchy_data(const ForwardSolver& solver, const BoundaryRule& rule) {
  return assemble(rule, solver.sample_many(rule.nodes));
}

CauchyData cauchy_data_from_rule(const VolumeRule& volume, double k, const BoundaryRule& rule) {
  std::vector<FieldSample> samples(rule.size());
  parallel_for(rule.size(), [&](std::size_t i) { samples[i] = sample_from_rule(volume, k, rule.nodes[i]); });
  return assemble(rule, samples);
}

double h20_profile(Vec2 c, double rho, Vec2 x) {
  const double q = dot(x - c, x - c) / (rho * rho);
  if (q >= 1) return 0.0;
  return (1 - q) * (1 - q) * (1 - q);
}

double h20_laplacian(Vec2 c, double rho, Vec2 x) {
  const double q = dot(x - c, x - c) / (rho * rho);
  if (q >= 1) return 0.0;
  return -12 * (1 - q) * (1 - 3 * q) / (rho * rho);
}

SourceTerm h20_source(Vec2 center, double radius, double k) {
  if (!(radius > 0)) throw DomainError("h20_source: radius must be positive");
  constexpr int n = 16;
  const double vr = 1.05 * radius / std::cos(pi / n);
  std::vector<Vec2> verts;
  for (int j = 0; j < n; ++j) verts.push_back(center + vr * unit(2 * pi * j / n));
  Density d;
  d.kind = "h20";
  d.eval = [=](Vec2 x) -> cplx { return h20_laplacian(center, radius, x) + k * k * h20_profile(center, radius, x); };
  d.alpha = 1.0;
  // Lipschitz bound of Delta v + k^2 v over the disc.
  d.holder_constant = 96 / (radius * radius * radius) + 6 * k * k / radius;
  d.kinks = {Circle{center, radius}};
  return SourceTerm(Polygon(std::move(verts)), std::move(d), k);
}

Polygon disc_polygon(Vec2 center, double r0, int n) {
  if (n < 3 || !(r0 > 0)) throw DomainError("disc_polygon: need n >= 3 and r0 > 0");
  const double a = pi / n;
  const double mean_over_vertex = std::cos(a) * (n / pi) * std::log(1 / std::cos(a) + std::tan(a));
  const double vr = r0 / mean_over_vertex;
  std::vector<Vec2> verts;
  for (int j = 0; j < n; ++j) verts.push_back(center + vr * unit(2 * pi * j / n));
  return Polygon(std::move(verts));
}

SourceTerm disc_source(Vec2 center, double r0, double k, cplx value, int n) {
  return SourceTerm(disc_polygon(center, r0, n), Density::constant(value), k);
}

void add_gaussian_noise(CauchyData& data, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0)) throw DomainError("add_gaussian_noise: sigma must be >= 0");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, sigma);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double a = n(gen), b = n(gen), c = n(gen), d = n(gen);
    data.u[i] += cplx(a, b);
    data.du_dnu[i] += cplx(c, d);
  }
}

void write_far_field_csv(std::ostream& os, const FarField& ff) {
  os << "dir_x,dir_y,re,im\n";
  char buf[160];
  for (std::size_t j = 0; j < ff.values.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", ff.directions[j].x, ff.directions[j].y,
                  ff.values[j].real(), ff.values[j].imag());
    os << buf;
  }
}

std::vector<Vec2> uniform_directions(int n) {
  std::vector<Vec2> d;
  for (int j = 0; j < n; ++j) d.push_back(unit(2 * pi * j / n));
  return d;
}

}  // namespace crad
