#include "crad/edge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "crad/errors.hpp"
#include "crad/gauss.hpp"
#include "crad/parallel.hpp"

namespace crad {

using std::numbers::pi;

Window Window::bump(double L) {
  if (!(L > 0)) throw DomainError("Window: L must be positive");
  return Window{L};
}

double Window::phi(double x) const {
  const double q = x / L;
  if (!(std::abs(q) < 1)) return 0.0;
  return std::exp(-1.0 / (1 - q * q));
}

double Window::phi1(double x) const {
  const double q = x / L;
  if (!(std::abs(q) < 1)) return 0.0;
  const double m = 1 - q * q;
  return phi(x) * (-2 * q / (m * m)) / L;
}

double Window::phi2(double x) const {
  const double q = x / L;
  if (!(std::abs(q) < 1)) return 0.0;
  const double m = 1 - q * q;
  const double a1 = -2 * q / (m * m);
  const double a2 = -2 * (1 + 3 * q * q) / (m * m * m);
  return phi(x) * (a1 * a1 + a2) / (L * L);
}

AxialRule AxialRule::gauss(double L, int n) {
  if (!(L > 0) || n < 2) throw DomainError("AxialRule: need L > 0 and n >= 2");
  const GaussRule& g = gauss_legendre(n);
  AxialRule r;
  r.L = L;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(L * g.x[i]);
    r.weights.push_back(L * g.w[i]);
  }
  return r;
}

GridFunction3 GridFunction3::sample(std::vector<Vec2> points, AxialRule axial,
                                    const std::function<cplx(Vec2, double)>& g) {
  GridFunction3 out{std::move(points), std::move(axial), {}};
  out.values.reserve(out.points.size() * out.axial.size());
  for (const auto& x : out.points)
    for (double z : out.axial.nodes) out.values.push_back(g(x, z));
  return out;
}

std::vector<Vec2> polar_points(const Sector& sector, double r_max, int nr, int nt) {
  if (!(r_max > 0) || nr < 1 || nt < 1) throw DomainError("polar_points: need r_max > 0, nr >= 1, nt >= 1");
  std::vector<Vec2> pts;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nt; ++j) {
      const double r = (i + 0.5) * r_max / nr;
      const double th = sector.theta_min + (j + 0.5) * sector.opening() / nt;
      pts.push_back(r * unit(th));
    }
  return pts;
}

namespace {

// w_j e^{-i z_j xi} phi^(order)(z_j).
std::vector<cplx> axial_kernel(const AxialRule& a, const Window& w, double xi, int order) {
  if (order < 0 || order > 2) throw DomainError("axial transform: order must be 0, 1 or 2");
  if (std::abs(a.L - w.L) > 1e-12 * w.L) throw DomainError("axial transform: rule and window extents differ");
  std::vector<cplx> k(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double z = a.nodes[j];
    const double p = order == 0 ? w.phi(z) : order == 1 ? w.phi1(z) : w.phi2(z);
    k[j] = a.weights[j] * p * std::polar(1.0, -z * xi);
  }
  return k;
}

std::vector<cplx> apply_kernel(const GridFunction3& g, const std::vector<cplx>& k) {
  const std::size_t nz = g.axial.size();
  if (g.values.size() != g.points.size() * nz) throw DomainError("GridFunction3: value count mismatch");
  std::vector<cplx> out(g.points.size());
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    cplx s = 0;
    for (std::size_t j = 0; j < nz; ++j) s += k[j] * g.values[i * nz + j];
    out[i] = s;
  }
  return out;
}

cplx dot_kernel(const std::vector<cplx>& k, const std::vector<cplx>& v, std::size_t offset = 0) {
  cplx s = 0;
  for (std::size_t j = 0; j < k.size(); ++j) s += k[j] * v[offset + j];
  return s;
}

}  // namespace

std::vector<cplx> t_xi(const GridFunction3& g, const Window& w, double xi) {
  return apply_kernel(g, axial_kernel(g.axial, w, xi, 0));
}

std::vector<cplx> t_xi_derivative(const GridFunction3& g, const Window& w, double xi, int order) {
  return apply_kernel(g, axial_kernel(g.axial, w, xi, order));
}

cplx t_xi_profile(const AxialRule& axial, const std::vector<cplx>& values, const Window& w, double xi, int order) {
  if (values.size() != axial.size()) throw DomainError("t_xi_profile: value count mismatch");
  return dot_kernel(axial_kernel(axial, w, xi, order), values);
}

cplx axial_u_terms(const AxialRule& axial, const std::vector<cplx>& u, const Window& w, double xi) {
  return -t_xi_profile(axial, u, w, xi, 2) + cplx(0, 2 * xi) * t_xi_profile(axial, u, w, xi, 1) +
         xi * xi * t_xi_profile(axial, u, w, xi, 0);
}

std::vector<Vec2> stencil_points(const std::vector<Vec2>& centres, double spacing) {
  if (!(spacing > 0)) throw DomainError("stencil_points: spacing must be positive");
  std::vector<Vec2> pts;
  for (const auto& c : centres)
    for (Vec2 d : {Vec2{0, 0}, Vec2{spacing, 0}, Vec2{-spacing, 0}, Vec2{0, spacing}, Vec2{0, -spacing}})
      pts.push_back(c + d);
  return pts;
}

double fd_consistency_residual(const GridFunction3& u, const GridFunction3& f, double spacing) {
  const std::size_t nz = u.axial.size();
  if (u.points.size() % 5 != 0 || nz < 3) throw DomainError("fd_consistency_residual: not a stencil grid");
  const auto& z = u.axial.nodes;
  double res = 0, scale = 0;
  for (std::size_t c = 0; c < u.points.size(); c += 5) {
    for (std::size_t j = 1; j + 1 < nz; ++j) {
      const cplx lap_t = (u.at(c + 1, j) + u.at(c + 2, j) + u.at(c + 3, j) + u.at(c + 4, j) - 4.0 * u.at(c, j)) /
                         (spacing * spacing);
      const cplx dzz = 2.0 *
                       ((u.at(c, j + 1) - u.at(c, j)) / (z[j + 1] - z[j]) -
                        (u.at(c, j) - u.at(c, j - 1)) / (z[j] - z[j - 1])) /
                       (z[j + 1] - z[j - 1]);
      res = std::max(res, std::abs(lap_t + dzz - f.at(c, j)));
      scale = std::max({scale, std::abs(f.at(c, j)), std::abs(lap_t), std::abs(dzz)});
    }
  }
  return scale > 0 ? res / scale : 0.0;
}

FXi f_xi(const GridFunction3& u, const GridFunction3& f, const Window& w, double xi, double stencil_spacing) {
  if (u.points.size() != f.points.size() || u.axial.nodes != f.axial.nodes)
    throw DomainError("f_xi: u and f must share the grid");
  const auto t2 = t_xi_derivative(u, w, xi, 2), t1 = t_xi_derivative(u, w, xi, 1), t0 = t_xi(u, w, xi);
  const auto tf = t_xi(f, w, xi);
  FXi out;
  out.values.resize(t0.size());
  for (std::size_t i = 0; i < t0.size(); ++i) out.values[i] = -t2[i] + cplx(0, 2 * xi) * t1[i] + xi * xi * t0[i] + tf[i];
  if (stencil_spacing > 0) {
    out.fd_residual = fd_consistency_residual(u, f, stencil_spacing);
    out.consistent = out.fd_residual <= 1e-2;
  }
  return out;
}

EdgeData extrude(const CornerData& base, const std::vector<double>& s_values, const FieldSample& at_vertex,
                 const AxialRule& axial, const std::function<double(double)>& c) {
  const CauchyData& cd = base.data;
  EdgeData d{base.frame, base.h, cd.rule, axial, {}, {}, {}, {}, s_values};
  const std::size_t nz = axial.size();
  std::vector<double> cz(nz);
  for (std::size_t j = 0; j < nz; ++j) cz[j] = c(axial.nodes[j]);
  d.u.resize(cd.size() * nz);
  d.du_dnu.resize(cd.size() * nz);
  for (std::size_t i = 0; i < cd.size(); ++i)
    for (std::size_t j = 0; j < nz; ++j) {
      d.u[i * nz + j] = cz[j] * cd.u[i];
      d.du_dnu[i * nz + j] = cz[j] * cd.du_dnu[i];
    }
  for (std::size_t j = 0; j < nz; ++j) {
    d.u_edge.push_back(cz[j] * at_vertex.u);
    d.grad_edge.push_back({cz[j] * at_vertex.grad[0], cz[j] * at_vertex.grad[1]});
  }
  return d;
}

EdgeData extruded_edge_data(const ForwardSolver& solver, std::size_t vertex_index, const AxialRule& axial,
                            const std::function<double(double)>& c, const CornerRecoveryOptions& opt) {
  const Polygon& poly = solver.source().support();
  const CornerFrame frame = corner_frame(poly, vertex_index);
  const double h = opt.h > 0 ? opt.h : default_ball_radius(poly, vertex_index);
  const SSchedule sched = opt.s0 > 0 ? SSchedule::geometric(opt.s0, opt.ratio, opt.schedule_count)
                                     : SSchedule::for_corner(frame.sector, h, opt.schedule_count);
  sched.validate(frame.sector, h);
  const BoundaryRule rule = corner_rule(frame, h, sched.s_values.back(), opt.rule_order);
  const CornerData base{frame, h, cauchy_data(solver, rule)};
  return extrude(base, sched.s_values, solver.sample(frame.vertex), axial, c);
}

EdgeRecovery edge_value_recover(const EdgeData& data, const Window& w, const EdgeRecoveryOptions& opt) {
  const std::size_t nz = data.axial.size(), nn = data.rule.size();
  if (data.u.size() != nn * nz || data.du_dnu.size() != nn * nz || data.u_edge.size() != nz ||
      data.grad_edge.size() != nz)
    throw DomainError("edge_value_recover: data sizes do not match the rule and axial grid");
  if (opt.xi_count < 3 || opt.xi_count % 2 == 0) throw DomainError("edge_value_recover: xi_count must be odd and >= 3");
  if (!(opt.xi_span > 0)) throw DomainError("edge_value_recover: xi_span must be positive");
  EdgeRecovery out;
  const double xi_max = opt.xi_span / w.L;
  for (int i = 0; i < opt.xi_count; ++i) out.xi.push_back(-xi_max + 2 * xi_max * i / (opt.xi_count - 1));
  out.corner_values.resize(out.xi.size());
  out.transformed.resize(out.xi.size());
  std::vector<char> failed(out.xi.size(), 0);

  std::vector<cplx> gx(nz), gy(nz);
  for (std::size_t j = 0; j < nz; ++j) {
    gx[j] = data.grad_edge[j][0];
    gy[j] = data.grad_edge[j][1];
  }
  parallel_for(out.xi.size(), [&](std::size_t m) {
    const double xi = out.xi[m];
    const auto k = axial_kernel(data.axial, w, xi, 0);
    CornerData cd{data.frame, data.h, {data.rule, std::vector<cplx>(nn), std::vector<cplx>(nn)}};
    for (std::size_t i = 0; i < nn; ++i) {
      cd.data.u[i] = dot_kernel(k, data.u, i * nz);
      cd.data.du_dnu[i] = dot_kernel(k, data.du_dnu, i * nz);
    }
    const cplx u0 = dot_kernel(k, data.u_edge);
    cd = deflate_affine(std::move(cd), u0, {dot_kernel(k, gx), dot_kernel(k, gy)});
    std::vector<cplx> ind;
    for (double s : data.s_values) ind.push_back(corner_indicator(cd, s));
    try {
      out.corner_values[m] = extract_corner_value(data.s_values, ind, data.frame.sector, data.h, opt.alpha_hint).value;
    } catch (const ExtractionError&) {
      failed[m] = 1;
      return;
    }
    out.transformed[m] = out.corner_values[m] - axial_u_terms(data.axial, data.u_edge, w, xi);
  });
  std::string bad;
  for (std::size_t m = 0; m < failed.size(); ++m)
    if (failed[m]) bad += (bad.empty() ? "" : ", ") + std::to_string(out.xi[m]);
  if (!bad.empty()) throw ExtractionError("edge_value_recover: corner extraction failed at xi = " + bad);

  out.x_n = opt.profile_points;
  if (out.x_n.empty())
    for (int i = 0; i <= 20; ++i) out.x_n.push_back(-0.5 * w.L + w.L * i / 20.0);
  const double dxi = out.xi[1] - out.xi[0];
  for (double x : out.x_n) {
    if (!(std::abs(x) < w.L)) throw DomainError("edge_value_recover: profile points must lie in (-L, L)");
    std::vector<cplx> terms;
    for (std::size_t m = 0; m < out.xi.size(); ++m) {
      const double wt = (m == 0 || m + 1 == out.xi.size()) ? 0.5 * dxi : dxi;
      terms.push_back(wt * std::polar(1.0, x * out.xi[m]) * out.transformed[m]);
    }
    out.profile.push_back(pairwise_sum<cplx>(terms) / (2 * pi * w.phi(x)));
  }
  return out;
}

}  // namespace crad
