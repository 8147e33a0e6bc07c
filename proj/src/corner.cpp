#include "crad/corner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "crad/errors.hpp"
#include "crad/gauss.hpp"
#include "crad/parallel.hpp"
#include "crad/waves.hpp"

namespace crad {

using std::numbers::pi;

namespace {

void check_opening(const Sector& sector) {
  if (std::abs(sector.opening() - pi) < kDegenerateOpeningMargin)
    throw DegenerateCornerError("sector opening is within 1e-3 of pi: the leading moment vanishes");
}

}  // namespace

cplx sector_moment_coefficient(const Sector& sector) {
  return cplx(0, 6) * (std::polar(1.0, -2 * sector.theta_max) - std::polar(1.0, -2 * sector.theta_min));
}

std::vector<Sector> moment_suite() {
  std::vector<Sector> out;
  for (int n : {1, 2, 3, 4, 5, 7, 8, 9, 10, 11}) out.push_back(Sector::symmetric(n * pi / 6));
  out.push_back(Sector(0.1, 0.1 + pi / 4));
  out.push_back(Sector(-2.5, 0.3));
  return out;
}

cplx sector_moment(const Sector& sector, double s) {
  if (!(s > 0)) throw DomainError("sector_moment: s must be positive");
  check_opening(sector);
  return sector_moment_coefficient(sector) / (s * s);
}

cplx lower_gamma4(cplx z) {
  if (std::abs(z) < 2) {
    // sum_n (-1)^n z^(n+4) / (n! (n+4)).
    cplx term = z * z * z * z, sum = 0;
    for (int n = 0; n < 60; ++n) {
      const cplx add = term / static_cast<double>(n + 4);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      term *= -z / static_cast<double>(n + 1);
    }
    return sum;
  }
  return 6.0 - std::exp(-z) * (((z + 3.0) * z + 6.0) * z + 6.0);
}

cplx truncated_sector_moment(const Sector& sector, double s, double h) {
  if (!(s > 0) || !(h > 0)) throw DomainError("truncated_sector_moment: s and h must be positive");
  const double a = std::sqrt(s * h);
  auto f = [&](double theta) {
    const cplx w = std::polar(1.0, theta / 2);
    return 2.0 / (s * s) * lower_gamma4(w * a) * std::polar(1.0, -2 * theta);
  };
  AdaptiveOptions o;
  o.rel_tol = 1e-14;
  o.abs_tol = 1e-300;
  return integrate_adaptive<cplx>(f, sector.theta_min, sector.theta_max, o).value;
}

SSchedule SSchedule::geometric(double s0, double ratio, int count) {
  if (!(s0 > 0) || !(ratio > 1) || count < 1) throw DomainError("SSchedule: need s0 > 0, ratio > 1, count >= 1");
  SSchedule out;
  for (int j = 0; j < count; ++j) out.s_values.push_back(s0 * std::pow(ratio, j));
  return out;
}

SSchedule SSchedule::for_corner(const Sector& sector, double h, int count) {
  const double d = sector.delta_c();
  return geometric(64.0 / (d * d * h), 2.0, count);
}

void SSchedule::validate(const Sector& sector, double h) const {
  if (s_values.size() < 4) throw DomainError("SSchedule: need at least 4 values");
  for (std::size_t j = 1; j < s_values.size(); ++j)
    if (!(s_values[j] > s_values[j - 1])) throw DomainError("SSchedule: values must increase");
  if (sector.delta_c() * std::sqrt(h * s_values.front()) < 8 * (1 - 1e-12))
    throw DomainError("SSchedule: delta_C sqrt(h s_min) must be >= 8");
}

cplx corner_indicator(const CornerData& cd, double s, IndicatorRegime regime) {
  if (!(s > 0)) throw DomainError("corner_indicator: s must be positive");
  const auto& rule = cd.data.rule;
  std::set<int> pieces(rule.piece.begin(), rule.piece.end());
  if (!pieces.count(1)) throw MissingDataError("corner_indicator: no data on the arc");
  if (regime == IndicatorRegime::FullBoundary && (!pieces.count(0) || !pieces.count(2)))
    throw MissingDataError("corner_indicator: full-boundary regime needs data on both radial sides");
  BranchExponential p;
  p.s = s;
  std::vector<cplx> terms;
  terms.reserve(rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) {
    if (regime == IndicatorRegime::ArcOnly && rule.piece[j] != 1) continue;
    const Vec2 x = cd.frame.to_local(rule.nodes[j]);
    const Vec2 n = cd.frame.dir_to_local(rule.normals[j]);
    const auto u0 = branch_exp_sample(p, x);
    const cplx du0 = u0.grad[0] * n.x + u0.grad[1] * n.y;
    terms.push_back(rule.weights[j] * (u0.value * cd.data.du_dnu[j] - cd.data.u[j] * du0));
  }
  return pairwise_sum<cplx>(terms);
}

CornerData deflate_affine(CornerData cd, cplx u_vertex, std::array<cplx, 2> g) {
  const Vec2 v = cd.frame.vertex;
  for (std::size_t j = 0; j < cd.data.size(); ++j) {
    const Vec2 d = cd.data.rule.nodes[j] - v;
    const Vec2 n = cd.data.rule.normals[j];
    cd.data.u[j] -= u_vertex + g[0] * d.x + g[1] * d.y;
    cd.data.du_dnu[j] -= g[0] * n.x + g[1] * n.y;
  }
  return cd;
}

namespace {

struct LinearFit {
  cplx c0, c1;
  double sse;
};

LinearFit fit_for_beta(const std::vector<double>& s, const std::vector<cplx>& d, double beta) {
  const std::size_t n = s.size();
  std::vector<double> x(n);
  double xm = 0;
  cplx dm = 0;
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = std::pow(s[j] / s.front(), -beta);
    xm += x[j];
    dm += d[j];
  }
  xm /= n;
  dm /= static_cast<double>(n);
  double sxx = 0;
  cplx sxd = 0;
  for (std::size_t j = 0; j < n; ++j) {
    sxx += (x[j] - xm) * (x[j] - xm);
    sxd += (x[j] - xm) * (d[j] - dm);
  }
  LinearFit f;
  f.c1 = sxx > 0 ? sxd / sxx : cplx(0);
  f.c0 = dm - f.c1 * xm;
  f.sse = 0;
  for (std::size_t j = 0; j < n; ++j) f.sse += std::norm(d[j] - f.c0 - f.c1 * x[j]);
  // Report c1 for the unscaled model c0 + c1 s^-beta.
  f.c1 *= std::pow(s.front(), beta);
  return f;
}

}  // namespace

CornerEstimate extract_corner_value(const std::vector<double>& s_values, const std::vector<cplx>& indicator,
                                    const Sector& sector, double h, double alpha_hint) {
  if (s_values.size() != indicator.size()) throw DomainError("extract_corner_value: size mismatch");
  if (s_values.size() < 4) throw DomainError("extract_corner_value: need at least 4 schedule points");
  if (!(alpha_hint > 0)) throw DomainError("extract_corner_value: alpha_hint must be positive");
  check_opening(sector);
  std::vector<cplx> d_all(s_values.size());
  for (std::size_t j = 0; j < s_values.size(); ++j)
    d_all[j] = indicator[j] / truncated_sector_moment(sector, s_values[j], h);
  // Fit on the largest kFitPoints values, where the exponential truncation
  // tail of the higher-order terms is negligible.
  const std::size_t first = s_values.size() - kFitPoints;
  const std::vector<double> s_fit(s_values.begin() + first, s_values.end());
  const std::vector<cplx> d(d_all.begin() + first, d_all.end());

  // Coarse scan, then golden-section refinement around the best grid point.
  const double lo = 0.2 * alpha_hint, hi = 3.0 * alpha_hint;
  constexpr int kGrid = 57;
  std::vector<double> sse(kGrid);
  int best = 0;
  for (int i = 0; i < kGrid; ++i) {
    sse[i] = fit_for_beta(s_fit, d, lo + (hi - lo) * i / (kGrid - 1)).sse;
    if (sse[i] < sse[best]) best = i;
  }
  double beta;
  const double spread = *std::max_element(sse.begin(), sse.end()) - sse[best];
  double dscale = 0;
  for (auto v : d) dscale = std::max(dscale, std::norm(v));
  if (spread <= 1e-28 * dscale || spread == 0) {
    beta = alpha_hint;  // D is flat: the rate is not identifiable.
  } else {
    double a = lo + (hi - lo) * std::max(0, best - 1) / (kGrid - 1);
    double b = lo + (hi - lo) * std::min(kGrid - 1, best + 1) / (kGrid - 1);
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = b - g * (b - a), e = a + g * (b - a);
    double fc = fit_for_beta(s_fit, d, c).sse, fe = fit_for_beta(s_fit, d, e).sse;
    for (int it = 0; it < 80; ++it) {
      if (fc < fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - g * (b - a);
        fc = fit_for_beta(s_fit, d, c).sse;
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + g * (b - a);
        fe = fit_for_beta(s_fit, d, e).sse;
      }
    }
    beta = 0.5 * (a + b);
  }
  const LinearFit fit = fit_for_beta(s_fit, d, beta);
  CornerEstimate est;
  est.value = fit.c0;
  est.c1 = fit.c1;
  est.fitted_rate = beta;
  est.sector = sector;
  est.h = h;
  est.residual_norm = std::sqrt(fit.sse / static_cast<double>(kFitPoints));
  for (std::size_t j = 0; j < s_values.size(); ++j) {
    const cplx fitted = fit.c0 + fit.c1 * std::pow(s_values[j], -beta);
    est.residuals.push_back({s_values[j], indicator[j], d_all[j], fitted});
  }
  if (est.residual_norm > 0.1 * std::abs(est.value))
    throw ExtractionError("extract_corner_value: RMS fit residual " + std::to_string(est.residual_norm) +
                          " exceeds 10% of |c0| = " + std::to_string(std::abs(est.value)));
  return est;
}

CornerIndicators corner_indicators(const ForwardSolver& solver, std::size_t vertex_index,
                                   const CornerRecoveryOptions& opt) {
  const Polygon& poly = solver.source().support();
  const CornerFrame frame = corner_frame(poly, vertex_index);
  check_opening(frame.sector);
  const double h = opt.h > 0 ? opt.h : default_ball_radius(poly, vertex_index);
  SSchedule sched = opt.s0 > 0 ? SSchedule::geometric(opt.s0, opt.ratio, opt.schedule_count)
                               : SSchedule::for_corner(frame.sector, h, opt.schedule_count);
  sched.validate(frame.sector, h);
  const BoundaryRule rule = corner_rule(frame, h, sched.s_values.back(), opt.rule_order);
  CornerData cd{frame, h, cauchy_data(solver, rule)};
  const FieldSample at_vertex = solver.sample(frame.vertex);
  cd = deflate_affine(std::move(cd), at_vertex.u, at_vertex.grad);
  CornerIndicators out;
  out.sector = frame.sector;
  out.h = h;
  out.s_values = sched.s_values;
  out.indicator.resize(sched.s_values.size());
  parallel_for(out.indicator.size(), [&](std::size_t j) { out.indicator[j] = corner_indicator(cd, sched.s_values[j]); });
  out.u_vertex = at_vertex.u;
  const double k = solver.source().k();
  out.target = solver.source().density()(frame.vertex) - k * k * at_vertex.u;
  return out;
}

CornerRecovery recover_corner(const ForwardSolver& solver, std::size_t vertex_index,
                              const CornerRecoveryOptions& opt) {
  const CornerIndicators ci = corner_indicators(solver, vertex_index, opt);
  CornerRecovery out;
  out.s_values = ci.s_values;
  out.u_vertex = ci.u_vertex;
  out.target = ci.target;
  out.estimate = extract_corner_value(ci.s_values, ci.indicator, ci.sector, ci.h, opt.alpha_hint);
  return out;
}

NonradiatingResult nonradiating_test(const FarField& ff, double reference_scale) {
  if (!(reference_scale > 0)) throw DomainError("nonradiating_test: reference_scale must be positive");
  double m = 0;
  for (auto v : ff.values) m = std::max(m, std::abs(v));
  const double n = m / reference_scale;
  return {n, n <= 1e-5};
}

SupportEstimate enclosure_support_detail(const CauchyData& data, Vec2 omega, double k,
                                         const std::vector<double>& taus) {
  if (taus.size() < 4) throw DomainError("enclosure_support: tau schedule needs at least 4 values");
  for (std::size_t i = 1; i < taus.size(); ++i)
    if (!(taus[i] > taus[i - 1]) || !(taus[0] > 0)) throw DomainError("enclosure_support: taus must increase from > 0");
  const auto& rule = data.rule;
  Vec2 center{0, 0};
  for (const auto& x : rule.nodes) center += x;
  center = (1.0 / static_cast<double>(rule.size())) * center;
  // Offset t keeps the wave near unit size on the curve; added back to ln|J|.
  const double t = dot(center, omega);
  SupportEstimate est;
  est.omega = omega;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<cplx> terms(rule.size());
  for (double tau : taus) {
    const auto w = IkehataWave::make(omega, tau, t, k);
    double mag = 0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const auto v = ikehata_sample(w, rule.nodes[j]);
      const Vec2 n = rule.normals[j];
      const cplx a = v.value * data.du_dnu[j];
      const cplx b = data.u[j] * (v.grad[0] * n.x + v.grad[1] * n.y);
      terms[j] = rule.weights[j] * (a - b);
      mag += rule.weights[j] * (std::abs(a) + std::abs(b));
    }
    const cplx j_tau = pairwise_sum<cplx>(terms);
    if (!(std::abs(j_tau) > 1e4 * eps * mag)) continue;
    est.taus.push_back(tau);
    est.log_abs_j.push_back(std::log(std::abs(j_tau)) + tau * t);
  }
  if (est.taus.size() < 4)
    throw UndetectableDirectionError("enclosure_support: indicator below its noise floor for all but " +
                                     std::to_string(est.taus.size()) + " taus");
  const std::size_t n = est.taus.size();
  double tm = 0, pm = 0;
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    psi[i] = est.log_abs_j[i] + 2 * std::log(est.taus[i]);
    tm += est.taus[i];
    pm += psi[i];
  }
  tm /= n;
  pm /= n;
  double stt = 0, stp = 0, spp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (est.taus[i] - tm) * (est.taus[i] - tm);
    stp += (est.taus[i] - tm) * (psi[i] - pm);
    spp += (psi[i] - pm) * (psi[i] - pm);
  }
  est.h = stp / stt;
  est.slope_r2 = spp > 0 ? stp * stp / (stt * spp) : 1.0;
  return est;
}

double enclosure_support(const CauchyData& data, Vec2 omega, double k, const std::vector<double>& taus) {
  return enclosure_support_detail(data, omega, k, taus).h;
}

HullEstimate enclosure_hull_detail(const CauchyData& data, double k, const std::vector<Vec2>& directions,
                                   const std::vector<double>& taus) {
  if (directions.size() < 8) throw DomainError("enclosure_hull: need at least 8 directions");
  HullEstimate out;
  out.supports.resize(directions.size());
  parallel_for(directions.size(),
               [&](std::size_t i) { out.supports[i] = enclosure_support_detail(data, directions[i], k, taus); });
  std::vector<double> h;
  for (const auto& s : out.supports) h.push_back(s.h);
  out.hull = halfplane_hull(directions, h);
  return out;
}

Polygon enclosure_hull(const CauchyData& data, double k, const std::vector<Vec2>& directions,
                       const std::vector<double>& taus) {
  return enclosure_hull_detail(data, k, directions, taus).hull;
}

std::vector<double> default_tau_schedule() {
  std::vector<double> t;
  for (int i = 0; i <= 144; ++i) t.push_back(4.0 + 0.25 * i);
  return t;
}

Circle enclosure_circle(const Polygon& support, double margin) {
  if (!(margin > 1)) throw DomainError("enclosure_circle: margin must exceed 1");
  Circle c = minimal_enclosing_circle(support.vertices());
  c.radius *= margin;
  return c;
}

}  // namespace crad
