#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "crad/cvec.hpp"
#include "crad/forward.hpp"
#include "crad/geometry.hpp"

namespace crad {

/// Openings closer than this to pi are rejected: the leading moment vanishes.
inline constexpr double kDegenerateOpeningMargin = 1e-3;

/// M = 6i (exp(-2i theta_max) - exp(-2i theta_min)), the s^2-scaled moment.
cplx sector_moment_coefficient(const Sector& sector);

/// Twelve sectors with distinct openings in (0, 2 pi) minus pi, convex and
/// non-convex: ten symmetric about the x-axis (pi/6, ..., 11 pi/6 without pi)
/// and two rotated ones (pi/4 and 2.8).
std::vector<Sector> moment_suite();

/// int_C u0(s x) dx = M / s^2. Throws DegenerateCornerError near opening pi.
cplx sector_moment(const Sector& sector, double s);

/// int_{C cap B(0,h)} u0(s x) dx, from the closed-form radial integral
/// (2 / (s^2 w^4)) gamma(4, w sqrt(s h)) with w = exp(i theta / 2),
/// integrated over theta.
cplx truncated_sector_moment(const Sector& sector, double s, double h);

/// Lower incomplete gamma(4, z) = int_0^z e^-t t^3 dt for complex z.
cplx lower_gamma4(cplx z);

/// Geometric s-schedule s_j = s0 ratio^j.
struct SSchedule {
  std::vector<double> s_values;

  static SSchedule geometric(double s0, double ratio, int count);
  /// s0 with delta_C sqrt(h s0) = 8, ratio 2.
  static SSchedule for_corner(const Sector& sector, double h, int count = 6);
  /// Throws DomainError unless count >= 4, ratio > 1 and delta_C sqrt(h s_min) >= 8.
  void validate(const Sector& sector, double h) const;
};

enum class IndicatorRegime {
  /// Data on the arc and both radial sides.
  FullBoundary,
  /// Data on the arc only; valid when w and dw/dnu vanish on the sides.
  ArcOnly,
};

/// Cauchy data of w on corner_curve(frame, h): rule pieces 0 and 2 are the
/// radial sides, piece 1 the arc.
struct CornerData {
  CornerFrame frame;
  double h = 0.0;
  CauchyData data;
};

/// I(s) = int (u0(s x) dw/dnu - w du0(s x)/dnu) over the boundary of C cap B(0,h),
/// x in corner-frame coordinates. Throws MissingDataError when the rule lacks a
/// piece the regime needs.
cplx corner_indicator(const CornerData& data, double s, IndicatorRegime regime = IndicatorRegime::FullBoundary);

/// Subtracts the affine function u(v) + grad u(v) . (x - v) from the data. Its
/// indicator is zero (harmonic), and removing it avoids cancellation.
CornerData deflate_affine(CornerData data, cplx u_vertex, std::array<cplx, 2> grad_vertex);

inline constexpr std::size_t kFitPoints = 4;

struct FitResidual {
  double s;
  cplx indicator;
  cplx d;
  cplx fitted;
};

struct CornerEstimate {
  cplx value;
  double fitted_rate = 0.0;
  cplx c1;
  double residual_norm = 0.0;
  std::vector<FitResidual> residuals;
  Sector sector{-1, 1};
  double h = 0.0;
};

/// D_j = I(s_j) / truncated_sector_moment(s_j), fitted by c0 + c1 s^-beta in
/// least squares over the kFitPoints largest s. beta is scanned over
/// [0.2, 3] * alpha_hint and refined by golden section. Residuals cover every
/// schedule point. Throws ExtractionError when the RMS fit residual exceeds
/// 10% of |c0|.
CornerEstimate extract_corner_value(const std::vector<double>& s_values, const std::vector<cplx>& indicator,
                                    const Sector& sector, double h, double alpha_hint);

/// Physical corner recovery from forward-solver data at a polygon vertex.
struct CornerRecoveryOptions {
  double h = 0.0;           // 0: default_ball_radius
  int schedule_count = 6;
  double s0 = 0.0;          // 0: SSchedule::for_corner
  double ratio = 2.0;
  double alpha_hint = 1.0;
  int rule_order = 16;
};

struct CornerRecovery {
  CornerEstimate estimate;
  cplx u_vertex;
  cplx target;  // phi(v) - k^2 u(v)
  std::vector<double> s_values;
};

/// The data half of recover_corner: indicators on the schedule from deflated
/// forward-solver data, before extraction.
struct CornerIndicators {
  Sector sector{-1, 1};
  double h = 0.0;
  std::vector<double> s_values;
  std::vector<cplx> indicator;
  cplx u_vertex;
  cplx target;
};

CornerIndicators corner_indicators(const ForwardSolver& solver, std::size_t vertex_index,
                                   const CornerRecoveryOptions& options = {});

CornerRecovery recover_corner(const ForwardSolver& solver, std::size_t vertex_index,
                              const CornerRecoveryOptions& options = {});

struct NonradiatingResult {
  double norm;
  bool is_nonradiating;
};

/// Sup-norm of the far field relative to reference_scale; nonradiating below 1e-5.
NonradiatingResult nonradiating_test(const FarField& ff, double reference_scale);

struct SupportEstimate {
  Vec2 omega;
  double h = 0.0;
  double slope_r2 = 0.0;
  std::vector<double> taus;
  std::vector<double> log_abs_j;
};

/// Enclosure indicator J(tau) = int (w du/dnu - u dw/dnu) over the measurement
/// curve with the Ikehata wave w (t = 0). |J| ~ tau^-2 exp(tau h_D(omega)), so
/// h_D is the least-squares slope of ln|J| + 2 ln tau over the schedule, after
/// dropping taus where |J| is within 1e4 rounding units of the summed term
/// magnitudes. Throws UndetectableDirectionError when fewer than 4 taus remain.
SupportEstimate enclosure_support_detail(const CauchyData& data, Vec2 omega, double k,
                                         const std::vector<double>& tau_schedule);
double enclosure_support(const CauchyData& data, Vec2 omega, double k, const std::vector<double>& tau_schedule);

struct HullEstimate {
  Polygon hull;
  std::vector<SupportEstimate> supports;
};

/// Runs enclosure_support per direction (parallel) and intersects the half-planes.
HullEstimate enclosure_hull_detail(const CauchyData& data, double k, const std::vector<Vec2>& directions,
                                   const std::vector<double>& tau_schedule);
Polygon enclosure_hull(const CauchyData& data, double k, const std::vector<Vec2>& directions,
                       const std::vector<double>& tau_schedule);

/// tau = 4, 4.25, ..., 40.
std::vector<double> default_tau_schedule();

/// Measurement circle for enclosure data: the minimal enclosing circle of the
/// support, radius scaled by `margin`. A tight circle keeps the
/// exp(tau (R - h)) cancellation in J within double precision.
Circle enclosure_circle(const Polygon& support, double margin = 1.15);

}  // namespace crad
