#include "crad/harness.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "crad/corner.hpp"
#include "crad/edge.hpp"
#include "crad/errors.hpp"
#include "crad/forward.hpp"
#include "crad/parallel.hpp"
#include "crad/waves.hpp"

namespace crad {

using json = nlohmann::json;
using std::numbers::pi;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::pair<ExperimentKind, const char*>>& kind_table() {
  static const std::vector<std::pair<ExperimentKind, const char*>> t = {
      {ExperimentKind::VerifyMoments, "verify-moments"}, {ExperimentKind::FarField, "far-field"},
      {ExperimentKind::Nonradiating, "nonradiating"},    {ExperimentKind::RecoverCorner, "recover-corner"},
      {ExperimentKind::Enclosure, "enclosure"},          {ExperimentKind::EdgeRecover, "edge-recover"},
  };
  return t;
}

// A JSON value together with its path, for diagnostics.
class Field {
 public:
  Field(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_.empty() ? "<root>" : path_, msg); }
  const std::string& path() const { return path_; }
  const json& raw() const { return *j_; }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  Field at(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    const auto it = j_->find(key);
    if (it == j_->end()) throw ConfigError(child(key), "required field is missing");
    return Field(*it, child(key));
  }

  /// Rejects keys outside `allowed`, which catches misspelled options.
  void allow(std::initializer_list<const char*> allowed) const {
    if (!j_->is_object()) fail("expected an object");
    for (const auto& [key, value] : j_->items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) throw ConfigError(child(key), "unknown field");
    }
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0)) fail("must be positive");
    return v;
  }
  double nonnegative() const {
    const double v = number();
    if (!(v >= 0)) fail("must be >= 0");
    return v;
  }
  long integer(long lo, long hi) const {
    if (!j_->is_number_integer()) fail("expected an integer");
    const long v = j_->get<long>();
    if (v < lo || v > hi) fail("must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  /// A number or a [re, im] pair.
  cplx complex() const {
    if (j_->is_number()) return number();
    const auto v = items(2, 2);
    return {v[0].number(), v[1].number()};
  }
  Vec2 vec2() const {
    const auto v = items(2, 2);
    return {v[0].number(), v[1].number()};
  }
  std::vector<Field> items(std::size_t min_size = 0, std::size_t max_size = static_cast<std::size_t>(-1)) const {
    if (!j_->is_array()) fail("expected an array");
    if (j_->size() < min_size || j_->size() > max_size) {
      if (min_size == max_size) fail("expected " + std::to_string(min_size) + " entries");
      fail("expected at least " + std::to_string(min_size) + " entries");
    }
    std::vector<Field> out;
    for (std::size_t i = 0; i < j_->size(); ++i) out.emplace_back((*j_)[i], path_ + "[" + std::to_string(i) + "]");
    return out;
  }

 private:
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const json* j_;
  std::string path_;
};

QuadratureSpec parse_tolerance(const Field& f) {
  f.allow({"rel", "abs", "max_subdivisions"});
  QuadratureSpec q;
  q.rel_tol = f.at("rel").positive();
  q.abs_tol = f.at("abs").positive();
  q.max_subdivisions = static_cast<int>(f.at("max_subdivisions").integer(10, 1000000));
  try {
    q.validate();
  } catch (const DomainError& e) {
    f.fail(e.what());
  }
  return q;
}

Density parse_density(const Field& f) {
  const std::string type = f.at("kind").string();
  try {
    if (type == "zero") {
      f.allow({"kind"});
      return Density::zero();
    }
    if (type == "constant") {
      f.allow({"kind", "value"});
      return Density::constant(f.at("value").complex());
    }
    if (type == "affine") {
      f.allow({"kind", "c0", "cx", "cy"});
      return Density::affine(f.at("c0").complex(), f.at("cx").complex(), f.at("cy").complex());
    }
    if (type == "holder") {
      f.allow({"kind", "base", "amplitude", "center", "alpha"});
      return Density::holder(f.at("base").complex(), f.at("amplitude").complex(), f.at("center").vec2(),
                             f.at("alpha").positive());
    }
  } catch (const DomainError& e) {
    f.fail(e.what());
  }
  f.at("kind").fail("unknown density kind '" + type + "' (zero, constant, affine, holder)");
}

SourceTerm parse_source(const Field& f) {
  const double k = f.at("k").positive();
  if (f.has("polygon")) {
    f.allow({"polygon", "density", "k"});
    std::vector<Vec2> v;
    for (const auto& p : f.at("polygon").items(3)) v.push_back(p.vec2());
    Polygon poly;
    try {
      poly = Polygon(v);
    } catch (const DomainError& e) {
      f.at("polygon").fail(e.what());
    }
    Density d = parse_density(f.at("density"));
    try {
      return SourceTerm(poly, d, k);
    } catch (const DomainError& e) {
      f.at("density").fail(e.what());
    }
  }
  const std::string shape = f.at("shape").string();
  if (shape == "h20") {
    f.allow({"shape", "k", "center", "radius"});
    return h20_source(f.at("center").vec2(), f.at("radius").positive(), k);
  }
  if (shape == "disc") {
    f.allow({"shape", "k", "center", "radius", "value", "sides"});
    const cplx value = f.has("value") ? f.at("value").complex() : cplx(1);
    const int sides = f.has("sides") ? static_cast<int>(f.at("sides").integer(8, 1 << 16)) : 256;
    return disc_source(f.at("center").vec2(), f.at("radius").positive(), k, value, sides);
  }
  f.at("shape").fail("unknown source shape '" + shape + "' (h20, disc; polygons use the \"polygon\" key)");
}

struct MomentsParams {
  std::vector<Sector> sectors;
  std::vector<double> s_values;
  QuadratureSpec tol;
  double pass_threshold;
};

struct FarFieldParams {
  SourceTerm source;
  QuadratureSpec field_tol;
  double far_field_abs_tol;
  int directions;
};

struct NonradiatingParams {
  FarFieldParams ff;
  double reference_scale;  // <= 0: sup |phi| * area
};

struct CornerParams {
  SourceTerm source;
  QuadratureSpec field_tol;
  std::size_t vertex;
  CornerRecoveryOptions options;
};

struct EnclosureParams {
  SourceTerm source;
  int volume_order;
  int circle_nodes;
  double circle_radius;
  int directions;
  std::vector<double> taus;
  double noise_sigma;
};

struct EdgeParams {
  CornerParams corner;
  double window_L;
  int axial_nodes;
  double amplitude;  // c(z) = 1 + amplitude sin(pi z / (2 L))
  EdgeRecoveryOptions options;
};

std::vector<Sector> parse_sectors(const Field& f) {
  if (f.raw().is_string()) {
    if (f.string() != "suite") f.fail("expected \"suite\" or an array of [theta_min, theta_max]");
    return moment_suite();
  }
  std::vector<Sector> out;
  for (const auto& item : f.items(1)) {
    const auto p = item.items(2, 2);
    try {
      out.emplace_back(p[0].number(), p[1].number());
    } catch (const DomainError& e) {
      item.fail(e.what());
    }
  }
  return out;
}

MomentsParams parse_moments(const Field& root) {
  root.allow({"kind", "output", "seed", "threads", "sectors", "s", "tolerance", "pass_threshold"});
  MomentsParams p{parse_sectors(root.at("sectors")), {}, parse_tolerance(root.at("tolerance")),
                  root.at("pass_threshold").positive()};
  for (const auto& s : root.at("s").items(1)) p.s_values.push_back(s.positive());
  for (std::size_t i = 0; i < p.sectors.size(); ++i)
    if (std::abs(p.sectors[i].opening() - pi) < kDegenerateOpeningMargin)
      throw ConfigError("sectors[" + std::to_string(i) + "]", "opening within 1e-3 of pi");
  return p;
}

FarFieldParams parse_far_field_fields(const Field& root) {
  return {parse_source(root.at("source")), parse_tolerance(root.at("field_tolerance")),
          root.at("far_field_abs_tol").positive(), static_cast<int>(root.at("directions").integer(1, 1 << 20))};
}

FarFieldParams parse_far_field(const Field& root) {
  root.allow({"kind", "output", "seed", "threads", "source", "field_tolerance", "far_field_abs_tol", "directions"});
  return parse_far_field_fields(root);
}

NonradiatingParams parse_nonradiating(const Field& root) {
  root.allow({"kind", "output", "seed", "threads", "source", "field_tolerance", "far_field_abs_tol", "directions",
              "reference_scale"});
  NonradiatingParams p{parse_far_field_fields(root), 0.0};
  const Field r = root.at("reference_scale");
  if (r.raw().is_string()) {
    if (r.string() != "auto") r.fail("expected a positive number or \"auto\"");
  } else {
    p.reference_scale = r.positive();
  }
  return p;
}

std::size_t parse_vertex(const Field& f, const SourceTerm& src) {
  return static_cast<std::size_t>(f.integer(0, static_cast<long>(src.support().size()) - 1));
}

CornerRecoveryOptions parse_corner_options(const Field& root) {
  CornerRecoveryOptions o;
  o.h = root.at("h").nonnegative();
  const Field s = root.at("schedule");
  s.allow({"count", "s0", "ratio"});
  o.schedule_count = static_cast<int>(s.at("count").integer(4, 64));
  o.s0 = s.at("s0").nonnegative();
  o.ratio = s.at("ratio").number();
  if (!(o.ratio > 1)) s.at("ratio").fail("must exceed 1");
  o.alpha_hint = root.at("alpha_hint").positive();
  o.rule_order = static_cast<int>(root.at("rule_order").integer(4, 64));
  return o;
}

CornerParams parse_corner_fields(const Field& root) {
  SourceTerm src = parse_source(root.at("source"));
  const std::size_t v = parse_vertex(root.at("vertex"), src);
  return {src, parse_tolerance(root.at("field_tolerance")), v, parse_corner_options(root)};
}

CornerParams parse_corner(const Field& root) {
  root.allow({"kind", "output", "seed", "threads", "source", "field_tolerance", "vertex", "h", "schedule",
              "alpha_hint", "rule_order"});
  return parse_corner_fields(root);
}

EnclosureParams parse_enclosure(const Field& root) {
  root.allow({"kind", "output", "seed", "threads", "source", "volume_order", "measurement", "directions", "taus", "noise"});
  EnclosureParams p{parse_source(root.at("source")), 0, 0, 0, 0, {}, 0.0};
  p.volume_order = static_cast<int>(root.at("volume_order").integer(4, 200));
  const Field c = root.at("measurement");
  c.allow({"nodes", "circle_radius"});
  p.circle_nodes = static_cast<int>(c.at("nodes").integer(16, 1 << 16));
  p.circle_radius = c.at("circle_radius").positive();
  const Circle mec = minimal_enclosing_circle(p.source.support().vertices());
  if (!(p.circle_radius > mec.radius * (1 + 1e-9)))
    c.at("circle_radius").fail("circle about the support's enclosing-circle centre must strictly contain the support (radius > " +
                               fmt(mec.radius) + ")");
  p.directions = static_cast<int>(root.at("directions").integer(8, 1 << 12));
  const Field t = root.at("taus");
  t.allow({"start", "stop", "step"});
  const double a = t.at("start").positive(), b = t.at("stop").positive(), h = t.at("step").positive();
  if (!(b > a)) t.at("stop").fail("must exceed start");
  const long n = std::lround(std::floor((b - a) / h + 1e-9));
  if (n + 1 < 4) t.fail("schedule needs at least 4 values");
  for (long i = 0; i <= n; ++i) p.taus.push_back(a + h * static_cast<double>(i));
  if (root.has("noise")) {
    const Field nz = root.at("noise");
    nz.allow({"sigma"});
    p.noise_sigma = nz.at("sigma").nonnegative();
  }
  return p;
}

EdgeParams parse_edge(const Field& root) {
  root.allow({"kind", "output", "seed", "threads", "source", "field_tolerance", "vertex", "h", "schedule",
              "alpha_hint", "rule_order", "window_L", "axial_nodes", "profile", "xi"});
  EdgeParams p{parse_corner_fields(root), root.at("window_L").positive(),
               static_cast<int>(root.at("axial_nodes").integer(8, 2048)), 0.0, {}};
  const Field pr = root.at("profile");
  const std::string type = pr.at("type").string();
  if (type == "constant") {
    pr.allow({"type"});
  } else if (type == "sine") {
    pr.allow({"type", "amplitude"});
    p.amplitude = pr.at("amplitude").number();
    if (!(std::abs(p.amplitude) < 1)) pr.at("amplitude").fail("|amplitude| must be below 1");
  } else {
    pr.at("type").fail("unknown profile type '" + type + "' (constant, sine)");
  }
  const Field xi = root.at("xi");
  xi.allow({"count", "span"});
  p.options.xi_count = static_cast<int>(xi.at("count").integer(3, 100001));
  if (p.options.xi_count % 2 == 0) xi.at("count").fail("must be odd");
  p.options.xi_span = xi.at("span").positive();
  p.options.alpha_hint = p.corner.options.alpha_hint;
  return p;
}

void validate_kind(ExperimentKind kind, const Field& root) {
  switch (kind) {
    case ExperimentKind::VerifyMoments: parse_moments(root); break;
    case ExperimentKind::FarField: parse_far_field(root); break;
    case ExperimentKind::Nonradiating: parse_nonradiating(root); break;
    case ExperimentKind::RecoverCorner: parse_corner(root); break;
    case ExperimentKind::Enclosure: parse_enclosure(root); break;
    case ExperimentKind::EdgeRecover: parse_edge(root); break;
  }
}

// ---- output ----

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add(std::vector<double> row) {
    if (row.size() != columns_.size()) throw std::logic_error("Table: row width mismatch");
    rows_.push_back(std::move(row));
  }
  void write(const ExperimentConfig& cfg, const std::string& name, RunOutcome& out) const {
    const std::filesystem::path path = std::filesystem::path(cfg.output_path) / (name + ".csv");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "# corner-radiance " << CRAD_VERSION << "\n";
    os << "# kind: " << kind_name(cfg.kind) << "\n";
    os << "# config_hash: fnv1a64:" << cfg.hash << "\n";
    os << "# seed: " << cfg.seed << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << "\n";
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
      os << "\n";
    }
    out.files.push_back(path.string());
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json jcplx(cplx v) { return json::array({jnum(v.real()), jnum(v.imag())}); }

void write_summary(const ExperimentConfig& cfg, const json& results, RunOutcome& out) {
  json s;
  s["version"] = CRAD_VERSION;
  s["kind"] = kind_name(cfg.kind);
  s["config_hash"] = "fnv1a64:" + cfg.hash;
  s["seed"] = cfg.seed;
  s["exit_code"] = out.exit_code;
  s["message"] = out.message;
  // Location and thread count do not affect results, so they stay out of the file.
  json resolved = cfg.doc;
  resolved.erase("output");
  resolved.erase("threads");
  s["config"] = resolved;
  s["results"] = results;
  const std::filesystem::path path = std::filesystem::path(cfg.output_path) / "summary.json";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << s.dump(2) << "\n";
  out.files.push_back(path.string());
}

double source_scale(const SourceTerm& src) {
  double sup = std::abs(src.density()(src.support().centroid()));
  for (const auto& v : src.support().vertices()) sup = std::max(sup, std::abs(src.density()(v)));
  return std::max(sup, 1e-300) * src.support().area();
}

// ---- experiments ----

void run_moments(const ExperimentConfig& cfg, RunOutcome& out, json& res) {
  const MomentsParams p = parse_moments(Field(cfg.doc, ""));
  struct Row {
    Sector q;
    double s;
    cplx exact, quad;
    double err_est, rel;
  };
  std::vector<Row> rows;
  for (const auto& q : p.sectors)
    for (double s : p.s_values) rows.push_back({q, s, 0.0, 0.0, 0.0, 0.0});
  parallel_for(rows.size(), [&](std::size_t i) {
    Row& r = rows[i];
    BranchExponential be;
    be.s = r.s;
    const auto qr = integrate_sector([&](Vec2 x) { return branch_exp(be, x); }, r.q, INFINITY,
                                     r.q.delta_c() * std::sqrt(r.s), p.tol);
    r.exact = sector_moment(r.q, r.s);
    r.quad = qr.value;
    r.err_est = qr.error;
    r.rel = std::abs(qr.value - r.exact) / std::abs(r.exact);
  });
  Table full({"theta_min", "theta_max", "opening", "s", "exact_re", "exact_im", "quad_re", "quad_im", "quad_error",
              "rel_err"});
  Table plot({"opening", "s", "rel_err"});
  double worst = 0;
  for (const auto& r : rows) {
    full.add({r.q.theta_min, r.q.theta_max, r.q.opening(), r.s, r.exact.real(), r.exact.imag(), r.quad.real(),
              r.quad.imag(), r.err_est, r.rel});
    plot.add({r.q.opening(), r.s, r.rel});
    worst = std::max(worst, r.rel);
  }
  full.write(cfg, "moments", out);
  plot.write(cfg, "moments_plot", out);
  res["max_rel_err"] = worst;
  res["pass_threshold"] = p.pass_threshold;
  if (worst > p.pass_threshold) {
    out.exit_code = 2;
    out.message = "max relative error " + fmt(worst) + " exceeds " + fmt(p.pass_threshold);
  }
}

FarField compute_far_field(const FarFieldParams& p) {
  ForwardSolver solver(p.source, p.field_tol);
  return solver.far_field(uniform_directions(p.directions), p.far_field_abs_tol);
}

void write_far_field(const ExperimentConfig& cfg, const FarField& ff, RunOutcome& out) {
  Table t({"dir_x", "dir_y", "re", "im", "abs", "angle"});
  for (std::size_t i = 0; i < ff.values.size(); ++i) {
    const Vec2 d = ff.directions[i];
    t.add({d.x, d.y, ff.values[i].real(), ff.values[i].imag(), std::abs(ff.values[i]), std::atan2(d.y, d.x)});
  }
  t.write(cfg, "far_field", out);
}

void run_far_field(const ExperimentConfig& cfg, RunOutcome& out, json& res) {
  const FarFieldParams p = parse_far_field(Field(cfg.doc, ""));
  const FarField ff = compute_far_field(p);
  write_far_field(cfg, ff, out);
  double sup = 0;
  for (auto v : ff.values) sup = std::max(sup, std::abs(v));
  res["sup_norm"] = sup;
  res["physical_constant"] = jcplx(ff.physical_constant);
}

void run_nonradiating(const ExperimentConfig& cfg, RunOutcome& out, json& res) {
  const NonradiatingParams p = parse_nonradiating(Field(cfg.doc, ""));
  const FarField ff = compute_far_field(p.ff);
  write_far_field(cfg, ff, out);
  const double scale = p.reference_scale > 0 ? p.reference_scale : source_scale(p.ff.source);
  const auto r = nonradiating_test(ff, scale);
  Table t({"norm", "reference_scale", "is_nonradiating"});
  t.add({r.norm, scale, r.is_nonradiating ? 1.0 : 0.0});
  t.write(cfg, "nonradiating", out);
  res["norm"] = r.norm;
  res["reference_scale"] = scale;
  res["is_nonradiating"] = r.is_nonradiating;
}

void run_corner(const ExperimentConfig& cfg, RunOutcome& out, json& res) {
  const CornerParams p = parse_corner(Field(cfg.doc, ""));
  ForwardSolver solver(p.source, p.field_tol);
  const CornerIndicators ci = corner_indicators(solver, p.vertex, p.options);
  std::vector<cplx> d;
  for (std::size_t j = 0; j < ci.s_values.size(); ++j)
    d.push_back(ci.indicator[j] / truncated_sector_moment(ci.sector, ci.s_values[j], ci.h));
  std::optional<CornerEstimate> est;
  try {
    est = extract_corner_value(ci.s_values, ci.indicator, ci.sector, ci.h, p.options.alpha_hint);
  } catch (const ExtractionError& e) {
    out.exit_code = 2;
    out.message = e.what();
  }
  Table t({"s", "indicator_re", "indicator_im", "d_re", "d_im", "fit_re", "fit_im"});
  Table plot({"s", "abs_d_minus_c0"});
  for (std::size_t j = 0; j < ci.s_values.size(); ++j) {
    const cplx fit = est ? est->residuals[j].fitted : cplx(kNaN, kNaN);
    t.add({ci.s_values[j], ci.indicator[j].real(), ci.indicator[j].imag(), d[j].real(), d[j].imag(), fit.real(),
           fit.imag()});
    plot.add({ci.s_values[j], est ? std::abs(d[j] - est->value) : kNaN});
  }
  t.write(cfg, "corner_indicator", out);
  plot.write(cfg, "corner_plot", out);
  Table sum({"value_re", "value_im", "target_re", "target_im", "rel_err", "fitted_rate", "residual_norm", "h"});
  const cplx v = est ? est->value : cplx(kNaN, kNaN);
  const double rel = est ? std::abs(v - ci.target) / std::abs(ci.target) : kNaN;
  sum.add({v.real(), v.imag(), ci.target.real(), ci.target.imag(), rel, est ? est->fitted_rate : kNaN,
           est ? est->residual_norm : kNaN, ci.h});
  sum.write(cfg, "corner_summary", out);
  res["value"] = jcplx(v);
  res["target"] = jcplx(ci.target);
  res["u_vertex"] = jcplx(ci.u_vertex);
  res["rel_err"] = jnum(rel);
  res["fitted_rate"] = jnum(est ? est->fitted_rate : kNaN);
  res["h"] = ci.h;
}

void run_enclosure(const ExperimentConfig& cfg, RunOutcome& out, json& res) {
  const EnclosureParams p = parse_enclosure(Field(cfg.doc, ""));
  ForwardSolver solver(p.source);
  const Polygon& support = p.source.support();
  const Circle c{minimal_enclosing_circle(support.vertices()).center, p.circle_radius};
  CauchyData data = cauchy_data_from_rule(solver.volume_rule(p.volume_order), p.source.k(),
                                          circle_rule(c.center, c.radius, p.circle_nodes));
  if (p.noise_sigma > 0) add_gaussian_noise(data, p.noise_sigma, cfg.seed);
  const auto dirs = uniform_directions(p.directions);
  std::vector<std::optional<SupportEstimate>> est(dirs.size());
  std::vector<std::string> why(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t i) {
    try {
      est[i] = enclosure_support_detail(data, dirs[i], p.source.k(), p.taus);
    } catch (const UndetectableDirectionError& e) {
      why[i] = e.what();
    }
  });
  Table t({"omega_x", "omega_y", "h_estimate", "slope_r2", "taus_kept"});
  Table plot({"angle", "h_true", "h_est"});
  double worst = 0;
  std::vector<double> h;
  std::string failed;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double he = est[i] ? est[i]->h : kNaN;
    const double ht = support_function(support, dirs[i]);
    t.add({dirs[i].x, dirs[i].y, he, est[i] ? est[i]->slope_r2 : kNaN,
           est[i] ? static_cast<double>(est[i]->taus.size()) : 0.0});
    plot.add({std::atan2(dirs[i].y, dirs[i].x), ht, he});
    if (est[i]) {
      worst = std::max(worst, std::abs(he - ht));
      h.push_back(he);
    } else if (failed.empty()) {
      failed = why[i];
    }
  }
  t.write(cfg, "enclosure", out);
  plot.write(cfg, "enclosure_plot", out);
  res["max_support_error"] = worst;
  if (!failed.empty()) {
    out.exit_code = 2;
    out.message = failed;
    return;
  }
  const Polygon hull = halfplane_hull(dirs, h);
  Table ht({"x", "y"});
  for (const auto& v : hull.vertices()) ht.add({v.x, v.y});
  ht.write(cfg, "hull", out);
  const Polygon truth = convex_hull(support.vertices());
  res["hausdorff_to_convex_hull"] = hull.empty() ? json(nullptr) : json(hausdorff_distance_convex(hull, truth));
  res["diameter"] = support.diameter();
}

void run_edge(const ExperimentConfig& cfg, RunOutcome& out, json& res) {
  const EdgeParams p = parse_edge(Field(cfg.doc, ""));
  ForwardSolver solver(p.corner.source, p.corner.field_tol);
  const Window w = Window::bump(p.window_L);
  const AxialRule ax = AxialRule::gauss(p.window_L, p.axial_nodes);
  const double kz = pi / (2 * p.window_L), a = p.amplitude;
  auto c = [&](double z) { return 1 + a * std::sin(kz * z); };
  const EdgeData data = extruded_edge_data(solver, p.corner.vertex, ax, c, p.corner.options);
  EdgeRecovery r;
  try {
    r = edge_value_recover(data, w, p.options);
  } catch (const ExtractionError& e) {
    out.exit_code = 2;
    out.message = e.what();
    return;
  }
  Table tx({"xi", "corner_re", "corner_im", "transformed_re", "transformed_im"});
  for (std::size_t m = 0; m < r.xi.size(); ++m)
    tx.add({r.xi[m], r.corner_values[m].real(), r.corner_values[m].imag(), r.transformed[m].real(),
            r.transformed[m].imag()});
  tx.write(cfg, "edge_xi", out);
  // Delta (c U) = c (phi - k^2 U) + c'' U on the edge.
  const double k = solver.source().k();
  const cplx phi_v = solver.source().density()(data.frame.vertex);
  const cplx u0 = solver.sample(data.frame.vertex).u;
  Table tp({"x_n", "re", "im", "truth_re", "truth_im"});
  double worst = 0;
  for (std::size_t i = 0; i < r.x_n.size(); ++i) {
    const double z = r.x_n[i];
    const cplx truth = c(z) * (phi_v - k * k * u0) - a * kz * kz * std::sin(kz * z) * u0;
    tp.add({z, r.profile[i].real(), r.profile[i].imag(), truth.real(), truth.imag()});
    if (std::abs(truth) > 0) worst = std::max(worst, std::abs(r.profile[i] - truth) / std::abs(truth));
  }
  tp.write(cfg, "edge_profile", out);
  res["max_rel_err"] = worst;
}

}  // namespace

const char* kind_name(ExperimentKind kind) {
  for (const auto& [k, n] : kind_table())
    if (k == kind) return n;
  return "?";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) {
  for (const auto& [k, n] : kind_table())
    if (name == n) return k;
  return std::nullopt;
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> k = [] {
    std::vector<ExperimentKind> v;
    for (const auto& [kind, name] : kind_table()) v.push_back(kind);
    return v;
  }();
  return k;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const json& doc) {
  json d = doc;
  if (d.is_object()) {
    d.erase("output");
    d.erase("threads");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(d.dump()));
  return buf;
}

json load_config_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) line += text[i] == '\n';
    throw ConfigError(path + ":" + std::to_string(line), e.what());
  }
}

ExperimentConfig parse_config(json doc, std::optional<ExperimentKind> expected) {
  const Field root(doc, "");
  if (!doc.is_object()) root.fail("config must be a JSON object");
  ExperimentConfig cfg;
  if (doc.contains("kind")) {
    const std::string name = root.at("kind").string();
    const auto k = parse_kind(name);
    if (!k) root.at("kind").fail("unknown kind '" + name + "'");
    if (expected && *expected != *k)
      root.at("kind").fail(std::string("config is for '") + name + "' but the command is '" + kind_name(*expected) +
                           "'");
    cfg.kind = *k;
  } else if (expected) {
    cfg.kind = *expected;
  } else {
    root.at("kind");
  }
  if (!doc.contains("output")) throw ConfigError("output", "required field is missing (or pass --out)");
  cfg.output_path = root.at("output").string();
  if (cfg.output_path.empty()) root.at("output").fail("must not be empty");
  if (doc.contains("seed")) cfg.seed = static_cast<std::uint64_t>(root.at("seed").integer(0, std::numeric_limits<long>::max()));
  if (doc.contains("threads")) root.at("threads").integer(1, 1024);
  validate_kind(cfg.kind, root);
  doc["kind"] = kind_name(cfg.kind);
  cfg.hash = config_hash(doc);
  cfg.doc = std::move(doc);
  return cfg;
}

void apply_overrides(json& doc, ExperimentKind kind, const Overrides& o) {
  if (!doc.is_object()) return;
  if (o.out) doc["output"] = *o.out;
  if (o.threads) doc["threads"] = *o.threads;
  if (o.tol) {
    const char* key = kind == ExperimentKind::VerifyMoments ? "tolerance" : "field_tolerance";
    if (kind == ExperimentKind::Enclosure) throw ConfigError("--tol", "enclosure uses a fixed volume rule; no tolerance");
    if (!doc.contains(key) || !doc[key].is_object()) throw ConfigError(key, "--tol needs this object in the config");
    doc[key]["rel"] = *o.tol;
  }
}

RunOutcome run(const ExperimentConfig& cfg) {
  RunOutcome out;
  std::filesystem::create_directories(cfg.output_path);
  json res = json::object();
  try {
    switch (cfg.kind) {
      case ExperimentKind::VerifyMoments: run_moments(cfg, out, res); break;
      case ExperimentKind::FarField: run_far_field(cfg, out, res); break;
      case ExperimentKind::Nonradiating: run_nonradiating(cfg, out, res); break;
      case ExperimentKind::RecoverCorner: run_corner(cfg, out, res); break;
      case ExperimentKind::Enclosure: run_enclosure(cfg, out, res); break;
      case ExperimentKind::EdgeRecover: run_edge(cfg, out, res); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    out.exit_code = 2;
    out.message = e.what();
  }
  if (out.message.empty()) out.message = "ok";
  write_summary(cfg, res, out);
  return out;
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Corner and edge source recovery experiments"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides ov;
  std::string out_dir;
  int threads = 0;
  double tol = 0;
  std::vector<std::pair<ExperimentKind, CLI::App*>> subs;
  for (ExperimentKind k : all_kinds()) {
    CLI::App* s = app.add_subcommand(kind_name(k), std::string("run a ") + kind_name(k) + " experiment");
    s->add_option("--config", config_path, "JSON config file")->required();
    s->add_option("--out", out_dir, "output directory (overrides \"output\")");
    s->add_option("--threads", threads, "worker threads (overrides \"threads\")")->check(CLI::Range(1, 1024));
    s->add_option("--tol", tol, "relative quadrature tolerance (overrides tolerance.rel)")
        ->check(CLI::PositiveNumber);
    subs.emplace_back(k, s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  ExperimentKind kind = ExperimentKind::VerifyMoments;
  for (const auto& [k, s] : subs)
    if (s->parsed()) kind = k;
  const CLI::App* sub = nullptr;
  for (const auto& [k, s] : subs)
    if (k == kind) sub = s;
  if (sub->count("--out")) ov.out = out_dir;
  if (sub->count("--threads")) ov.threads = threads;
  if (sub->count("--tol")) ov.tol = tol;
  try {
    json doc = load_config_file(config_path);
    apply_overrides(doc, kind, ov);
    const ExperimentConfig cfg = parse_config(std::move(doc), kind);
    unsigned n = cfg.doc.contains("threads") ? cfg.doc["threads"].get<unsigned>() : 1u;
    if (const unsigned env = env_thread_count()) n = env;
    set_thread_count(n);
    const RunOutcome r = run(cfg);
    for (const auto& f : r.files) std::cout << f << "\n";
    if (r.exit_code != 0) std::cerr << "error: " << r.message << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace crad
