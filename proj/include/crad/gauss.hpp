#pragma once

// One-dimensional Gauss rules and the adaptive Gauss-Kronrod driver that the
// rest of the toolkit builds on.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "crad/cvec.hpp"

namespace crad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule (n >= 1), computed once and cached.
const GaussRule& gauss_legendre(int n);

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_intervals = 2000;
};

template <class V>
struct AdaptiveOutcome {
  V value{};
  double error = 0.0;
  int intervals = 0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
  double a, b;
  V value;
  double error;
  bool splittable;
};

// 15-point Kronrod rule with the QUADPACK error heuristic.
template <class V, class F>
Panel<V> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<V, 15> fv;
  fv[7] = f(c);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    fv[j] = f(c - dx);
    fv[14 - j] = f(c + dx);
  }
  V resk = kWgk[7] * fv[7];
  V resg = kWg[3] * fv[7];
  double resabs = kWgk[7] * magnitude(fv[7]);
  for (int j = 0; j < 7; ++j) {
    resk += kWgk[j] * (fv[j] + fv[14 - j]);
    resabs += kWgk[j] * (magnitude(fv[j]) + magnitude(fv[14 - j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (fv[j] + fv[14 - j]);
  }
  const V mean = 0.5 * resk;
  double resasc = kWgk[7] * magnitude(fv[7] - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (magnitude(fv[j] - mean) + magnitude(fv[14 - j] - mean));
  const double ah = std::abs(h);
  double err = magnitude(resk - resg) * ah;
  resasc *= ah;
  resabs *= ah;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  const double width_floor = 64.0 * eps * std::max(std::abs(a), std::abs(b));
  return {a, b, h * resk, err, std::abs(b - a) > width_floor};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b],
/// starting from the given breakpoints (sorted, inside [a, b]). The interval
/// with the largest error estimate (lowest position on ties) is bisected until
/// the summed estimate meets max(abs_tol, rel_tol*|I|). The final sum runs over
/// panels in position order, so the result is a deterministic function of f.
template <class V, class F>
AdaptiveOutcome<V> integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt,
                                      const std::vector<double>& breakpoints = {}) {
  std::vector<detail::Panel<V>> panels;
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double p : breakpoints)
    if (p > std::min(a, b) && p < std::max(a, b)) cuts.push_back(p);
  cuts.push_back(b);
  if (a > b)
    std::sort(cuts.begin() + 1, cuts.end() - 1, std::greater<>());
  else
    std::sort(cuts.begin() + 1, cuts.end() - 1);
  AdaptiveOutcome<V> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    panels.push_back(detail::gk15<V>(f, cuts[i], cuts[i + 1]));
    out.evaluations += 15;
  }
  auto total_value = [&] {
    std::vector<V> vals;
    vals.reserve(panels.size());
    std::vector<std::size_t> order(panels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
      return a <= b ? panels[l].a < panels[r].a : panels[l].a > panels[r].a;
    });
    for (auto i : order) vals.push_back(panels[i].value);
    return pairwise_sum<V>(vals);
  };
  auto total_error = [&] {
    double e = 0.0;
    for (const auto& p : panels) e += p.error;
    return e;
  };
  V value = total_value();
  double error = total_error();
  while (error > std::max(opt.abs_tol, opt.rel_tol * magnitude(value)) &&
         static_cast<int>(panels.size()) < opt.max_intervals) {
    std::size_t worst = panels.size();
    for (std::size_t i = 0; i < panels.size(); ++i) {
      if (!panels[i].splittable) continue;
      if (worst == panels.size() || panels[i].error > panels[worst].error) worst = i;
    }
    if (worst == panels.size()) break;
    const auto p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    panels[worst] = detail::gk15<V>(f, p.a, mid);
    panels.push_back(detail::gk15<V>(f, mid, p.b));
    out.evaluations += 30;
    value = value - p.value + panels[worst].value + panels.back().value;
    error = total_error();
  }
  out.value = total_value();
  out.error = error;
  out.intervals = static_cast<int>(panels.size());
  out.converged = error <= std::max(opt.abs_tol, opt.rel_tol * magnitude(out.value));
  return out;
}

}  // namespace crad
