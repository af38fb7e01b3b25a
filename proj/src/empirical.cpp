#include "alphasr/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace alphasr {
namespace {

double cross(const CurvePoint& o, const CurvePoint& a, const CurvePoint& b) {
  return (a.q - o.q) * (b.r - o.r) - (a.r - o.r) * (b.q - o.q);
}

double cross_scale(const CurvePoint& o, const CurvePoint& a, const CurvePoint& b) {
  return std::abs(a.q - o.q) * std::abs(b.r - o.r) + std::abs(a.r - o.r) * std::abs(b.q - o.q);
}

// Interpolates a piecewise-linear curve given by vertices sorted by q.
double interpolate(const std::vector<CurvePoint>& pts, double q) {
  if (q <= pts.front().q) return pts.front().r;
  if (q >= pts.back().q) return pts.back().r;
  auto it = std::upper_bound(pts.begin(), pts.end(), q, [](double x, const CurvePoint& p) { return x < p.q; });
  const CurvePoint& b = *it;
  const CurvePoint& a = *(it - 1);
  return a.r + (b.r - a.r) * (q - a.q) / (b.q - a.q);
}

std::size_t ceil_count(double x) { return static_cast<std::size_t>(std::ceil(x - 1e-9)); }

}  // namespace

ParamValidity validate_params(const SampleParams& p) {
  ParamValidity out;
  auto in_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!in_unit(p.gamma) || !in_unit(p.xi) || !in_unit(p.delta)) {
    out.problems.push_back("gamma, xi and delta must lie in (0,1)");
    return out;
  }
  double g = p.gamma;
  double log_term = std::max(std::log(3.0) / g, std::log(3.0 / p.delta));
  double lemma_m = 3.0 / (g * g * (1.0 + g) * p.xi) * log_term;
  double theorem_m = 6.0 * (1.0 + g) / (g * g * p.xi) * log_term;
  bool side = true;
  if ((1.0 + g) * (1.0 + g) > 1.5) {
    side = false;
    out.problems.push_back("(1+gamma)^2 exceeds 3/2");
  }
  double m = static_cast<double>(p.m);
  if (g * p.xi * m < 4.0) {
    side = false;
    out.problems.push_back("gamma*xi*m is below 4");
  }
  if (m < lemma_m - 1e-9) out.problems.push_back("m below the lemma sample bound");
  if (m < theorem_m - 1e-9) out.problems.push_back("m below the theorem sample bound");
  out.lemma_grade = side && m >= lemma_m - 1e-9;
  out.theorem_grade = side && m >= theorem_m - 1e-9;
  out.required_m = std::max(ceil_count(theorem_m), ceil_count(4.0 / (g * p.xi)));
  return out;
}

EmpiricalModel build_empirical(std::vector<double> samples, const SampleParams& p) {
  if (samples.empty()) throw InsufficientSamples("build_empirical: no samples");
  EmpiricalModel em;
  em.params = p;
  std::sort(samples.begin(), samples.end(), std::greater<double>());
  const std::size_t m = samples.size();
  em.params.m = m;
  const double dm = static_cast<double>(m);
  std::size_t floor_xm = static_cast<std::size_t>(std::floor(p.xi * dm));
  em.kept_from = std::max<std::size_t>(1, floor_xm);
  if (em.kept_from > m) throw InsufficientSamples("build_empirical: every sample was discarded");

  em.revenue_points.push_back({0.0, 0.0});
  for (std::size_t j = em.kept_from; j <= m; ++j) {
    double t = (2.0 * j - 1.0) / (2.0 * dm);
    double v = samples[j - 1];
    em.quantile_points.push_back({t, v});
    em.revenue_points.push_back({t, t * v});
  }
  em.revenue_points.push_back({1.0, 0.0});
  em.sorted_samples = std::move(samples);

  // Upper hull by monotone chain; points are already sorted by q.
  for (const CurvePoint& pt : em.revenue_points) {
    while (em.envelope.size() >= 2) {
      const CurvePoint& o = em.envelope[em.envelope.size() - 2];
      const CurvePoint& a = em.envelope.back();
      if (cross(o, a, pt) >= -1e-14 * cross_scale(o, a, pt))
        em.envelope.pop_back();
      else
        break;
    }
    em.envelope.push_back(pt);
  }

  double first_t = em.quantile_points.front().q;
  double formula = (std::floor(2.0 * p.xi * dm) - 1.0) / (2.0 * dm);
  em.xi_bar = std::max(formula, first_t);
  em.point_mass_value = raw_revenue(em, em.xi_bar) / em.xi_bar;

  double best = -1.0;
  for (const CurvePoint& v : em.envelope) best = std::max(best, v.r);
  for (const CurvePoint& v : em.envelope) {
    if (v.r >= best - 1e-12 * std::max(1.0, best)) {
      em.reserve_quantile = v.q;
      em.reserve = v.q > 0.0 ? v.r / v.q : 0.0;
      break;
    }
  }
  return em;
}

const std::vector<CurvePoint>& concave_envelope(const EmpiricalModel& em) { return em.envelope; }

double raw_revenue(const EmpiricalModel& em, double q) { return interpolate(em.revenue_points, q); }

double envelope_revenue(const EmpiricalModel& em, double q) { return interpolate(em.envelope, q); }

double empirical_virtual(const EmpiricalModel& em, double q) {
  const auto& h = em.envelope;
  auto it = std::upper_bound(h.begin(), h.end(), q, [](double x, const CurvePoint& p) { return x < p.q; });
  std::size_t k = static_cast<std::size_t>(it - h.begin());
  if (k == 0) k = 1;
  if (k >= h.size()) k = h.size() - 1;
  return (h[k].r - h[k - 1].r) / (h[k].q - h[k - 1].q);
}

double empirical_reserve(const EmpiricalModel& em) { return em.reserve; }

double value_at_quantile(const EmpiricalModel& em, double q) {
  if (q < em.xi_bar) return em.point_mass_value;
  if (q > 1.0) throw std::invalid_argument("value_at_quantile: q above 1");
  return raw_revenue(em, q) / q;
}

double quantile_of_value(const EmpiricalModel& em, double v) {
  if (v > em.point_mass_value) return em.xi_bar;
  if (v <= 0.0) return 1.0;
  const auto& pts = em.quantile_points;
  // Last retained index whose value is at least v (values are descending).
  auto it = std::partition_point(pts.begin(), pts.end(), [v](const QuantileValuePair& p) { return p.v >= v; });
  if (it == pts.begin()) return em.xi_bar;
  const QuantileValuePair& a = *(it - 1);
  double q;
  if (a.v == v) {
    q = a.q;
  } else {
    double qb = (it == pts.end()) ? 1.0 : it->q;
    double rb = (it == pts.end()) ? 0.0 : it->q * it->v;
    double ra = a.q * a.v;
    double slope = (rb - ra) / (qb - a.q);
    double icept = ra - slope * a.q;
    // Solve icept + slope*q = v*q on the segment.
    q = icept / (v - slope);
    q = std::clamp(q, a.q, qb);
  }
  return std::max(q, em.xi_bar);
}

bool coverage_event_holds(const EmpiricalModel& em, const Distribution& d, double gamma) {
  double band = (1.0 + gamma) * (1.0 + gamma);
  const auto& pts = em.quantile_points;
  std::size_t j = 0;
  while (j < pts.size()) {
    double v = pts[j].v;
    std::size_t last = j;
    while (last + 1 < pts.size() && pts[last + 1].v == v) ++last;
    double qbar = quantile_of_value(em, v);
    double qtrue = d.quantile_of_value(v);
    if (qtrue < qbar / band || qtrue > qbar * band) return false;
    j = last + 1;
  }
  return true;
}

}  // namespace alphasr
