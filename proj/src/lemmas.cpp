#include "alphasr/lemmas.hpp"

#include <algorithm>
#include <cmath>

#include "alphasr/numeric.hpp"

namespace alphasr {
namespace {

bool is_discrete(const Distribution& d) { return d.kind() == Distribution::Kind::Discrete; }

// Support for discrete kinds; values at geometric quantiles otherwise.
std::vector<double> value_grid(const Distribution& d, int n = 200, double q_min = 1e-6) {
  if (is_discrete(d)) return d.support();
  std::vector<double> grid;
  for (int k = 0; k < n; ++k) {
    double v = d.value_of_quantile(std::pow(q_min, static_cast<double>(k) / (n - 1)));
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

double cr(const Distribution& d, double q) { return d.revenue_curve(std::clamp(q, 0.0, 1.0)).cr; }

double reserve_power(double alpha) { return std::pow(alpha, 1.0 / (1.0 - alpha)); }

}  // namespace

void LemmaMargin::update(double slack, double x) {
  ++points;
  if (slack < margin) {
    margin = slack;
    at = x;
  }
}

LemmaMargin lemma_reservebound(const Distribution& d, double alpha) {
  LemmaMargin m{"reservebound"};
  double r = d.reserve_price();
  m.update(d.quantile_of_value(r) - reserve_power(alpha), r);
  return m;
}

LemmaMargin lemma_welfare(const Distribution& d, double alpha, int grid) {
  LemmaMargin m{"welfare"};
  double r = d.reserve_price();
  std::vector<double> ts{0.0};
  if (is_discrete(d)) {
    for (int k = 1; k < grid; ++k) ts.push_back(d.support_max() * k / (grid - 1));
  } else {
    for (int k = 0; k + 1 < grid; ++k) ts.push_back(d.value_of_quantile(std::pow(1e-4, static_cast<double>(k) / (grid - 2))));
  }
  double c = reserve_power(alpha);
  for (double t : ts) {
    double s = std::max(t, r);
    m.update(s * d.quantile_of_value(s) - c * d.posted_price_welfare(t), t);
  }
  return m;
}

LemmaMargin lemma_square(const Distribution& d, double alpha) {
  LemmaMargin m{"square"};
  m.update(d.survival_power_integral(2) - alpha / (1.0 + alpha) * d.survival_power_integral(1), 0.0);
  return m;
}

LemmaMargin lemma_minmax(const Distribution& d, double alpha) {
  LemmaMargin m{"minmax"};
  double i1 = d.survival_power_integral(1);
  double i2 = d.survival_power_integral(2);
  m.update((2.0 + alpha) / alpha * i2 - (2.0 * i1 - i2), 0.0);
  return m;
}

LemmaMargin lemma_densitybound(const Distribution& d, double alpha, int grid) {
  if (is_discrete(d)) throw std::invalid_argument("lemma_densitybound: continuous kinds only");
  LemmaMargin m{"densitybound"};
  std::vector<double> qs;
  for (int k = 0; k < grid; ++k) qs.push_back(std::pow(1e-5, static_cast<double>(k) / (grid - 1)));
  std::vector<double> f;
  for (double q : qs) f.push_back(d.density(d.value_of_quantile(q)));
  for (std::size_t a = 0; a < qs.size(); ++a) {
    for (std::size_t b = a; b < qs.size(); ++b) {
      double bound = f[a] * std::pow(qs[b] / qs[a], 2.0 - alpha);
      m.update(f[b] / bound - 1.0, qs[b]);
    }
  }
  return m;
}

LemmaMargin lemma_reservevirtualbound(const Distribution& d, double alpha) {
  LemmaMargin m{"reservevirtualbound"};
  double r = d.reserve_price();
  for (double v : value_grid(d)) {
    if (v < r) continue;
    m.update(r + d.virtual_valuation(v) / alpha - v, v);
  }
  return m;
}

LemmaMargin lemma_hbound(const Distribution& d, double alpha) {
  LemmaMargin m{"hbound"};
  std::vector<double> vs = value_grid(d, 60);
  for (std::size_t a = 0; a < vs.size(); ++a) {
    double inv1 = 1.0 / d.hazard_rate(vs[a]);
    for (std::size_t b = a + 1; b < vs.size(); ++b) {
      double inv2 = 1.0 / d.hazard_rate(vs[b]);
      m.update((1.0 - alpha) * (vs[b] - vs[a]) + inv1 - inv2, vs[b]);
    }
  }
  return m;
}

LemmaMargin lemma_hbound2(const Distribution& d, double alpha) {
  LemmaMargin m{"hbound2"};
  std::vector<double> vs = value_grid(d, 60);
  for (std::size_t b = 0; b < vs.size(); ++b) {
    double inv2 = 1.0 / d.hazard_rate(vs[b]);
    for (std::size_t a = 0; a <= b; ++a) {
      double denom = inv2 - (1.0 - alpha) * (vs[b] - vs[a]);
      if (!(denom > 0.0)) continue;
      // h(v1) <= 1/denom, compared as 1/h(v1) >= denom.
      m.update(1.0 / d.hazard_rate(vs[a]) - denom, vs[a]);
    }
  }
  return m;
}

LemmaMargin lemma_alphabound(int grid) {
  LemmaMargin m{"alphabound"};
  for (int k = 1; k <= grid; ++k) {
    double a = static_cast<double>(k) / (grid + 1);
    m.update(std::pow(a, -1.0 / (1.0 - a)) - (a + 1.0) / a, a);
  }
  return m;
}

double potential_mass(const Distribution& d, double alpha) {
  if (is_discrete(d)) {
    double total = 0.0;
    for (std::size_t k = 0; k < d.support().size(); ++k)
      if (d.virtual_valuation(d.support()[k]) > alpha * d.support()[k] / 2.0) total += d.pmf()[k];
    return total;
  }
  auto g = [&](double v) { return d.virtual_valuation(v) - alpha * v / 2.0; };
  double hi = 1.0;
  while (g(hi) <= 0.0) hi *= 2.0;
  double v_star = numeric::bisect_root(g, 0.0, hi, 1e-12);
  return d.quantile_of_value(v_star);
}

LemmaMargin lemma_pot_large(const Distribution& d, double alpha) {
  LemmaMargin m{"pot-large"};
  m.update(potential_mass(d, alpha) - std::pow(alpha / (2.0 - alpha), 1.0 / (1.0 - alpha)), 0.0);
  return m;
}

LemmaMargin lemma_reserveb(const Distribution& d, double alpha, int grid) {
  LemmaMargin m{"reserveb"};
  double qr = d.quantile_of_value(d.reserve_price());
  double cr_r = cr(d, qr);
  for (int k = 0; k < grid; ++k) {
    double q = qr * std::pow(1e-6, static_cast<double>(k) / (grid - 1));
    double x = q / qr;
    double bound = cr_r / (1.0 - alpha) * (std::pow(x, alpha) - alpha * x);
    m.update(bound - cr(d, q), q);
  }
  return m;
}

LemmaMargin lemma_scaling(const Distribution& d) {
  LemmaMargin m{"scaling"};
  for (double s : {0.5, 2.5, 7.0}) {
    double r = d.reserve_price();
    double rs = d.scaled(s).reserve_price();
    m.update(-std::abs(rs - s * r) / (s * r), s);
  }
  return m;
}

std::vector<LemmaMargin> distribution_lemma_suite(const Distribution& d, double alpha) {
  std::vector<LemmaMargin> out{lemma_reservebound(d, alpha), lemma_welfare(d, alpha), lemma_square(d, alpha),
                               lemma_minmax(d, alpha)};
  if (!is_discrete(d)) out.push_back(lemma_densitybound(d, alpha));
  out.push_back(lemma_reservevirtualbound(d, alpha));
  out.push_back(lemma_hbound(d, alpha));
  out.push_back(lemma_hbound2(d, alpha));
  out.push_back(lemma_pot_large(d, alpha));
  if (!is_discrete(d)) out.push_back(lemma_reserveb(d, alpha));
  out.push_back(lemma_scaling(d));
  return out;
}

ConditionedResult lemma_conditioned(const Distribution& d, double alpha, double t, std::uint64_t pairs,
                                    std::uint64_t seed) {
  double f_t = t <= 0.0 ? 0.0 : d.cdf(t);
  double lo = f_t * f_t;
  double factor = (2.0 + alpha) / alpha;
  auto trial = [&](std::mt19937_64& rng, std::vector<double>& out) {
    // F(max)^2 is uniform on [F(t)^2, 1] given max >= t.
    double u = lo + (1.0 - lo) * (1.0 - uniform_open_closed(rng));
    double q = std::max(1.0 - std::sqrt(u), 1e-300);
    double mx = std::max(d.value_of_quantile(q), t);
    double ph = d.virtual_valuation(mx);
    out[0] = mx;
    out[1] = ph;
    out[2] = factor * ph - mx;
  };
  auto stats = monte_carlo(trial, 3, pairs, seed);
  return {t, stats[0], stats[1], stats[2]};
}

LemmaMargin lemma_empreserve(const EmpiricalModel& em, const Distribution& d) {
  LemmaMargin m{"empreserve"};
  double g2 = std::pow(1.0 + em.params.gamma, 2);
  double factor = (1.0 - em.xi_bar * g2) / (g2 * g2);
  double r = d.reserve_price();
  double rb = em.reserve;
  m.update(rb * d.quantile_of_value(rb) - factor * r * d.quantile_of_value(r), rb);
  return m;
}

std::vector<LemmaMargin> lemma_empquant(const EmpiricalModel& em, const Distribution& d, std::size_t max_points) {
  LemmaMargin upper{"empquant-upper"};
  LemmaMargin lower{"empquant-lower"};
  double g = 1.0 + em.params.gamma;
  const auto& pts = em.quantile_points;
  std::size_t stride = std::max<std::size_t>(1, pts.size() / std::max<std::size_t>(1, max_points));
  auto check = [&](double qb) {
    if (qb < em.xi_bar) return;
    double crb = envelope_revenue(em, qb);
    upper.update(g * g * cr(d, qb / (g * g)) - crb, qb);
    double arg = qb <= em.reserve_quantile ? qb * g * g : qb * g * g * g;
    if (arg <= 1.0) lower.update(crb - cr(d, arg) / (g * g * g), qb);
  };
  for (std::size_t k = 0; k < pts.size(); k += stride) check(pts[k].q);
  if (!pts.empty()) check(pts.back().q);
  check(em.reserve_quantile);
  return {upper, lower};
}

LemmaMargin lemma_reservequant(const EmpiricalModel& em, const Distribution& d, double alpha) {
  LemmaMargin m{"reservequant"};
  double s = std::sqrt(8.0 * em.params.gamma / alpha);
  double qr = d.quantile_of_value(d.reserve_price());
  m.update(d.quantile_of_value(em.reserve) - (1.0 - s) * qr, em.reserve);
  return m;
}

}  // namespace alphasr
