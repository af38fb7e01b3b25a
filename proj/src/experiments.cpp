#include "alphasr/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

#include "alphasr/generators.hpp"
#include "alphasr/lemmas.hpp"
#include "alphasr/mechanisms.hpp"

namespace alphasr {
namespace {

constexpr std::uint64_t kDefaultSeed = 20240611;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t seed_of(const Json& c) { return c.value("seed", kDefaultSeed); }

// Master seed of an auxiliary stream family, disjoint from per-trial streams.
std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return stream_seed(seed, (std::uint64_t{1} << 62) + tag); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string tagged(const std::string& name, const std::string& key, double x) {
  return name + "[" + key + "=" + fmt(x) + "]";
}

bool at_least(const MetricStats& s, double target) { return s.mean + 4.0 * s.std_error >= target; }

double reserve_power(double alpha) { return std::pow(alpha, 1.0 / (1.0 - alpha)); }

SampleParams params_of(const Json& c, double gamma, double xi, double delta) {
  SampleParams p;
  p.gamma = c.value("gamma", gamma);
  p.xi = c.value("xi", xi);
  p.delta = c.value("delta", delta);
  p.m = c.value("m", std::size_t{0});
  if (p.m == 0) p.m = validate_params(p).required_m;
  return p;
}

void note_validity(Report& rep, const SampleParams& p) {
  ParamValidity v = validate_params(p);
  rep.notes.push_back("m=" + std::to_string(p.m) + " theorem_grade=" + (v.theorem_grade ? "yes" : "no") +
                      " required_m=" + std::to_string(v.required_m));
}

std::vector<Distribution> dists_of(const Json& c, const std::string& key, std::vector<Distribution> fallback) {
  if (!c.contains(key)) return fallback;
  std::vector<Distribution> out;
  for (const Json& s : c.at(key)) out.push_back(distribution_from_json(s));
  return out;
}

std::vector<double> draw_values(const std::vector<Distribution>& dists, std::mt19937_64& rng) {
  std::vector<double> v(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) v[i] = dists[i].value_of_quantile(uniform_open_closed(rng));
  return v;
}

struct BudgetLaw {
  std::vector<double> values;
  std::vector<double> probs;

  double draw(std::mt19937_64& rng) const {
    double u = uniform_open_closed(rng);
    double acc = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      acc += probs[k];
      if (u <= acc) return values[k];
    }
    return values.back();
  }
  double survival(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
      if (values[k] >= x) s += probs[k];
    return s;
  }
};

BudgetLaw budget_law_of(const Json& c) {
  BudgetLaw law{{0.5, 3.0}, {0.5, 0.5}};
  if (c.contains("budget_dist")) {
    law.values = c.at("budget_dist").at("values").get<std::vector<double>>();
    law.probs = c.at("budget_dist").at("probs").get<std::vector<double>>();
  }
  return law;
}

// ---------------------------------------------------------------------------

Report exp_closed_form(const Json& c) {
  Report rep;
  auto alphas = c.value("alphas", std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9});
  double scale = c.value("scale", 1.0);
  double tol = c.value("tol", 1e-6);
  auto near = [&](double v, double t) { return std::abs(v - t) <= tol * std::max(1.0, std::abs(t)); };
  for (double a : alphas) {
    Distribution d = Distribution::falpha(a, scale);
    double r = d.reserve_price();
    rep.add_exact(tagged("reserve", "alpha", a), r, scale, near(r, scale));
    double qr = d.quantile_of_value(r);
    double rp = reserve_power(a);
    rep.add_exact(tagged("reserve_quantile", "alpha", a), qr, rp, near(qr, rp));
    double i1 = d.survival_power_integral(1);
    double i2 = d.survival_power_integral(2);
    rep.add_exact(tagged("square_ratio", "alpha", a), i2 / i1, a / (1.0 + a), near(i2 / i1, a / (1.0 + a)));
    double mm = (2.0 * i1 - i2) / i2;
    rep.add_exact(tagged("max_min_ratio", "alpha", a), mm, (2.0 + a) / a, near(mm, (2.0 + a) / a));
    double v_star = 2.0 * scale;
    double gap = d.virtual_valuation(v_star) - a * v_star / 2.0;
    rep.add_exact(tagged("pot_threshold_gap", "alpha", a), gap, 0.0, near(gap, 0.0));
    double pm = potential_mass(d, a);
    double pt = std::pow(a / (2.0 - a), 1.0 / (1.0 - a));
    rep.add_exact(tagged("pot_mass", "alpha", a), pm, pt, near(pm, pt));
    double wr = r * qr / d.posted_price_welfare(0.0);
    rep.add_exact(tagged("welfare_ratio", "alpha", a), wr, rp, near(wr, rp));
  }
  LemmaMargin ab = lemma_alphabound();
  rep.add_exact("alphabound_margin", ab.margin, 0.0, ab.margin >= 0.0);
  return rep;
}

struct Tracked {
  LemmaMargin worst;
  double tol = 1e-8;
};

Report exp_lemma_suite(const Json& c) {
  Report rep;
  const std::uint64_t seed = seed_of(c);
  rep.seed = seed;
  int n_discrete = c.value("discrete_count", 20);
  auto alphas = c.value("discrete_alphas", std::vector<double>{0.3, 0.5, 0.7});
  int l_min = c.value("L_min", 2);
  int l_max = c.value("L_max", 8);
  double tol = c.value("tol", 1e-8);
  std::size_t emp_m = c.value("empirical_m", std::size_t{4000});
  std::uint64_t pairs = c.value("conditioned_pairs", std::uint64_t{1000000});
  bool only_square = c.value("only_square", false);

  std::map<std::string, Tracked> worst;
  auto record = [&](const std::string& family, const LemmaMargin& m, double t) {
    Tracked& tr = worst[family + "/" + m.name];
    tr.tol = t;
    tr.worst.name = m.name;
    if (m.points > 0) tr.worst.update(m.margin, m.at);
  };

  struct Case {
    Distribution d;
    double alpha;
  };
  std::vector<Case> discrete;
  for (int k = 0; k < n_discrete; ++k) {
    double a = alphas[static_cast<std::size_t>(k) % alphas.size()];
    int L = l_min + k % (l_max - l_min + 1);
    auto gen = make_stream(derive(seed, 1), static_cast<std::uint64_t>(k));
    discrete.push_back({random_alpha_sr_discrete(a, L, gen), a});
  }
  std::vector<Case> analytic{{Distribution::falpha(0.3), 0.3},
                             {Distribution::falpha(0.5, 2.0), 0.5},
                             {Distribution::falpha(0.7), 0.7},
                             {Distribution::falpha(0.9, 0.5), 0.9},
                             {Distribution::exponential(1.5), 0.6}};
  if (c.contains("analytic")) {
    analytic.clear();
    for (const Json& e : c.at("analytic")) analytic.push_back({distribution_from_json(e.at("dist")), e.at("alpha")});
  }

  std::uint64_t emp_index = 0;
  auto run_family = [&](const std::string& family, const std::vector<Case>& cases) {
    for (const Case& cs : cases) {
      const Distribution& d = cs.d;
      if (only_square) {
        record(family, lemma_square(d, cs.alpha), tol);
        continue;
      }
      LemmaMargin sr{"alpha-sr"};
      sr.update(check_alpha_sr(d, cs.alpha).margin, 0.0);
      record(family, sr, 1e-6);
      for (const LemmaMargin& m : distribution_lemma_suite(d, cs.alpha)) record(family, m, tol);

      if (d.is_continuous()) {
        LemmaMargin hz{"hazard-identity"};
        for (int k = 0; k < 40; ++k) {
          double v = d.value_of_quantile(std::pow(1e-6, k / 39.0));
          hz.update(-std::abs(std::exp(-d.cumulative_hazard(v)) - d.quantile_of_value(v)), v);
        }
        record(family, hz, 1e-6);
      }

      // Empirical-model structure on samples from this prior.
      SampleParams p{emp_m, 0.2, 0.05, 0.1};
      auto rng = make_stream(derive(seed, 2), emp_index++);
      EmpiricalModel em = build_empirical(sample(d, rng, emp_m), p);
      LemmaMargin conc{"envelope-concavity"};
      const auto& h = em.envelope;
      for (std::size_t k = 1; k + 1 < h.size(); ++k) {
        double s1 = (h[k].r - h[k - 1].r) / (h[k].q - h[k - 1].q);
        double s2 = (h[k + 1].r - h[k].r) / (h[k + 1].q - h[k].q);
        conc.update((s1 - s2) / std::max(1.0, std::abs(s1)), h[k].q);
      }
      record(family, conc, 1e-9);
      LemmaMargin maj{"envelope-majorant"};
      for (const CurvePoint& pt : em.revenue_points) maj.update(envelope_revenue(em, pt.q) - pt.r, pt.q);
      record(family, maj, 1e-12);
      LemmaMargin xb{"xi-bar-floor"};
      xb.update(em.xi_bar - (p.xi - 1.0 / static_cast<double>(emp_m)), em.xi_bar);
      record(family, xb, 0.0);

      if (d.is_continuous()) continue;
      // LP structure on a one-pair instance of this prior.
      MultiItemInstance inst = MultiItemInstance::make({{d}}, {d.support_max()}, {1});
      LpProblem lp2 = build_lp2(inst);
      LpSolution sol = solve(lp2);
      QuantileSolution qs = aggregate(sol, lp2);
      LemmaMargin ident{"lp-aggregate-identity"};
      ident.update(-std::abs(qs.objective - sol.objective), 0.0);
      record(family, ident, 1e-8);
      LemmaMargin thr{"threshold-identity"};
      double fphi = 0.0;
      for (std::size_t k = 0; k < lp2.vars.size(); ++k)
        fphi += lp2.vars[k].mass * lp2.vars[k].virtual_value * qs.pairs[0].threshold_x[k];
      thr.update(-std::abs(fphi - d.revenue_curve(std::min(1.0, qs.pairs[0].x_star)).cr), qs.pairs[0].x_star);
      record(family, thr, 1e-10);
      LemmaMargin clip{"reserve-quantile-clip"};
      clip.update(d.quantile_of_value(d.reserve_price()) - qs.pairs[0].x_star, qs.pairs[0].x_star);
      record(family, clip, 1e-12);
      double B = std::floor((d.support_min() + d.support_max()) / 2.0);
      if (B >= d.support_min()) {
        Distribution t = truncate_at(d, B);
        auto rng2 = make_stream(derive(seed, 3), emp_index);
        EmpiricalModel et = build_empirical(sample(t, rng2, emp_m), p);
        LemmaMargin slope{"budget-slope-bound"};
        for (const CurvePoint& pt : et.envelope) slope.update(B * pt.q - pt.r, pt.q);
        record(family, slope, 1e-12);
      }
    }
  };
  run_family("discrete", discrete);
  run_family("analytic", analytic);
  if (!only_square) {
    LemmaMargin rb{"reserveb"};
    for (const Case& cs : discrete) {
      LemmaMargin m = lemma_reserveb(cs.d, cs.alpha);
      rb.update(m.margin, m.at);
    }
    rep.add_exact("discrete/reserveb-informational", rb.margin, 0.0, true);
    rep.notes.push_back("reserveb is not gated on discrete priors: phi(r) > 0 at a discrete reserve breaks its premise");
  }

  for (const auto& [key, tr] : worst) {
    double m = tr.worst.points > 0 ? tr.worst.margin : kInf;
    rep.add_exact(key, m, -tr.tol, m >= -tr.tol);
  }

  if (!only_square && pairs > 0) {
    double a = c.value("conditioned_alpha", 0.5);
    Distribution d = Distribution::falpha(a);
    auto ts = c.value("conditioned_t", std::vector<double>{0.0, 0.5, 1.0, 2.0});
    for (std::size_t k = 0; k < ts.size(); ++k) {
      ConditionedResult cr = lemma_conditioned(d, a, ts[k], pairs, derive(seed, 100 + k));
      rep.add_stats(tagged("conditioned_slack", "t", ts[k]), cr.slack, 0.0, true, at_least(cr.slack, 0.0));
    }
    rep.trials = pairs;
  }
  return rep;
}

Report exp_vcg_duplicates(const Json& c) {
  Report rep;
  rep.seed = seed_of(c);
  double a = c.value("alpha", 0.5);
  Distribution d = distribution_from_json(c.value("dist", Json{{"kind", "falpha"}, {"alpha", a}}));
  auto ns = c.value("bidders", std::vector<int>{1, 2});
  std::uint64_t trials = c.value("trials", std::uint64_t{1000000});
  rep.trials = trials;
  double factor = (2.0 + a) / a;
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    int n = ns[idx];
    Environment env = Environment::single_item(static_cast<std::size_t>(n));
    std::vector<Distribution> all(2 * static_cast<std::size_t>(n), d);
    auto trial = [&](std::mt19937_64& rng, std::vector<double>& out) {
      std::vector<double> v = draw_values(all, rng);
      std::vector<double> orig(v.begin(), v.begin() + n);
      std::vector<double> dup(v.begin() + n, v.end());
      out[0] = vcg_with_duplicates(env, orig, dup).revenue;
    };
    MetricStats rev = monte_carlo(trial, 1, trials, derive(rep.seed, idx))[0];
    double opt = optimal_revenue_iid_continuous(d, n);
    rep.add_stats(tagged("revenue", "n", n), rev, opt / factor, true, at_least(rev, opt / factor));
    rep.add_exact(tagged("opt_revenue", "n", n), opt, opt, true);
    double ratio = opt / rev.mean;
    rep.add_exact(tagged("opt_over_revenue", "n", n), ratio, factor, opt <= factor * (rev.mean + 4.0 * rev.std_error));
  }
  return rep;
}

Report exp_vcgl(const Json& c) {
  Report rep;
  rep.seed = seed_of(c);
  double a = c.value("alpha", 0.5);
  Distribution d = distribution_from_json(c.value("dist", Json{{"kind", "falpha"}, {"alpha", a}}));
  Json cases = c.value("cases", Json::parse(R"([{"n":1,"k":1},{"n":2,"k":1},{"n":3,"k":2}])"));
  std::uint64_t trials = c.value("trials", std::uint64_t{1000000});
  rep.trials = trials;
  double factor = reserve_power(a);
  double r = d.reserve_price();
  for (std::size_t idx = 0; idx < cases.size(); ++idx) {
    std::size_t n = cases[idx].at("n");
    std::size_t k = cases[idx].at("k");
    Environment env = Environment::k_uniform(n, k);
    std::vector<Distribution> all(n, d);
    std::vector<double> reserves(n, r);
    auto trial = [&](std::mt19937_64& rng, std::vector<double>& out) {
      std::vector<double> v = draw_values(all, rng);
      MechanismOutcome o = vcg_lazy(env, v, reserves);
      out[0] = o.revenue;
      out[1] = vcg(env, v).welfare;
    };
    auto st = monte_carlo(trial, 2, trials, derive(rep.seed, idx));
    double w = expected_top_k_sum(all, static_cast<int>(k));
    std::string tag = "[n=" + std::to_string(n) + ";k=" + std::to_string(k) + "]";
    rep.add_stats("revenue" + tag, st[0], factor * w, true, at_least(st[0], factor * w));
    rep.add_stats("vcg_welfare_mc" + tag, st[1], w, true, std::abs(st[1].mean - w) <= 4.0 * st[1].std_error + 1e-9);
    rep.add_exact("vcg_welfare" + tag, w, w, true);
    if (n == 1 && std::abs(a - d.alpha()) < 1e-12 && d.kind() == Distribution::Kind::FAlpha) {
      double gap = st[0].mean - factor * w;
      rep.add_exact("tightness_gap" + tag, gap, 0.0, std::abs(gap) <= 4.0 * st[0].std_error + 1e-9);
    }
  }
  return rep;
}

Report exp_vcgl_samp(const Json& c) {
  Report rep;
  rep.seed = seed_of(c);
  double a = c.value("alpha", 0.5);
  std::vector<Distribution> classes =
      dists_of(c, "classes", {Distribution::falpha(a, 1.0), Distribution::falpha(a, 2.0)});
  SampleParams p = params_of(c, 0.1, 0.01, 0.01);
  note_validity(rep, p);
  int resamples = c.value("resamples", 100);
  std::uint64_t trials = c.value("trials", std::uint64_t{100000});
  std::size_t k_env = c.value("k", std::size_t{1});
  rep.trials = trials * static_cast<std::uint64_t>(resamples);
  const std::size_t K = classes.size();
  Environment env = Environment::k_uniform(K, k_env);
  std::vector<double> means;
  std::vector<double> reserve_gap;
  int covered = 0;
  for (int r = 0; r < resamples; ++r) {
    std::vector<EmpiricalModel> models;
    bool cov = true;
    for (std::size_t cl = 0; cl < K; ++cl) {
      auto rng = make_stream(derive(rep.seed, 1), static_cast<std::uint64_t>(r) * K + cl);
      models.push_back(build_empirical(sample(classes[cl], rng, p.m), p));
      cov = cov && coverage_event_holds(models.back(), classes[cl], p.gamma);
    }
    covered += cov ? 1 : 0;
    std::vector<const EmpiricalModel*> ptrs;
    for (const auto& m : models) ptrs.push_back(&m);
    auto trial = [&](std::mt19937_64& rng, std::vector<double>& out) {
      out[0] = empirical_vcg_lazy(env, draw_values(classes, rng), ptrs).revenue;
    };
    means.push_back(monte_carlo(trial, 1, trials, derive(rep.seed, 1000 + static_cast<std::uint64_t>(r)))[0].mean);
  }
  MetricStats rev = summarize(means);
  double w = expected_top_k_sum(classes, static_cast<int>(k_env));
  double g2 = (1.0 + p.gamma) * (1.0 + p.gamma);
  double factor = reserve_power(a) * (1.0 - p.xi * g2) * (1.0 - static_cast<double>(K) * p.delta) / (g2 * g2);
  rep.add_stats("revenue", rev, factor * w, true, at_least(rev, factor * w));
  rep.add_exact("vcg_welfare", w, w, true);
  rep.add_exact("target_factor", factor, factor, true);
  double frac = static_cast<double>(covered) / resamples;
  rep.add_exact("coverage_fraction", frac, 1.0 - static_cast<double>(K) * p.delta, true);
  return rep;
}

Report exp_two_mech(const Json& c) {
  Report rep;
  rep.seed = seed_of(c);
  double a = c.value("alpha", 0.5);
  Json cases = c.value("instances", Json::parse(R"([{"n":2,"L":4,"k":1},{"n":3,"L":5,"k":1},{"n":3,"L":6,"k":2}])"));
  std::uint64_t trials = c.value("trials", std::uint64_t{1000000});
  rep.trials = trials;
  double factor = 4.0 / a + 2.0 * (a + 1.0) / std::pow(a, (2.0 - a) / (1.0 - a));
  rep.notes.push_back("benchmark: E[max feasible sum of values], an upper bound on the budget-feasible optimum");
  for (std::size_t idx = 0; idx < cases.size(); ++idx) {
    std::size_t n = cases[idx].at("n");
    int L = cases[idx].at("L");
    std::size_t k = cases[idx].value("k", std::size_t{1});
    auto gen = make_stream(derive(rep.seed, 1), idx);
    std::vector<Distribution> dists;
    std::vector<double> budgets;
    for (std::size_t i = 0; i < n; ++i) dists.push_back(random_alpha_sr_discrete(a, L, gen));
    for (std::size_t i = 0; i < n; ++i) budgets.push_back(1.0 + (L - 1) * uniform_open_closed(gen));
    Environment env = Environment::k_uniform(n, k);
    double ub = oracle_exact_expectation(dists, [&](const std::vector<double>& v) {
      return env.set_weight(env.max_weight_set(v), v);
    });
    auto trial = [&](std::mt19937_64& rng, std::vector<double>& out) {
      std::vector<double> v = draw_values(dists, rng);
      int coin = (rng() & 1u) ? 1 : 2;
      MechanismOutcome o = two_mech_budget(env, dists, v, budgets, coin);
      out[0] = o.welfare;
      out[1] = o.revenue;
    };
    auto st = monte_carlo(trial, 2, trials, derive(rep.seed, 100 + idx));
    std::string tag = "[instance=" + std::to_string(idx) + "]";
    rep.add_stats("welfare" + tag, st[0], ub / factor, true, at_least(st[0], ub / factor));
    rep.add_exact("opt_upper_bound" + tag, ub, ub, true);
    rep.add_stats("revenue" + tag, st[1], 0.0, false, true);
  }
  rep.add_exact("target_factor", factor, factor, true);
  return rep;
}

// Myerson revenue of n i.i.d. bidders whose value is min{v, B}.
double capped_upper_bound(const Distribution& d, const BudgetLaw& law, int n, int grid) {
  double top = *std::max_element(law.values.begin(), law.values.end());
  std::vector<double> xs;
  for (int k = 1; k <= grid; ++k) xs.push_back(top * k / grid);
  for (double b : law.values) xs.push_back(b);
  std::vector<std::pair<double, double>> pts;
  for (double x : xs) {
    double q = d.quantile_of_value(x) * law.survival(x);
    pts.emplace_back(q, x * q);
  }
  return optimal_revenue_from_curve(pts, n);
}

Report exp_lottery(const Json& c, bool empirical) {
  Report rep;
  rep.seed = seed_of(c);
  double a = c.value("alpha", 0.5);
  Distribution d = distribution_from_json(c.value("dist", Json{{"kind", "falpha"}, {"alpha", a}}));
  std::size_t n = c.value("bidders", std::size_t{2});
  BudgetLaw law = budget_law_of(c);
  Environment env = Environment::k_uniform(n, c.value("k", std::size_t{1}));
  std::vector<Distribution> all(n, d);
  double ub = capped_upper_bound(d, law, static_cast<int>(n), c.value("ub_grid", 20000));
  rep.add_exact("opt_upper_bound", ub, ub, true);

  auto run = [&](const std::vector<double>& reserves, std::uint64_t trials, std::uint64_t seed) {
    auto trial = [&](std::mt19937_64& rng, std::vector<double>& out) {
      std::vector<double> v = draw_values(all, rng);
      std::vector<double> B(n);
      for (double& b : B) b = law.draw(rng);
      out[0] = lottery_mechanism(env, v, B, reserves, rng).revenue;
    };
    return monte_carlo(trial, 1, trials, seed)[0];
  };

  if (!empirical) {
    double factor = 3.0 * (1.0 + 1.0 / reserve_power(a));
    std::uint64_t trials = c.value("trials", std::uint64_t{1000000});
    rep.trials = trials;
    MetricStats rev = run(std::vector<double>(n, d.reserve_price()), trials, derive(rep.seed, 0));
    rep.add_stats("revenue", rev, ub / factor, true, at_least(rev, ub / factor));
    rep.add_exact("target_factor", factor, factor, true);
    return rep;
  }

  SampleParams p = params_of(c, 0.05, 0.05, 0.05);
  note_validity(rep, p);
  int resamples = c.value("resamples", 10);
  std::uint64_t trials = c.value("trials", std::uint64_t{100000});
  double k_classes = c.value("classes", 1.0);
  rep.trials = trials * static_cast<std::uint64_t>(resamples);
  double loss = std::max(std::sqrt(8.0 * p.gamma / a), 4.0 * p.gamma + p.xi * p.gamma);
  double factor = 3.0 / (1.0 - k_classes * p.delta) * (1.0 + 1.0 / (reserve_power(a) * (1.0 - loss)));
  std::vector<double> means;
  int covered = 0;
  for (int r = 0; r < resamples; ++r) {
    auto rng = make_stream(derive(rep.seed, 1), static_cast<std::uint64_t>(r));
    EmpiricalModel em = build_empirical(sample(d, rng, p.m), p);
    covered += coverage_event_holds(em, d, p.gamma) ? 1 : 0;
    means.push_back(run(std::vector<double>(n, em.reserve), trials, derive(rep.seed, 1000 + r)).mean);
  }
  MetricStats rev = summarize(means);
  rep.add_stats("revenue", rev, ub / factor, true, at_least(rev, ub / factor));
  rep.add_exact("target_factor", factor, factor, true);
  rep.add_exact("coverage_fraction", static_cast<double>(covered) / resamples, 1.0 - p.delta, true);
  return rep;
}

Report exp_empquantrange(const Json& c) {
  Report rep;
  rep.seed = seed_of(c);
  double a = c.value("alpha", 0.5);
  Distribution d = distribution_from_json(c.value("dist", Json{{"kind", "falpha"}, {"alpha", a}}));
  SampleParams p = params_of(c, 0.1, 0.01, 0.01);
  note_validity(rep, p);
  int builds = c.value("builds", 200);
  std::size_t points = c.value("lemma_points", std::size_t{1000});
  rep.trials = static_cast<std::uint64_t>(builds);
  std::map<std::string, LemmaMargin> worst;
  auto record = [&](const LemmaMargin& m) {
    LemmaMargin& w = worst[m.name];
    w.name = m.name;
    if (m.points > 0) w.update(m.margin, m.at);
  };
  std::uint64_t covered = 0;
  for (int b = 0; b < builds; ++b) {
    auto rng = make_stream(derive(rep.seed, 1), static_cast<std::uint64_t>(b));
    EmpiricalModel em = build_empirical(sample(d, rng, p.m), p);
    if (!coverage_event_holds(em, d, p.gamma)) continue;
    ++covered;
    record(lemma_empreserve(em, d));
    for (const LemmaMargin& m : lemma_empquant(em, d, points)) record(m);
    record(lemma_reservequant(em, d, a));
  }
  auto [lo, hi] = wilson_interval(covered, static_cast<std::uint64_t>(builds));
  MetricRow row;
  row.metric = "coverage_fraction";
  row.value = static_cast<double>(covered) / builds;
  row.ci_lo = lo;
  row.ci_hi = hi;
  row.target = 1.0 - p.delta;
  row.has_target = true;
  row.verdict = hi >= 1.0 - p.delta;
  rep.add(row);
  for (const char* name : {"empreserve", "empquant-upper", "empquant-lower", "reservequant"}) {
    auto it = worst.find(name);
    double m = (it == worst.end() || it->second.points == 0) ? std::nan("") : it->second.margin;
    rep.add_exact(std::string(name) + "_margin", m, -1e-9, m >= -1e-9);
  }
  return rep;
}

MultiItemInstance random_instance(double alpha, int L, const std::vector<double>& budgets,
                                  const std::vector<int>& limits, std::size_t items, std::mt19937_64& gen) {
  std::vector<std::vector<Distribution>> table(budgets.size());
  for (auto& row : table)
    for (std::size_t j = 0; j < items; ++j) row.push_back(random_alpha_sr_discrete(alpha, L, gen));
  return MultiItemInstance::make(table, budgets, limits);
}

MultiItemInstance instance_of(const Json& c, std::uint64_t seed, std::uint64_t index) {
  if (c.contains("instance")) return instance_from_json(c.at("instance"));
  auto gen = make_stream(derive(seed, 50), index);
  return random_instance(c.value("alpha", 0.5), c.value("L", 4), c.value("budgets", std::vector<double>{4.0, 3.0}),
                         c.value("limits", std::vector<int>{1, 2}), c.value("items", std::size_t{2}), gen);
}

// Empirical models for every pair, and whether the coverage event holds for all of them.
std::pair<std::vector<EmpiricalModel>, bool> build_models(const MultiItemInstance& inst, const SampleParams& p,
                                                         std::uint64_t seed, std::uint64_t index) {
  std::vector<EmpiricalModel> models;
  bool cov = true;
  for (std::size_t k = 0; k < inst.dists.size(); ++k) {
    auto rng = make_stream(seed, index * inst.dists.size() + k);
    models.push_back(build_empirical(sample(inst.dists[k], rng, p.m), p));
    cov = cov && coverage_event_holds(models.back(), inst.dists[k], p.gamma);
  }
  return {std::move(models), cov};
}

double lp3_factor(const PricingPlan& plan) {
  double g = 1.0 + plan.gamma;
  double xb = plan.xi_bar;
  return (1.0 - plan.c * xb) * (1.0 - plan.c_prime * xb) * (1.0 - xb * g * g) * (1.0 - xb * g * g * g) / std::pow(g, 9);
}

double mechanism_factor(const PricingPlan& plan) {
  double g = 1.0 + plan.gamma;
  double xb = plan.xi_bar;
  double t = 1.0 - xb * g * g * g;
  return (1.0 - plan.c * xb) * (1.0 - plan.c_prime * xb) * t * t / std::pow(g, 9);
}

Report exp_lp_suite(const Json& c) {
  Report rep;
  rep.seed = seed_of(c);
  int n_lps = c.value("random_lps", 50);
  double worst_diff = 0.0;
  for (int t = 0; t < n_lps; ++t) {
    auto rng = make_stream(derive(rep.seed, 1), static_cast<std::uint64_t>(t));
    std::size_t n = 2 + std::min<std::size_t>(4, static_cast<std::size_t>(5.0 * uniform_open_closed(rng)));
    std::size_t m = 1 + std::min<std::size_t>(3, static_cast<std::size_t>(4.0 * uniform_open_closed(rng)));
    BoxLp lp;
    for (std::size_t j = 0; j < n; ++j) lp.c.push_back(2.0 * uniform_open_closed(rng) - 1.0);
    lp.A.assign(m, std::vector<double>(n));
    for (auto& row : lp.A)
      for (double& x : row) x = 1.5 * uniform_open_closed(rng) - 0.5;
    for (std::size_t r = 0; r < m; ++r) lp.b.push_back(0.2 + 1.8 * uniform_open_closed(rng));
    double got = solve_box_lp(lp).objective;
    double want = oracle_lp_vertex_enumeration(lp);
    worst_diff = std::max(worst_diff, std::abs(got - want));
  }
  rep.add_exact("solver_vs_enumeration_max_diff", worst_diff, 1e-8, worst_diff <= 1e-8);

  SampleParams p = params_of(c, 0.1, 0.05, 0.05);
  note_validity(rep, p);
  int builds = c.value("covered_builds", 100);
  int max_attempts = c.value("max_attempts", 3 * builds);
  int covered = 0;
  double identity = 0.0;
  double min_slack = kInf;
  double lp3_margin = kInf;
  double lp3_ratio = kInf;
  for (int att = 0; att < max_attempts && covered < builds; ++att) {
    MultiItemInstance inst = instance_of(c, derive(rep.seed, 2), static_cast<std::uint64_t>(att));
    auto [models, cov] = build_models(inst, p, derive(rep.seed, 3), static_cast<std::uint64_t>(att));
    if (!cov) continue;
    ++covered;
    LpProblem lp2 = build_lp2(inst);
    LpSolution s2 = solve(lp2);
    identity = std::max(identity, std::abs(aggregate(s2, lp2).objective - s2.objective));
    LpProblem lp3 = build_lp3(inst, models, p);
    LpSolution s3 = solve(lp3);
    PricingPlan plan = make_pricing_plan(s3, lp3, inst, models, p);
    min_slack = std::min(min_slack, check_lp2_feasible(plan.y_bar, lp2).min_slack);
    double v3 = 0.0;
    for (std::size_t k = 0; k < plan.y_bar.size(); ++k) v3 += lp2.lp.c[k] * plan.y_bar[k];
    double f = lp3_factor(plan);
    lp3_margin = std::min(lp3_margin, v3 - f * s2.objective);
    if (s2.objective > 0.0) lp3_ratio = std::min(lp3_ratio, v3 / s2.objective);
  }
  rep.trials = static_cast<std::uint64_t>(covered);
  rep.add_exact("covered_builds", covered, builds, covered >= builds);
  rep.add_exact("aggregate_identity_max_diff", identity, 1e-8, identity <= 1e-8);
  rep.add_exact("lp2constraint_min_slack", min_slack, -1e-9, min_slack >= -1e-9);
  rep.add_exact("lp3_margin", lp3_margin, -1e-9, lp3_margin >= -1e-9);
  rep.add_exact("lp3_min_ratio", lp3_ratio, lp3_ratio, true);
  return rep;
}

struct PostedRun {
  MetricStats revenue;
  std::vector<MetricStats> alloc;
};

PostedRun run_posted(const MultiItemInstance& inst, const PricingPlan& plan, std::uint64_t trials,
                     std::uint64_t seed) {
  const std::size_t pairs = inst.dists.size();
  auto trial = [&](std::mt19937_64& rng, std::vector<double>& out) {
    std::vector<double> v = draw_values(inst.dists, rng);
    MechanismOutcome o = posted_price_mechanism(inst, plan, v, rng);
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = o.revenue;
    for (const auto& [i, j] : o.allocation) out[1 + static_cast<std::size_t>(i) * inst.items + j] = 1.0;
  };
  auto st = monte_carlo(trial, 1 + pairs, trials, seed);
  return {st[0], std::vector<MetricStats>(st.begin() + 1, st.end())};
}

void add_posted_rows(Report& rep, const std::string& tag, const MultiItemInstance& inst, const PricingPlan& plan,
                     const PostedRun& run, double revenue_target) {
  rep.add_stats("revenue" + tag, run.revenue, revenue_target, true, at_least(run.revenue, revenue_target));
  for (std::size_t i = 0; i < inst.bidders; ++i) {
    for (std::size_t j = 0; j < inst.items; ++j) {
      std::size_t k = i * inst.items + j;
      double target = plan.y_star[k] / 24.0;
      std::string name = "alloc[i=" + std::to_string(i) + ";j=" + std::to_string(j) + "]" + tag;
      rep.add_stats(name, run.alloc[k], target, true, at_least(run.alloc[k], target));
    }
  }
}

Report exp_posted_price(const Json& c, bool empirical) {
  Report rep;
  rep.seed = seed_of(c);
  MultiItemInstance inst = instance_of(c, derive(rep.seed, 2), 0);
  LpProblem lp2 = build_lp2(inst);
  LpSolution s2 = solve(lp2);
  double v2 = s2.objective;
  rep.add_exact("lp2_optimum", v2, v2, true);
  if (!empirical) {
    std::uint64_t trials = c.value("trials", std::uint64_t{1000000});
    rep.trials = trials;
    PricingPlan plan = make_full_info_plan(s2, lp2, inst);
    add_posted_rows(rep, "", inst, plan, run_posted(inst, plan, trials, derive(rep.seed, 0)), v2 / 24.0);
    return rep;
  }
  SampleParams p = params_of(c, 0.1, 0.05, 0.05);
  note_validity(rep, p);
  int builds = c.value("covered_builds", 3);
  int max_attempts = c.value("max_attempts", 4 * builds);
  std::uint64_t trials = c.value("trials", std::uint64_t{200000});
  int covered = 0;
  for (int att = 0; att < max_attempts && covered < builds; ++att) {
    auto [models, cov] = build_models(inst, p, derive(rep.seed, 3), static_cast<std::uint64_t>(att));
    if (!cov) continue;
    LpProblem lp3 = build_lp3(inst, models, p);
    PricingPlan plan = make_pricing_plan(solve(lp3), lp3, inst, models, p);
    std::string tag = "[build=" + std::to_string(covered) + "]";
    PostedRun run = run_posted(inst, plan, trials, derive(rep.seed, 100 + static_cast<std::uint64_t>(att)));
    add_posted_rows(rep, tag, inst, plan, run, v2 / 24.0 * mechanism_factor(plan));
    ++covered;
  }
  rep.trials = trials;
  rep.add_exact("covered_builds", covered, builds, covered >= builds);
  return rep;
}

using ExperimentFn = std::function<Report(const Json&)>;

const std::map<std::string, ExperimentFn>& registry() {
  static const std::map<std::string, ExperimentFn> reg{
      {"closed-form", exp_closed_form},
      {"lemma-suite", exp_lemma_suite},
      {"lemma-square",
       [](const Json& c) {
         Json cc = c;
         cc["only_square"] = true;
         return exp_lemma_suite(cc);
       }},
      {"vcg-duplicates", exp_vcg_duplicates},
      {"vcgl", exp_vcgl},
      {"vcgl-samp", exp_vcgl_samp},
      {"two-mech", exp_two_mech},
      {"lottery", [](const Json& c) { return exp_lottery(c, false); }},
      {"lottery-samp", [](const Json& c) { return exp_lottery(c, true); }},
      {"empquantrange", exp_empquantrange},
      {"lp-suite", exp_lp_suite},
      {"posted-price", [](const Json& c) { return exp_posted_price(c, false); }},
      {"posted-price-samp", [](const Json& c) { return exp_posted_price(c, true); }},
  };
  return reg;
}

std::string joined(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

}  // namespace

std::vector<std::string> list_experiment_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, fn] : registry()) ids.push_back(id);
  return ids;
}

Report run_experiment(const std::string& id, const Json& config) {
  auto it = registry().find(id);
  if (it == registry().end())
    throw UnknownExperiment("unknown experiment '" + id + "'; valid ids: " + joined(list_experiment_ids()));
  Json cfg = config.is_null() ? Json::object() : config;
  auto start = std::chrono::steady_clock::now();
  Report rep = it->second(cfg);
  rep.experiment_id = id;
  rep.seed = seed_of(cfg);
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::vector<std::string> list_mechanism_names() {
  return {"vcg", "vcg-dup", "vcgl", "vcgl-emp", "myerson", "two-mech", "lottery", "posted", "posted-emp"};
}

Report run_mechanism(const std::string& mech, const Json& config, std::uint64_t trials, std::uint64_t seed) {
  auto names = list_mechanism_names();
  if (std::find(names.begin(), names.end(), mech) == names.end())
    throw std::invalid_argument("unknown mechanism '" + mech + "'; valid names: " + joined(names));
  Report rep;
  rep.experiment_id = "mech:" + mech;
  rep.seed = seed;
  rep.trials = trials;
  auto start = std::chrono::steady_clock::now();

  if (mech == "posted" || mech == "posted-emp") {
    MultiItemInstance inst = instance_of(config, derive(seed, 2), 0);
    LpProblem lp2 = build_lp2(inst);
    LpSolution s2 = solve(lp2);
    PricingPlan plan;
    if (mech == "posted") {
      plan = make_full_info_plan(s2, lp2, inst);
    } else {
      SampleParams p = sample_params_from_json(config.value("samples", Json::object()));
      if (p.m == 0) p.m = validate_params(p).required_m;
      auto built = build_models(inst, p, derive(seed, 3), 0);
      LpProblem lp3 = build_lp3(inst, built.first, p);
      plan = make_pricing_plan(solve(lp3), lp3, inst, built.first, p);
    }
    PostedRun run = run_posted(inst, plan, trials, seed);
    rep.add_stats("revenue", run.revenue, 0.0, false, true);
    rep.add_exact("lp2_optimum", s2.objective, s2.objective, true);
  } else {
    std::vector<Distribution> dists = dists_of(config, "dists", {});
    if (dists.empty()) throw std::invalid_argument("mechanism config needs a 'dists' list");
    const std::size_t n = dists.size();
    Environment env = environment_from_json(config.value("env", Json()), n);
    std::vector<double> reserves;
    if (config.contains("reserves")) {
      reserves = config.at("reserves").get<std::vector<double>>();
    } else {
      for (const auto& d : dists) reserves.push_back(d.has_reserve() ? d.reserve_price() : 0.0);
    }
    std::vector<double> budgets = config.value("budgets", std::vector<double>(n, kInf));
    bool random_budgets = config.contains("budget_dist");
    BudgetLaw law = budget_law_of(config);
    std::vector<EmpiricalModel> models;
    if (mech == "vcgl-emp") {
      SampleParams p = sample_params_from_json(config.value("samples", Json::object()));
      if (p.m == 0) p.m = validate_params(p).required_m;
      for (std::size_t i = 0; i < n; ++i) {
        auto rng = make_stream(derive(seed, 1), i);
        models.push_back(build_empirical(sample(dists[i], rng, p.m), p));
      }
    }
    std::vector<const EmpiricalModel*> ptrs;
    for (const auto& m : models) ptrs.push_back(&m);
    auto trial = [&](std::mt19937_64& rng, std::vector<double>& out) {
      std::vector<double> v = draw_values(dists, rng);
      std::vector<double> B = budgets;
      if (random_budgets)
        for (double& b : B) b = law.draw(rng);
      MechanismOutcome o;
      if (mech == "vcg") o = vcg(env, v);
      else if (mech == "vcg-dup") o = vcg_with_duplicates(env, v, draw_values(dists, rng));
      else if (mech == "vcgl") o = vcg_lazy(env, v, reserves);
      else if (mech == "vcgl-emp") o = empirical_vcg_lazy(env, v, ptrs);
      else if (mech == "myerson") o = myerson(env, dists, v);
      else if (mech == "two-mech") o = two_mech_budget(env, dists, v, B, (rng() & 1u) ? 1 : 2);
      else o = lottery_mechanism(env, v, B, reserves, rng);
      out[0] = o.revenue;
      out[1] = o.welfare;
    };
    auto st = monte_carlo(trial, 2, trials, seed);
    rep.add_stats("revenue", st[0], 0.0, false, true);
    rep.add_stats("welfare", st[1], 0.0, false, true);
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace alphasr
