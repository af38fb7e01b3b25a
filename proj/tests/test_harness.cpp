#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "alphasr/experiments.hpp"
#include "alphasr/harness.hpp"
#include "alphasr/json_io.hpp"
#include "alphasr/mechanisms.hpp"

using namespace alphasr;
using doctest::Approx;

namespace {

Json discrete_spec(std::vector<double> s, std::vector<double> p) {
  return Json{{"kind", "discrete"}, {"support", s}, {"pmf", p}};
}

const std::vector<Json> kTinyDists = {discrete_spec({1, 2}, {0.5, 0.5}), discrete_spec({1, 3}, {0.6, 0.4})};

std::vector<Distribution> tiny_dists() {
  std::vector<Distribution> out;
  for (const Json& j : kTinyDists) out.push_back(distribution_from_json(j));
  return out;
}

// Mean of a run_mechanism report row, with its standard error.
std::pair<double, double> row_of(const Report& r, const std::string& metric) {
  for (const MetricRow& row : r.rows)
    if (row.metric == metric) return {row.value, row.std_error};
  FAIL("metric missing: " << metric);
  return {0, 0};
}

}  // namespace

TEST_CASE("monte carlo engine") {
  auto constant = [](std::mt19937_64&, std::vector<double>& out) { out[0] = 3.5; };
  auto st = monte_carlo(constant, 1, 1000, 1);
  CHECK(st[0].mean == 3.5);
  CHECK(st[0].std_error == 0.0);

  auto coin = [](std::mt19937_64& rng, std::vector<double>& out) { out[0] = (rng() & 1u) ? 2.0 : 0.0; };
  auto fair = monte_carlo(coin, 1, 1000000, 5);
  CHECK(std::abs(fair[0].mean - 1.0) <= 3.0 * fair[0].std_error);
  CHECK(fair[0].n == 1000000);

  auto again = monte_carlo(coin, 1, 1000000, 5);
  CHECK(again[0].mean == fair[0].mean);
  CHECK(again[0].std_error == fair[0].std_error);
  auto threaded = monte_carlo(coin, 1, 1000000, 5, 4);
  CHECK(threaded[0].mean == fair[0].mean);
  CHECK(threaded[0].std_error == fair[0].std_error);

  CHECK(stream_seed(1, 2) == stream_seed(1, 2));
  CHECK(stream_seed(1, 2) != stream_seed(1, 3));
}

TEST_CASE("summaries and intervals") {
  MetricStats s = summarize({1, 2, 3, 4});
  CHECK(s.mean == 2.5);
  CHECK(s.std_error == Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == Approx(0.4038).epsilon(1e-3));
  CHECK(hi == Approx(0.5962).epsilon(1e-3));
  auto [lo0, hi0] = wilson_interval(0, 20);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
}

TEST_CASE("95% intervals cover a known Bernoulli mean") {
  const double p = 0.3;
  int covered = 0;
  for (int meta = 0; meta < 100; ++meta) {
    auto trial = [&](std::mt19937_64& rng, std::vector<double>& out) {
      out[0] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p ? 1.0 : 0.0;
    };
    MetricStats s = monte_carlo(trial, 1, 2000, 1000 + meta)[0];
    covered += (s.ci_lo <= p && p <= s.ci_hi);
  }
  CHECK(covered >= 90);
}

TEST_CASE("report CSV") {
  CHECK(csv_header() == "experiment_id,metric,value,stderr,ci_lo,ci_hi,target,verdict,seed,trials\n");
  Report r;
  r.experiment_id = "x";
  r.seed = 7;
  r.trials = 10;
  r.add_exact("m", 1.5, 1.0, true);
  CHECK(r.passed());
  std::string csv = to_csv(r);
  CHECK(csv.rfind(csv_header(), 0) == 0);
  CHECK(csv.find("x,m,1.5") != std::string::npos);
  r.add_exact("bad", 0.0, 1.0, false);
  CHECK_FALSE(r.passed());
}

TEST_CASE("optimal revenue oracles") {
  Distribution coin = Distribution::discrete({1, 2}, {0.5, 0.5});
  CHECK(oracle_optimal_revenue_single_item({coin}) == Approx(1.0));
  CHECK(oracle_optimal_revenue_single_item({coin, coin}) == Approx(1.5));
  CHECK(oracle_optimal_revenue_single_item({Distribution::discrete({0}, {1.0})}) == 0.0);

  Distribution f = Distribution::falpha(0.5);
  CHECK(optimal_revenue_iid_continuous(f, 1) == Approx(0.25).epsilon(1e-8));
  // Two F^0.5 bidders: E[max(0, phi(max))] with phi(v) = (v-1)/2 and max cdf (1 - (1+v)^-2)^2.
  double direct = 0.0;
  const int steps = 2000000;
  for (int k = 0; k < steps; ++k) {
    double u = (k + 0.5) / steps;  // v = 1 + tan(u pi/2) maps (0,1) onto (1, inf)
    double v = 1.0 + std::tan(u * M_PI / 2);
    double dv = (M_PI / 2) / std::pow(std::cos(u * M_PI / 2), 2) / steps;
    double dens = 2.0 * (1.0 - std::pow(1 + v, -2)) * 2.0 * std::pow(1 + v, -3);
    direct += 0.5 * (v - 1.0) * dens * dv;
  }
  CHECK(optimal_revenue_iid_continuous(f, 2) == Approx(direct).epsilon(1e-6));

  std::vector<std::pair<double, double>> curve;
  for (int k = 1; k <= 4000; ++k) {
    double q = k / 4000.0;
    curve.emplace_back(q, std::sqrt(q) - q);
  }
  CHECK(optimal_revenue_from_curve(curve, 2) == Approx(direct).epsilon(1e-4));
  CHECK(optimal_revenue_from_curve({{0.5, 1.0}, {1.0, 1.0}}, 1) == Approx(1.0));
}

TEST_CASE("top-k sums and vertex enumeration") {
  Distribution e = Distribution::exponential(1.0);
  CHECK(expected_top_k_sum({e, e}, 1) == Approx(1.5).epsilon(1e-7));
  CHECK(expected_top_k_sum({e, e, e}, 2) == Approx(3.0 - 1.0 / 3.0).epsilon(1e-7));
  CHECK(expected_top_k_sum({e, e, e}, 3) == Approx(3.0).epsilon(1e-7));
  BoxLp lp{{1.0, 1.0}, {{1.0, 2.0}}, {1.5}};
  std::vector<double> x;
  CHECK(oracle_lp_vertex_enumeration(lp, &x) == Approx(1.25));
  CHECK(x[0] == Approx(1.0));
  CHECK(x[1] == Approx(0.25));
}

TEST_CASE("mechanism Monte Carlo agrees with exact enumeration") {
  std::vector<Distribution> d = tiny_dists();
  Environment env = Environment::single_item(2);
  std::vector<double> r = {d[0].reserve_price(), d[1].reserve_price()};
  std::vector<double> budgets = {1.5, 2.5};
  Json base = {{"dists", kTinyDists}};
  Json budgeted = base;
  budgeted["budgets"] = budgets;

  // VCG revenue in a two-bidder single-item auction is E[min(v1, v2)].
  double min_mean = 0.0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      min_mean += d[0].pmf()[a] * d[1].pmf()[b] * std::min(d[0].support()[a], d[1].support()[b]);
  CHECK(oracle_exact_expectation(d, [&](const auto& v) { return vcg(env, v).revenue; }) == Approx(min_mean));

  auto lottery_expected = [&](const std::vector<double>& v) {
    BSetThresholds bt = compute_B_set_and_thresholds(env, v, budgets);
    double total = 0.0;
    std::mt19937_64 unused(0);
    for (std::size_t i = 0; i < 2; ++i) {
      LotteryOffer o = lottery_offer(bt.T[i], r[i]);
      LotteryPurchase p = lottery_bidder_choice(o, v[i], budgets[i], unused);
      if (!p.participated) continue;
      total += o.mode == LotteryOffer::Mode::Posted ? o.p : p.win_probability * p.a * o.pprime / 2.0;
    }
    return total;
  };

  struct Case {
    const char* mech;
    const Json* config;
    std::function<double(const std::vector<double>&)> exact;
  };
  std::vector<Case> cases = {
      {"vcg", &base, [&](const auto& v) { return vcg(env, v).revenue; }},
      {"vcgl", &base, [&](const auto& v) { return vcg_lazy(env, v, r).revenue; }},
      {"myerson", &base, [&](const auto& v) { return myerson(env, d, v).revenue; }},
      {"two-mech", &budgeted,
       [&](const auto& v) {
         return 0.5 * (two_mech_budget(env, d, v, budgets, 1).revenue + two_mech_budget(env, d, v, budgets, 2).revenue);
       }},
      {"lottery", &budgeted, lottery_expected},
  };
  for (const Case& c : cases) {
    CAPTURE(c.mech);
    double exact = oracle_exact_expectation(d, c.exact);
    auto [mean, se] = row_of(run_mechanism(c.mech, *c.config, 200000, 9), "revenue");
    CHECK(std::abs(mean - exact) <= 4.0 * se + 1e-12);
  }
  CHECK(oracle_exact_expectation(d, [&](const auto& v) { return myerson(env, d, v).revenue; }) ==
        Approx(oracle_optimal_revenue_single_item(d)));
}

TEST_CASE("posted-price run on a deterministic plan matches its trace") {
  Distribution d = Distribution::discrete({1, 2, 3}, {0.2, 0.3, 0.5});
  MultiItemInstance inst = MultiItemInstance::make({{d}}, {10}, {1});
  PricingPlan plan;
  plan.bidders = plan.items = 1;
  plan.p_offer = 1.0;
  plan.lotteries = {PriceLottery{2.0, 3.0, 1.0}};
  double exact = oracle_exact_expectation({d}, [&](const auto& v) {
    std::mt19937_64 rng(0);
    return posted_price_mechanism(inst, plan, v, rng).revenue;
  });
  CHECK(exact == Approx(2.0 * 0.8));
}

TEST_CASE("JSON specs") {
  Distribution f = distribution_from_json(Json::parse(R"({"kind":"falpha","alpha":0.5,"scale":2.0})"));
  CHECK(f.alpha() == 0.5);
  CHECK(f.reserve_price() == Approx(2.0).epsilon(1e-9));
  Distribution disc = distribution_from_json(distribution_to_json(Distribution::discrete({1, 2}, {0.25, 0.75})));
  CHECK(disc.pmf()[1] == Approx(0.75));
  CHECK(distribution_from_json(Json::parse(R"({"kind":"exponential","rate":2})")).mean() == Approx(0.5).epsilon(1e-8));
  CHECK_THROWS(distribution_from_json(Json::parse(R"({"kind":"uniform"})")));

  CHECK(environment_from_json(Json(), 3).k() == 1);
  CHECK(environment_from_json(Json::parse(R"({"type":"k_uniform","k":2})"), 3).k() == 2);
  Environment ex = environment_from_json(Json::parse(R"({"type":"explicit","sets":[[0],[1]]})"), 2);
  CHECK_FALSE(ex.is_feasible(0b11));

  MultiItemInstance inst = instance_from_json(Json::parse(R"({
    "dists": [[{"kind":"discrete","support":[1,2,3],"pmf":[0.2,0.3,0.5]}]],
    "budgets": [2], "limits": [1]})"));
  CHECK(inst.dist(0, 0).support() == std::vector<double>{1, 2});
  CHECK(parse_json_argument(R"({"a":1})")["a"] == 1);
}

TEST_CASE("experiment registry") {
  auto ids = list_experiment_ids();
  for (const char* id : {"closed-form", "lemma-suite", "lemma-square", "vcg-duplicates", "vcgl", "vcgl-samp", "two-mech",
                         "lottery", "lottery-samp", "empquantrange", "lp-suite", "posted-price", "posted-price-samp"})
    CHECK(std::find(ids.begin(), ids.end(), id) != ids.end());
  try {
    run_experiment("no-such-experiment", Json::object());
    FAIL("expected UnknownExperiment");
  } catch (const UnknownExperiment& e) {
    std::string msg = e.what();
    CHECK(msg.find("closed-form") != std::string::npos);
    CHECK(msg.find("posted-price") != std::string::npos);
  }
  CHECK_THROWS(run_mechanism("no-such-mechanism", Json::object(), 10, 1));
}

TEST_CASE("small experiments pass and are deterministic") {
  Report sq = run_experiment("lemma-square", Json::object());
  CHECK(sq.passed());
  Json cfg = {{"trials", 20000}, {"bidders", {1, 2}}};
  Report a = run_experiment("vcg-duplicates", cfg);
  Report b = run_experiment("vcg-duplicates", cfg);
  CHECK(to_csv(a) == to_csv(b));
  Json other = cfg;
  other["seed"] = 77;
  CHECK(to_csv(run_experiment("vcg-duplicates", other)) != to_csv(a));
}
