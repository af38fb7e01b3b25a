#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "alphasr/environment.hpp"
#include "alphasr/generators.hpp"
#include "alphasr/harness.hpp"
#include "alphasr/mechanisms.hpp"

using namespace alphasr;
using doctest::Approx;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double payment_of(const MechanismOutcome& out, int bidder) {
  for (std::size_t k = 0; k < out.winners.size(); ++k)
    if (out.winners[k] == bidder) return out.payments[k];
  return 0.0;
}

bool wins(const MechanismOutcome& out, int bidder) {
  for (int w : out.winners)
    if (w == bidder) return true;
  return false;
}

BidderSet winner_set(const MechanismOutcome& out) {
  BidderSet s = 0;
  for (int w : out.winners) s |= BidderSet{1} << w;
  return s;
}

// Random downward-closed family: close a few random sets under subsets.
Environment random_explicit_env(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<BidderSet> pick(0, (BidderSet{1} << n) - 1);
  std::vector<BidderSet> gens = {pick(rng), pick(rng), pick(rng)};
  std::vector<std::vector<int>> sets;
  for (BidderSet s = 0; s < (BidderSet{1} << n); ++s) {
    for (BidderSet g : gens)
      if ((s & ~g) == 0) {
        sets.push_back(to_indices(s));
        break;
      }
  }
  return Environment::explicit_sets(n, sets);
}

}  // namespace

TEST_CASE("environment basics") {
  CHECK(to_indices(0b1011) == std::vector<int>{0, 1, 3});
  CHECK(from_indices({0, 1, 3}) == 0b1011);
  CHECK(lex_less(from_indices({0, 2}), from_indices({1})));
  CHECK(lex_less(from_indices({0}), from_indices({0, 1})));
  CHECK_FALSE(lex_less(from_indices({1}), from_indices({0, 5})));
  CHECK_THROWS(Environment::explicit_sets(2, {{0, 1}}));
  Environment e = Environment::explicit_sets(2, {{0}, {1}});
  CHECK(e.is_feasible(0));
  CHECK_FALSE(e.is_feasible(0b11));
  Environment k2 = Environment::k_uniform(4, 2);
  CHECK(k2.is_feasible(0b0101));
  CHECK_FALSE(k2.is_feasible(0b0111));
}

TEST_CASE("argmax agrees with the brute-force oracle") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> w(0, 4);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 1 + t % 5;
    Environment env = (t % 2) ? random_explicit_env(n, rng) : Environment::k_uniform(n, 1 + t % 3);
    std::vector<double> weights(n);
    for (double& x : weights) x = w(rng);
    CHECK(env.max_weight_set(weights) == oracle_feasible_argmax(env, weights));
  }
  CHECK(oracle_feasible_argmax(Environment::single_item(2), {3, 2}) == 0b01);
  CHECK(oracle_feasible_argmax(Environment::k_uniform(0, 0), {}) == 0);
  CHECK(oracle_feasible_argmax(Environment::explicit_sets(2, {{0}, {1}, {0, 1}}), {1, 1}) == 0b11);
}

TEST_CASE("duplicated environment") {
  Environment d = Environment::single_item(2).with_duplicates();
  CHECK(d.bidder_count() == 4);
  CHECK(d.is_feasible(from_indices({3})));
  CHECK_FALSE(d.is_feasible(from_indices({0, 2})));
  CHECK_FALSE(d.is_feasible(from_indices({0, 1})));
  Environment k2 = Environment::k_uniform(2, 2).with_duplicates();
  CHECK(k2.is_feasible(from_indices({0, 3})));
  CHECK_FALSE(k2.is_feasible(from_indices({1, 3})));
}

TEST_CASE("vcg examples") {
  MechanismOutcome a = vcg(Environment::single_item(2), {3, 2});
  CHECK(a.winners == std::vector<int>{0});
  CHECK(a.payments[0] == Approx(2.0));
  MechanismOutcome b = vcg(Environment::k_uniform(3, 2), {3, 2, 1});
  CHECK(b.winners == std::vector<int>{0, 1});
  CHECK(b.payments == std::vector<double>{1.0, 1.0});
  CHECK(b.welfare == 5.0);
  MechanismOutcome c = vcg(Environment::single_item(3), {0, 0, 0});
  CHECK(c.winners.empty());
  CHECK(c.revenue == 0.0);
  CHECK_FALSE(to_json(a).empty());
}

TEST_CASE("vcg with duplicates examples") {
  Environment one = Environment::single_item(1);
  MechanismOutcome a = vcg_with_duplicates(one, {3}, {2});
  CHECK(a.winners == std::vector<int>{0});
  CHECK(a.payments[0] == Approx(2.0));
  MechanismOutcome b = vcg_with_duplicates(one, {2}, {3});
  CHECK(b.winners == std::vector<int>{1});
  CHECK(b.payments[0] == Approx(2.0));
  MechanismOutcome c = vcg_with_duplicates(Environment::single_item(2), {3, 1}, {2, 4});
  CHECK(c.winners == std::vector<int>{3});
  CHECK(c.payments[0] == Approx(3.0));
}

TEST_CASE("vcg-L examples") {
  Environment env = Environment::single_item(2);
  MechanismOutcome a = vcg_lazy(env, {3, 2}, {1, 1});
  CHECK(a.winners == std::vector<int>{0});
  CHECK(a.payments[0] == Approx(2.0));
  CHECK(vcg_lazy(env, {0.5, 0.4}, {1, 1}).winners.empty());
  MechanismOutcome c = vcg_lazy(env, {3, 0.5}, {1, 1});
  CHECK(c.winners == std::vector<int>{0});
  CHECK(c.payments[0] == Approx(1.0));

  SampleParams p;
  p.xi = 0.5;
  EmpiricalModel unit = build_empirical({1.0}, p);
  REQUIRE(empirical_reserve(unit) == Approx(1.0));
  std::vector<const EmpiricalModel*> models = {&unit, &unit};
  CHECK(empirical_vcg_lazy(env, {3, 2}, models).payments[0] == Approx(2.0));
  CHECK(empirical_vcg_lazy(env, {0.5, 0.4}, models).winners.empty());
  CHECK(empirical_vcg_lazy(env, {3, 0.5}, models).payments[0] == Approx(1.0));
}

TEST_CASE("myerson examples") {
  std::vector<Distribution> two = {Distribution::falpha(0.5), Distribution::falpha(0.5)};
  MechanismOutcome a = myerson_single_item(two, {3, 2});
  CHECK(a.winners == std::vector<int>{0});
  CHECK(a.payments[0] == Approx(2.0).epsilon(1e-9));
  CHECK(myerson_single_item(two, {0.5, 0.5}).winners.empty());
  MechanismOutcome c = myerson_single_item({Distribution::falpha(0.5), Distribution::exponential(1.0)}, {1.5, 1.2});
  CHECK(c.winners == std::vector<int>{0});
  CHECK(c.payments[0] == Approx(1.4).epsilon(1e-9));
}

TEST_CASE("two-mechanism budget auction examples") {
  Environment env = Environment::single_item(2);
  std::vector<Distribution> d = {Distribution::falpha(0.5), Distribution::falpha(0.5)};
  MechanismOutcome a = two_mech_budget(env, d, {0.2, 5.0}, {1, 1}, 1);
  CHECK(a.winners == std::vector<int>{0});
  CHECK(a.revenue == 0.0);
  MechanismOutcome b = two_mech_budget(env, d, {3, 2}, {2.5, 10}, 2);
  CHECK(b.winners == std::vector<int>{0});
  CHECK(b.payments[0] == Approx(2.0).epsilon(1e-9));
  CHECK(b.welfare == 3.0);
  CHECK(two_mech_budget(env, d, {3, 2}, {0.5, 0.4}, 2).winners.empty());
  CHECK_THROWS(two_mech_budget(env, d, {3, 2}, {1, 1}, 3));
}

TEST_CASE("lottery offers and bidder choices") {
  LotteryOffer a = lottery_offer(1, 2);
  CHECK(a.mode == LotteryOffer::Mode::Posted);
  CHECK(a.p == 1.0);
  LotteryOffer b = lottery_offer(0.1, 2);
  CHECK(b.mode == LotteryOffer::Mode::Menu);
  CHECK(b.a_min == Approx(0.1));
  CHECK(b.a_max == Approx(2.0 / 3.0));
  LotteryOffer c = lottery_offer(0, 5);
  CHECK(c.mode == LotteryOffer::Mode::Menu);
  CHECK(c.a_min == 0.0);

  std::mt19937_64 rng(1);
  LotteryPurchase menu = lottery_bidder_choice(b, 3, kInf, rng);
  CHECK(menu.a == Approx(2.0 / 3.0));
  CHECK(menu.win_probability == Approx(1.0));
  CHECK(menu.bought);
  CHECK(menu.price == Approx(2.0 / 3.0));
  CHECK_FALSE(lottery_bidder_choice(a, 0.5, kInf, rng).bought);
  LotteryPurchase clamped = lottery_bidder_choice(b, 3, 0.1, rng);
  CHECK(clamped.a == Approx(0.1));
  CHECK_FALSE(lottery_bidder_choice(b, 3, 0.09, rng).participated);

  // Interior optimum of (1/3 + a)(v - a p'/2) agrees with a grid search.
  LotteryOffer wide = lottery_offer(0.0, 4.0);
  for (double v : {0.5, 1.0, 1.7, 2.2}) {
    LotteryPurchase got = lottery_bidder_choice(wide, v, kInf, rng);
    double best_a = 0.0, best_u = -kInf;
    for (int k = 0; k <= 200000; ++k) {
      double x = (2.0 / 3.0) * k / 200000.0;
      double u = (1.0 / 3.0 + x) * (v - 2.0 * x);
      if (u > best_u) best_u = u, best_a = x;
    }
    CHECK(got.a == Approx(best_a).epsilon(1e-5));
  }
}

TEST_CASE("B set and thresholds") {
  Environment k1 = Environment::single_item(2);
  BSetThresholds a = compute_B_set_and_thresholds(k1, {5, 5}, {2, 9});
  CHECK(a.B == from_indices({1}));
  CHECK(a.T[1] == Approx(2.0).epsilon(1e-8));
  CHECK(a.T[0] == Approx(5.0).epsilon(1e-8));
  BSetThresholds all = compute_B_set_and_thresholds(Environment::k_uniform(3, 3), {1, 2, 3}, {5, 5, 5});
  CHECK(all.B == 0b111);
  for (double t : all.T) CHECK(t == Approx(0.0).epsilon(1e-8));
  BSetThresholds c = compute_B_set_and_thresholds(k1, {5, 5}, {9, 2});
  CHECK(c.B == from_indices({0}));
  CHECK(c.T[0] == Approx(2.0).epsilon(1e-8));
  CHECK(c.T[1] == Approx(5.0).epsilon(1e-8));
}

TEST_CASE("lottery mechanism examples") {
  std::mt19937_64 rng(3);
  MechanismOutcome single = lottery_mechanism(Environment::single_item(1), {3}, {kInf}, {2}, rng);
  CHECK(single.winners == std::vector<int>{0});
  CHECK(single.revenue == Approx(2.0 / 3.0));

  // T = (3, 1) with reserves 0.3: both offers are posted prices.
  MechanismOutcome posted = lottery_mechanism(Environment::single_item(2), {1, 3}, {9, 9}, {0.3, 0.3}, rng);
  CHECK(posted.winners == std::vector<int>{1});
  CHECK(posted.revenue == Approx(1.0).epsilon(1e-8));

  MechanismOutcome none = lottery_mechanism(Environment::single_item(2), {0, 0}, {9, 9}, {1, 1}, rng);
  CHECK(none.revenue == 0.0);
}

TEST_CASE("posted-price mechanism traces") {
  MultiItemInstance inst = MultiItemInstance::make({{Distribution::discrete({1, 2, 3}, {0.2, 0.3, 0.5})}}, {10}, {1});
  PricingPlan plan;
  plan.bidders = plan.items = 1;
  plan.lotteries = {PriceLottery{2.0, 3.0, 1.0}};
  plan.p_offer = 1.0;
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    MechanismOutcome out = posted_price_mechanism(inst, plan, {3}, rng);
    CHECK(out.revenue == 2.0);
    REQUIRE(out.allocation.size() == 1);
    CHECK(out.allocation[0] == std::pair<int, int>{0, 0});
  }
  plan.p_offer = 0.0;
  for (int t = 0; t < 50; ++t) CHECK(posted_price_mechanism(inst, plan, {3}, rng).revenue == 0.0);

  // Budget and item limit stop a bidder that would otherwise buy both items.
  Distribution d = Distribution::discrete({1, 2, 3}, {0.2, 0.3, 0.5});
  MultiItemInstance two = MultiItemInstance::make({{d, d}, {d, d}}, {3, 3}, {1, 2});
  PricingPlan p2;
  p2.bidders = p2.items = 2;
  p2.p_offer = 1.0;
  p2.lotteries.assign(4, PriceLottery{2.0, 3.0, 1.0});
  MechanismOutcome out = posted_price_mechanism(two, p2, {3, 3, 3, 3}, rng);
  CHECK(out.allocation == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
  CHECK(out.revenue == 4.0);
}

TEST_CASE("feasibility, individual rationality and budgets") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 1 + t % 4;
    Environment env = (t % 2) ? random_explicit_env(n, rng) : Environment::k_uniform(n, 1 + t % 2);
    std::vector<double> v(n), r(n), b(n);
    std::vector<Distribution> dists;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = u(rng);
      b[i] = u(rng) + 0.1;
      dists.push_back(Distribution::falpha(0.3 + 0.1 * i, 1.0 + i));
      r[i] = dists.back().reserve_price();
    }
    for (const MechanismOutcome& out : {vcg(env, v), vcg_lazy(env, v, r), myerson(env, dists, v)}) {
      CHECK(env.is_feasible(winner_set(out)));
      for (std::size_t k = 0; k < out.winners.size(); ++k) {
        CHECK(out.payments[k] >= -1e-12);
        CHECK(out.payments[k] <= v[out.winners[k]] + 1e-9);
      }
    }
    for (int coin : {1, 2}) {
      MechanismOutcome out = two_mech_budget(env, dists, v, b, coin);
      CHECK(env.is_feasible(winner_set(out)));
      for (std::size_t k = 0; k < out.winners.size(); ++k) CHECK(out.payments[k] <= b[out.winners[k]] + 1e-9);
    }
    if (env.kind() == Environment::Kind::KUniformMatroid) {
      MechanismOutcome lot = lottery_mechanism(env, v, b, r, rng);
      for (std::size_t k = 0; k < lot.winners.size(); ++k) {
        CHECK(lot.payments[k] <= b[lot.winners[k]] + 1e-12);
        CHECK(lot.payments[k] <= v[lot.winners[k]] + 1e-12);
      }
    }
  }
}

TEST_CASE("truthfulness by enumeration on two-bidder discrete instances") {
  std::vector<Distribution> family = {
      Distribution::discrete({1}, {1.0}),
      Distribution::discrete({1, 2}, {0.5, 0.5}),
      Distribution::discrete({1, 3}, {0.7, 0.3}),
      Distribution::discrete({1, 2, 3}, {0.2, 0.3, 0.5}),
      Distribution::discrete({1, 2, 3}, {0.6, 0.3, 0.1}),
      Distribution::discrete({2, 3, 4}, {0.3, 0.3, 0.4}),
  };
  Environment env = Environment::single_item(2);
  using Mech = std::function<MechanismOutcome(const std::vector<Distribution>&, const std::vector<double>&)>;
  std::vector<std::pair<const char*, Mech>> mechs = {
      {"vcg", [&](const auto&, const auto& b) { return vcg(env, b); }},
      {"vcgl", [&](const auto& d, const auto& b) { return vcg_lazy(env, b, {d[0].reserve_price(), d[1].reserve_price()}); }},
      {"myerson", [&](const auto& d, const auto& b) { return myerson(env, d, b); }},
  };
  for (const auto& [name, mech] : mechs) {
    for (const Distribution& d0 : family) {
      for (const Distribution& d1 : family) {
        std::vector<Distribution> d = {d0, d1};
        for (int i = 0; i < 2; ++i) {
          const Distribution& own = d[i];
          const Distribution& other = d[1 - i];
          for (double truth : own.support()) {
            auto utility = [&](double report) {
              double eu = 0.0;
              for (std::size_t k = 0; k < other.support().size(); ++k) {
                std::vector<double> bids(2);
                bids[i] = report;
                bids[1 - i] = other.support()[k];
                MechanismOutcome out = mech(d, bids);
                eu += other.pmf()[k] * ((wins(out, i) ? truth : 0.0) - payment_of(out, i));
              }
              return eu;
            };
            double honest = utility(truth);
            for (double lie : own.support()) {
              CAPTURE(name);
              CHECK(utility(lie) <= honest + 1e-12);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("vcg winner monotonicity") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> w(0, 3);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 2 + t % 3;
    Environment env = (t % 2) ? random_explicit_env(n, rng) : Environment::k_uniform(n, 1 + t % 2);
    std::vector<double> v(n);
    for (double& x : v) x = w(rng);
    MechanismOutcome base = vcg(env, v);
    for (int i : base.winners) {
      std::vector<double> up = v;
      up[i] += 1.0 + w(rng);
      CHECK(wins(vcg(env, up), i));
    }
  }
}

TEST_CASE("duplicate symmetry") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + t % 3;
    Environment env = Environment::k_uniform(n, 1 + t % 2);
    std::vector<double> v(n), dup(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = u(rng), dup[i] = u(rng);
    double base = vcg_with_duplicates(env, v, dup).revenue;
    std::size_t i = t % n;
    std::swap(v[i], dup[i]);
    CHECK(vcg_with_duplicates(env, v, dup).revenue == Approx(base).epsilon(1e-12));
  }
}
