#include "alphasr/mechanisms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "alphasr/numeric.hpp"

namespace alphasr {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

MechanismOutcome from_payments(BidderSet winners, const std::vector<double>& values,
                               const std::vector<double>& payment_of) {
  MechanismOutcome out;
  for (int i : to_indices(winners)) {
    out.winners.push_back(i);
    out.payments.push_back(payment_of[static_cast<std::size_t>(i)]);
    out.revenue += payment_of[static_cast<std::size_t>(i)];
    out.welfare += values[static_cast<std::size_t>(i)];
  }
  return out;
}

double phi_or_neg_inf(const Distribution& d, double v) {
  try {
    return d.virtual_valuation(v);
  } catch (const UndefinedVirtualValue&) {
    return kNegInf;
  }
}

// Feasible set of bidders with nonnegative weight maximizing total weight;
// ties prefer larger sets, then the lexicographically smallest.
BidderSet max_nonnegative_set(const Environment& env, const std::vector<double>& w) {
  const std::size_t n = env.bidder_count();
  if (env.kind() == Environment::Kind::KUniformMatroid) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    BidderSet s = 0;
    std::size_t taken = 0;
    for (std::size_t i : order) {
      if (taken == env.k() || !(w[i] >= 0.0)) break;
      s |= BidderSet{1} << i;
      ++taken;
    }
    return s;
  }
  BidderSet best = 0;
  double best_w = 0.0;
  for (BidderSet s : env.sets()) {
    bool ok = true;
    double total = 0.0;
    for (int i : to_indices(s)) {
      if (!(w[static_cast<std::size_t>(i)] >= 0.0)) ok = false;
      total += w[static_cast<std::size_t>(i)];
    }
    if (!ok) continue;
    int size_s = std::popcount(s);
    int size_b = std::popcount(best);
    if (total > best_w || (total == best_w && (size_s > size_b || (size_s == size_b && lex_less(s, best))))) {
      best = s;
      best_w = total;
    }
  }
  return best;
}

}  // namespace

std::string to_json(const MechanismOutcome& out) {
  nlohmann::json j;
  j["winners"] = out.winners;
  j["payments"] = out.payments;
  j["revenue"] = out.revenue;
  j["welfare"] = out.welfare;
  if (!out.allocation.empty()) {
    nlohmann::json alloc = nlohmann::json::array();
    for (std::size_t k = 0; k < out.allocation.size(); ++k)
      alloc.push_back({{"bidder", out.allocation[k].first},
                       {"item", out.allocation[k].second},
                       {"price", out.allocation_prices[k]}});
    j["allocation"] = alloc;
  }
  return j.dump();
}

MechanismOutcome vcg(const Environment& env, const std::vector<double>& values) {
  if (values.size() != env.bidder_count()) throw std::invalid_argument("vcg: value count mismatch");
  BidderSet win = env.max_weight_set(values);
  double opt = env.set_weight(win, values);
  std::vector<double> pay(values.size(), 0.0);
  for (int i : to_indices(win)) {
    BidderSet without = env.max_weight_set(values, BidderSet{1} << i);
    double opt_minus = env.set_weight(without, values);
    pay[static_cast<std::size_t>(i)] = std::max(0.0, opt_minus - (opt - values[static_cast<std::size_t>(i)]));
  }
  return from_payments(win, values, pay);
}

MechanismOutcome vcg_with_duplicates(const Environment& env, const std::vector<double>& values,
                                     const std::vector<double>& duplicate_values) {
  if (duplicate_values.size() != values.size()) throw std::invalid_argument("vcg_with_duplicates: size mismatch");
  std::vector<double> all = values;
  all.insert(all.end(), duplicate_values.begin(), duplicate_values.end());
  return vcg(env.with_duplicates(), all);
}

MechanismOutcome vcg_lazy(const Environment& env, const std::vector<double>& values,
                          const std::vector<double>& reserves) {
  if (reserves.size() != values.size()) throw std::invalid_argument("vcg_lazy: reserve count mismatch");
  MechanismOutcome base = vcg(env, values);
  MechanismOutcome out;
  for (std::size_t k = 0; k < base.winners.size(); ++k) {
    auto i = static_cast<std::size_t>(base.winners[k]);
    if (values[i] < reserves[i]) continue;
    double pay = std::max(reserves[i], base.payments[k]);
    out.winners.push_back(base.winners[k]);
    out.payments.push_back(pay);
    out.revenue += pay;
    out.welfare += values[i];
  }
  return out;
}

MechanismOutcome empirical_vcg_lazy(const Environment& env, const std::vector<double>& values,
                                    const std::vector<const EmpiricalModel*>& models) {
  if (models.size() != values.size()) throw std::invalid_argument("empirical_vcg_lazy: model count mismatch");
  std::vector<double> reserves;
  for (const EmpiricalModel* em : models) reserves.push_back(empirical_reserve(*em));
  return vcg_lazy(env, values, reserves);
}

MechanismOutcome myerson(const Environment& env, const std::vector<Distribution>& dists,
                         const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (dists.size() != n || env.bidder_count() != n) throw std::invalid_argument("myerson: size mismatch");
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = phi_or_neg_inf(dists[i], values[i]);
  BidderSet win = max_nonnegative_set(env, phi);
  std::vector<double> pay(n, 0.0);
  for (int wi : to_indices(win)) {
    auto i = static_cast<std::size_t>(wi);
    std::vector<double> trial = phi;
    auto wins_at = [&](double bid) {
      trial[i] = phi_or_neg_inf(dists[i], bid);
      return (max_nonnegative_set(env, trial) >> i) & 1u;
    };
    if (dists[i].is_continuous()) {
      pay[i] = numeric::bisect_predicate([&](double b) { return wins_at(b) != 0; }, 0.0, values[i], 1e-11);
    } else {
      pay[i] = values[i];
      for (double s : dists[i].support()) {
        if (s > values[i]) break;
        if (wins_at(s)) {
          pay[i] = s;
          break;
        }
      }
    }
  }
  return from_payments(win, values, pay);
}

MechanismOutcome myerson_single_item(const std::vector<Distribution>& dists, const std::vector<double>& values) {
  return myerson(Environment::single_item(values.size()), dists, values);
}

MechanismOutcome two_mech_budget(const Environment& env, const std::vector<Distribution>& dists,
                                 const std::vector<double>& values, const std::vector<double>& budgets, int coin) {
  const std::size_t n = values.size();
  if (budgets.size() != n || dists.size() != n) throw std::invalid_argument("two_mech_budget: size mismatch");
  if (coin == 1) {
    std::vector<double> reserves(n);
    for (std::size_t i = 0; i < n; ++i) reserves[i] = dists[i].reserve_price();
    BidderSet win = env.max_weight_set(reserves);
    return from_payments(win, values, std::vector<double>(n, 0.0));
  }
  if (coin != 2) throw std::invalid_argument("two_mech_budget: coin must be 1 or 2");
  std::vector<double> capped(n);
  for (std::size_t i = 0; i < n; ++i) capped[i] = std::min(values[i], budgets[i]);
  MechanismOutcome out = myerson(env, dists, capped);
  out.welfare = 0.0;
  for (int i : out.winners) out.welfare += values[static_cast<std::size_t>(i)];
  return out;
}

LotteryOffer lottery_offer(double p, double pprime) {
  if (p < 0.0 || pprime < 0.0) throw std::invalid_argument("lottery_offer: prices must be nonnegative");
  LotteryOffer o;
  o.p = p;
  o.pprime = pprime;
  if (p >= pprime / 3.0) {
    o.mode = LotteryOffer::Mode::Posted;
    o.a_min = o.a_max = 0.0;
  } else {
    o.mode = LotteryOffer::Mode::Menu;
    o.a_min = 2.0 * p / pprime;
    o.a_max = 2.0 / 3.0;
  }
  return o;
}

LotteryPurchase lottery_bidder_choice(const LotteryOffer& offer, double v, double B, std::mt19937_64& rng) {
  LotteryPurchase res;
  if (offer.mode == LotteryOffer::Mode::Posted) {
    if (v >= offer.p && B >= offer.p) {
      res.participated = res.bought = true;
      res.price = offer.p;
      res.win_probability = 1.0;
    }
    return res;
  }
  double hi = offer.a_max;
  if (offer.pprime > 0.0) hi = std::min(hi, 2.0 * B / offer.pprime);
  if (hi < offer.a_min) return res;
  double a = offer.pprime > 0.0 ? v / offer.pprime - 1.0 / 6.0 : hi;
  a = std::clamp(a, offer.a_min, hi);
  double price = a * offer.pprime / 2.0;
  double utility = (1.0 / 3.0 + a) * (v - price);
  if (utility < 0.0) return res;
  res.participated = true;
  res.a = a;
  res.win_probability = 1.0 / 3.0 + a;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < res.win_probability) {
    res.bought = true;
    res.price = price;
  }
  return res;
}

BSetThresholds compute_B_set_and_thresholds(const Environment& env, const std::vector<double>& values,
                                            const std::vector<double>& budgets) {
  const std::size_t n = values.size();
  if (budgets.size() != n) throw std::invalid_argument("compute_B_set_and_thresholds: size mismatch");
  std::vector<double> w(n);
  double max_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::min(values[i], budgets[i]);
    max_w = std::max(max_w, w[i]);
  }
  BSetThresholds out;
  out.B = env.max_weight_set(w);
  out.T.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> trial = w;
    auto included = [&](double vprime) {
      trial[i] = vprime;
      return env.in_some_optimum(trial, i);
    };
    out.T[i] = numeric::bisect_predicate(included, 0.0, max_w + 1.0, 1e-9);
  }
  return out;
}

MechanismOutcome lottery_mechanism(const Environment& env, const std::vector<double>& values,
                                   const std::vector<double>& budgets, const std::vector<double>& reserves,
                                   std::mt19937_64& rng) {
  const std::size_t n = values.size();
  if (reserves.size() != n) throw std::invalid_argument("lottery_mechanism: reserve count mismatch");
  BSetThresholds bt = compute_B_set_and_thresholds(env, values, budgets);
  MechanismOutcome out;
  for (std::size_t i = 0; i < n; ++i) {
    LotteryPurchase buy = lottery_bidder_choice(lottery_offer(bt.T[i], reserves[i]), values[i], budgets[i], rng);
    if (!buy.bought) continue;
    out.winners.push_back(static_cast<int>(i));
    out.payments.push_back(buy.price);
    out.revenue += buy.price;
    out.welfare += values[i];
  }
  return out;
}

MechanismOutcome posted_price_mechanism(const MultiItemInstance& inst, const PricingPlan& plan,
                                        const std::vector<double>& values, std::mt19937_64& rng) {
  const std::size_t pairs = inst.bidders * inst.items;
  if (values.size() != pairs || plan.lotteries.size() != pairs)
    throw std::invalid_argument("posted_price_mechanism: size mismatch");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> price(pairs);
  std::vector<bool> offered(pairs);
  for (std::size_t k = 0; k < pairs; ++k) {
    const PriceLottery& lot = plan.lotteries[k];
    price[k] = u(rng) < lot.w ? lot.low : lot.high;
    offered[k] = u(rng) < plan.p_offer;
  }
  std::vector<bool> sold(inst.items, false);
  MechanismOutcome out;
  for (std::size_t i = 0; i < inst.bidders; ++i) {
    double budget = inst.budgets[i];
    int count = 0;
    double paid = 0.0;
    for (std::size_t j = 0; j < inst.items; ++j) {
      std::size_t k = i * inst.items + j;
      if (!offered[k] || sold[j] || count >= inst.limits[i]) continue;
      if (values[k] < price[k] || budget < price[k]) continue;
      sold[j] = true;
      ++count;
      budget -= price[k];
      paid += price[k];
      out.allocation.emplace_back(static_cast<int>(i), static_cast<int>(j));
      out.allocation_prices.push_back(price[k]);
      out.welfare += values[k];
    }
    if (count > 0) {
      out.winners.push_back(static_cast<int>(i));
      out.payments.push_back(paid);
      out.revenue += paid;
    }
  }
  return out;
}

}  // namespace alphasr
