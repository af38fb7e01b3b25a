#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "alphasr/distribution.hpp"
#include "alphasr/empirical.hpp"
#include "alphasr/environment.hpp"
#include "alphasr/lp.hpp"

namespace alphasr {

struct MechanismOutcome {
  std::vector<int> winners;      // ascending bidder indices (0-based)
  std::vector<double> payments;  // total payment of each winner, aligned with winners
  std::vector<std::pair<int, int>> allocation;  // (bidder, item) pairs for multi-item mechanisms
  std::vector<double> allocation_prices;        // aligned with allocation
  double revenue = 0.0;
  double welfare = 0.0;
};

std::string to_json(const MechanismOutcome& out);

MechanismOutcome vcg(const Environment& env, const std::vector<double>& values);

// Copies are indexed n..2n-1 in the outcome (copy of bidder i is n+i).
MechanismOutcome vcg_with_duplicates(const Environment& env, const std::vector<double>& values,
                                     const std::vector<double>& duplicate_values);

MechanismOutcome vcg_lazy(const Environment& env, const std::vector<double>& values,
                          const std::vector<double>& reserves);

// models[i] is the empirical model of bidder i's class.
MechanismOutcome empirical_vcg_lazy(const Environment& env, const std::vector<double>& values,
                                    const std::vector<const EmpiricalModel*>& models);

// Virtual-surplus maximizing mechanism with threshold payments. Bidders with
// negative virtual value never win; ties prefer more winners, then the
// lexicographically smallest set.
MechanismOutcome myerson(const Environment& env, const std::vector<Distribution>& dists,
                         const std::vector<double>& values);
MechanismOutcome myerson_single_item(const std::vector<Distribution>& dists, const std::vector<double>& values);

// coin = 1: allocate argmax of summed reserve prices for free.
// coin = 2: Myerson on values capped at budgets (welfare counts true values).
MechanismOutcome two_mech_budget(const Environment& env, const std::vector<Distribution>& dists,
                                 const std::vector<double>& values, const std::vector<double>& budgets, int coin);

struct LotteryOffer {
  enum class Mode { Posted, Menu };
  Mode mode = Mode::Posted;
  double p = 0.0;
  double pprime = 0.0;
  double a_min = 0.0;
  double a_max = 2.0 / 3.0;
};

LotteryOffer lottery_offer(double p, double pprime);

struct LotteryPurchase {
  bool participated = false;  // accepted the offer (posted purchase or menu entry)
  bool bought = false;        // received the item
  double price = 0.0;         // amount paid
  double a = 0.0;
  double win_probability = 0.0;
};

LotteryPurchase lottery_bidder_choice(const LotteryOffer& offer, double v, double B, std::mt19937_64& rng);

struct BSetThresholds {
  BidderSet B = 0;
  std::vector<double> T;
};

BSetThresholds compute_B_set_and_thresholds(const Environment& env, const std::vector<double>& values,
                                            const std::vector<double>& budgets);

MechanismOutcome lottery_mechanism(const Environment& env, const std::vector<double>& values,
                                   const std::vector<double>& budgets, const std::vector<double>& reserves,
                                   std::mt19937_64& rng);

// values are row-major v[i * items + j].
MechanismOutcome posted_price_mechanism(const MultiItemInstance& inst, const PricingPlan& plan,
                                        const std::vector<double>& values, std::mt19937_64& rng);

}  // namespace alphasr
