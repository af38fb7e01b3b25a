#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "alphasr/distribution.hpp"
#include "alphasr/empirical.hpp"

namespace alphasr {

// ---------------------------------------------------------------------------
// Generic box-constrained LP: maximize c.x subject to A x <= b, 0 <= x <= 1.
// Requires b >= 0, which makes x = 0 feasible.

struct BoxLp {
  std::vector<double> c;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

// Bounded-variable primal simplex with Bland's rule.
LpSolution solve_box_lp(const BoxLp& lp, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Multi-item budgeted instances.

struct MultiItemInstance {
  std::size_t bidders = 0;
  std::size_t items = 0;
  std::vector<Distribution> dists;  // row-major: dists[i * items + j]
  std::vector<double> budgets;
  std::vector<int> limits;

  const Distribution& dist(std::size_t i, std::size_t j) const { return dists[i * items + j]; }

  // Truncates each F_ij at B_i when truncate is set.
  static MultiItemInstance make(const std::vector<std::vector<Distribution>>& dists,
                                std::vector<double> budgets, std::vector<int> limits,
                                bool truncate = true);
};

enum class LpTag { LP2, LP3 };

struct LpVariable {
  std::size_t bidder;
  std::size_t item;
  double value;          // price level r (support value, or hull vertex value for LP3)
  double mass;           // f(r) or fbar(r)
  double virtual_value;  // phi(r) or phibar(r)
};

struct LpProblem {
  LpTag tag = LpTag::LP2;
  std::size_t bidders = 0;
  std::size_t items = 0;
  std::vector<LpVariable> vars;  // grouped by pair, value-descending within a pair
  std::vector<std::size_t> pair_offset;  // vars of pair k are [pair_offset[k], pair_offset[k+1])
  BoxLp lp;
  std::vector<std::string> row_names;

  // Row layout: bidder-count rows, then bidder-budget rows, then item-supply rows.
  std::size_t count_row(std::size_t i) const { return i; }
  std::size_t budget_row(std::size_t i) const { return bidders + i; }
  std::size_t supply_row(std::size_t j) const { return 2 * bidders + j; }
};

LpProblem build_lp2(const MultiItemInstance& inst);
LpProblem build_lp3(const MultiItemInstance& inst, const std::vector<EmpiricalModel>& models,
                    const SampleParams& p);
LpSolution solve(const LpProblem& lp, double tol = 1e-9);

// Plain-text tableau dump for debugging.
std::string to_string(const LpProblem& lp);

// ---------------------------------------------------------------------------
// Quantile aggregation.

struct PairAggregate {
  double raw_x_star = 0.0;      // sum_r f x
  double contribution = 0.0;    // sum_r f phi x
  double x_star = 0.0;          // aggregate whose threshold fill reproduces the contribution
  std::size_t threshold_index = 0;  // index (within the pair, value-descending) of the fractional level
  double threshold_weight = 0.0;
  std::vector<double> threshold_x;  // threshold-structured representative
};

struct QuantileSolution {
  std::vector<PairAggregate> pairs;  // row-major
  double objective = 0.0;
};

QuantileSolution aggregate(const LpSolution& sol, const LpProblem& lp);

// Revenue curve of a pair's variable list evaluated at aggregate quantile x:
// threshold fill from the highest level down.
double pair_revenue_curve(const LpProblem& lp, std::size_t pair, double x);

// ---------------------------------------------------------------------------
// Price lotteries.

// Concave revenue curve vertices (excluding the origin) as (sale quantile,
// price) pairs with ascending quantile and descending price.
struct PriceVertex {
  double q;
  double price;
};

std::vector<PriceVertex> price_vertices(const Distribution& d);
std::vector<PriceVertex> price_vertices(const EmpiricalModel& em);

// Randomized price: `low` with probability w, `high` otherwise. In the
// integer case high = low + 1 and the expected price is w*low + (1-w)*(low+1).
struct PriceLottery {
  double low = 0.0;
  double high = 1.0;
  double w = 1.0;
  double expected_price() const { return w * low + (1.0 - w) * high; }
};

// Value split v = w*r + (1-w)*(r+1) with r = floor(v); integral v gives (v, 1).
PriceLottery decompose_value(double v);
// Lottery over adjacent curve vertices whose sale quantile is exactly q.
PriceLottery decompose_quantile(const std::vector<PriceVertex>& vertices, double q);
PriceLottery decompose_quantile(const Distribution& d, double q);
PriceLottery decompose_quantile(const EmpiricalModel& em, double q);

// True sale probability of a price lottery.
double lottery_sale_probability(const Distribution& d, const PriceLottery& lot);

struct PricingPlan {
  std::size_t bidders = 0;
  std::size_t items = 0;
  std::vector<double> x_star;  // LP aggregate per pair
  std::vector<double> z_star;  // clamped quantile per pair
  std::vector<PriceLottery> lotteries;
  double p_offer = 0.25;
  double c = 0.0;
  double c_prime = 0.0;
  double xi_bar = 0.0;
  double gamma = 0.0;
  // Witness point for LP2 (one entry per LP2 variable) and its per-pair mass.
  std::vector<double> y_bar;
  std::vector<double> y_star;
};

PricingPlan make_pricing_plan(const LpSolution& lp3_solution, const LpProblem& lp3,
                              const MultiItemInstance& inst, const std::vector<EmpiricalModel>& models,
                              const SampleParams& p);

// Full-information plan: LP2 aggregates realized with true-curve lotteries and
// offer probability 1/4.
PricingPlan make_full_info_plan(const LpSolution& lp2_solution, const LpProblem& lp2,
                                const MultiItemInstance& inst);

struct SlackReport {
  std::vector<double> count_slack;
  std::vector<double> budget_slack;
  std::vector<double> supply_slack;
  double box_slack = 0.0;
  double min_slack = 0.0;
  bool feasible = false;
};

SlackReport check_lp2_feasible(const std::vector<double>& point, const LpProblem& lp2, double tol = 1e-9);

}  // namespace alphasr
