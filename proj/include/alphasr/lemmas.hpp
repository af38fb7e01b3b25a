#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "alphasr/distribution.hpp"
#include "alphasr/empirical.hpp"
#include "alphasr/harness.hpp"

namespace alphasr {

// Smallest slack (right-hand side minus left-hand side) of an inequality over
// all points where it was evaluated. A check holds when margin >= -tol.
struct LemmaMargin {
  std::string name;
  double margin = std::numeric_limits<double>::infinity();
  double at = 0.0;  // evaluation point of the worst slack
  std::size_t points = 0;

  void update(double slack, double x);
};

// Distribution-level inequalities for an alpha-SR prior.
LemmaMargin lemma_reservebound(const Distribution& d, double alpha);
LemmaMargin lemma_welfare(const Distribution& d, double alpha, int grid = 50);
LemmaMargin lemma_square(const Distribution& d, double alpha);
LemmaMargin lemma_minmax(const Distribution& d, double alpha);
// Relative slack of f(q) >= f(q0) (q/q0)^(2-alpha) on a grid of quantile
// pairs q <= q0. Continuous kinds only.
LemmaMargin lemma_densitybound(const Distribution& d, double alpha, int grid = 30);
LemmaMargin lemma_reservevirtualbound(const Distribution& d, double alpha);
// Both hazard bounds are checked in reciprocal form: 1/h(v1) + (1-alpha)(v2-v1) >= 1/h(v2).
LemmaMargin lemma_hbound(const Distribution& d, double alpha);
LemmaMargin lemma_hbound2(const Distribution& d, double alpha);
LemmaMargin lemma_alphabound(int grid = 99);
LemmaMargin lemma_pot_large(const Distribution& d, double alpha);
LemmaMargin lemma_reserveb(const Distribution& d, double alpha, int grid = 200);
// Relative error of reserve(scaled by s) against s * reserve.
LemmaMargin lemma_scaling(const Distribution& d);

// Probability Pr[phi(v) > alpha v / 2] (exact for discrete kinds, by
// threshold bisection for continuous kinds).
double potential_mass(const Distribution& d, double alpha);

// Every distribution-level check that applies to d. The density and
// revenue-curve shape bounds need phi(r) = 0 and are skipped for discrete kinds.
std::vector<LemmaMargin> distribution_lemma_suite(const Distribution& d, double alpha);

// Monte Carlo check of E[max | max >= t] <= ((2+alpha)/alpha) E[phi(max) | max >= t]
// over i.i.d. pairs. The maximum is drawn directly from its conditional law.
struct ConditionedResult {
  double t = 0.0;
  MetricStats max_value;
  MetricStats max_virtual;
  MetricStats slack;  // ((2+alpha)/alpha) phi(max) - max per pair
};

ConditionedResult lemma_conditioned(const Distribution& d, double alpha, double t, std::uint64_t pairs,
                                    std::uint64_t seed);

// Empirical-model inequalities, meaningful when the coverage event holds.
LemmaMargin lemma_empreserve(const EmpiricalModel& em, const Distribution& d);
// Upper and lower bounds of the empirical revenue curve on retained
// quantiles, evaluated on at most max_points of them.
std::vector<LemmaMargin> lemma_empquant(const EmpiricalModel& em, const Distribution& d,
                                        std::size_t max_points = 1000);
LemmaMargin lemma_reservequant(const EmpiricalModel& em, const Distribution& d, double alpha);

}  // namespace alphasr
