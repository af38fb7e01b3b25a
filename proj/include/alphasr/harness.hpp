#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "alphasr/distribution.hpp"
#include "alphasr/environment.hpp"
#include "alphasr/lp.hpp"

namespace alphasr {

// ---------------------------------------------------------------------------
// Monte Carlo engine.
//
// Trial t of a run with master seed s draws from std::mt19937_64 seeded with
// splitmix64(s ^ splitmix64(t)). Trials are grouped into a fixed number of
// contiguous chunks whose partial sums are merged in chunk order, so the
// result does not depend on the number of worker threads.

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index);
std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t index);

struct MetricStats {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t n = 0;
};

// Fills `out` (pre-sized to the metric count) with one trial's metrics.
using TrialFn = std::function<void(std::mt19937_64& rng, std::vector<double>& out)>;

std::vector<MetricStats> monte_carlo(const TrialFn& trial, std::size_t metrics, std::uint64_t trials,
                                     std::uint64_t master_seed, unsigned threads = 0);

MetricStats summarize(const std::vector<double>& xs);

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.96);

// ---------------------------------------------------------------------------
// Reports.

struct MetricRow {
  std::string metric;
  double value = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double target = 0.0;
  bool has_target = false;
  bool verdict = true;
};

struct Report {
  std::string experiment_id;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::vector<MetricRow> rows;
  std::vector<std::string> notes;
  double runtime_seconds = 0.0;

  bool passed() const;
  void add(MetricRow row) { rows.push_back(std::move(row)); }
  // Exact (non-random) check: value against target with a verdict.
  void add_exact(const std::string& metric, double value, double target, bool verdict);
  void add_stats(const std::string& metric, const MetricStats& s, double target, bool has_target, bool verdict);
};

std::string csv_header();
std::string to_csv(const Report& r, bool header = true);

// ---------------------------------------------------------------------------
// Brute-force and quadrature oracles.

// E[max(0, max_i phi_i(v_i))] by enumerating all value profiles.
double oracle_optimal_revenue_single_item(const std::vector<Distribution>& dists);

// Exhaustive search over all bidder subsets with positive member weights;
// ties go to the lexicographically smallest index set.
BidderSet oracle_feasible_argmax(const Environment& env, const std::vector<double>& weights);

// Exact expectation of f(values) over independent discrete bidders.
double oracle_exact_expectation(const std::vector<Distribution>& dists,
                                const std::function<double(const std::vector<double>&)>& f);

// Optimal single-item revenue with n i.i.d. bidders whose revenue curve is
// the concave hull of the given (quantile, revenue) points and the origin.
double optimal_revenue_from_curve(std::vector<std::pair<double, double>> points, int n);

// Optimal single-item revenue with n i.i.d. regular continuous bidders, by
// quadrature in quantile space.
double optimal_revenue_iid_continuous(const Distribution& d, int n);

// E[sum of the k largest of independent continuous draws], by quadrature.
double expected_top_k_sum(const std::vector<Distribution>& dists, int k);

// Maximum of c.x over {A x <= b, 0 <= x <= 1} by enumerating basic points.
double oracle_lp_vertex_enumeration(const BoxLp& lp, std::vector<double>* argmax = nullptr);

}  // namespace alphasr
