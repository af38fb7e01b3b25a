#include <cmath>
#include <limits>
#include <stdexcept>

#include "alphasr/lp.hpp"
#include "alphasr/numeric.hpp"

namespace alphasr {

LpSolution solve_box_lp(const BoxLp& lp, double tol) {
  const std::size_t n = lp.c.size();
  const std::size_t m = lp.b.size();
  if (lp.A.size() != m) throw std::invalid_argument("solve_box_lp: row count mismatch");
  for (std::size_t i = 0; i < m; ++i) {
    if (lp.A[i].size() != n) throw std::invalid_argument("solve_box_lp: column count mismatch");
    if (lp.b[i] < 0.0) throw std::invalid_argument("solve_box_lp: right-hand sides must be nonnegative");
  }
  const std::size_t total = n + m;
  const double inf = std::numeric_limits<double>::infinity();
  constexpr double kPivotTol = 1e-12;

  std::vector<std::vector<double>> T(m, std::vector<double>(total, 0.0));
  std::vector<double> val(total, 0.0);
  std::vector<double> upper(total, inf);
  std::vector<double> cost(total, 0.0);
  std::vector<bool> at_upper(total, false);
  std::vector<long> row_of(total, -1);
  std::vector<std::size_t> basis(m);
  for (std::size_t j = 0; j < n; ++j) {
    upper[j] = 1.0;
    cost[j] = lp.c[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = lp.A[i][j];
    T[i][n + i] = 1.0;
    basis[i] = n + i;
    row_of[n + i] = static_cast<long>(i);
    val[n + i] = lp.b[i];
  }

  LpSolution sol;
  const std::size_t cap = 100000 * std::max<std::size_t>(n, 1);
  for (;;) {
    if (++sol.iterations > cap) throw NumericalFailure("solve_box_lp: iteration cap exceeded");
    long enter = -1;
    for (std::size_t j = 0; j < total && enter < 0; ++j) {
      if (row_of[j] >= 0) continue;
      double d = cost[j];
      for (std::size_t i = 0; i < m; ++i) d -= cost[basis[i]] * T[i][j];
      if ((!at_upper[j] && d > tol) || (at_upper[j] && d < -tol)) enter = static_cast<long>(j);
    }
    if (enter < 0) break;
    const std::size_t j = static_cast<std::size_t>(enter);
    const double sigma = at_upper[j] ? -1.0 : 1.0;

    double step = upper[j];
    long leave = -1;
    bool leave_to_upper = false;
    for (std::size_t i = 0; i < m; ++i) {
      double a = T[i][j] * sigma;
      std::size_t b = basis[i];
      double limit;
      bool to_upper;
      if (a > kPivotTol) {
        limit = std::max(0.0, val[b]) / a;
        to_upper = false;
      } else if (a < -kPivotTol && std::isfinite(upper[b])) {
        limit = std::max(0.0, upper[b] - val[b]) / (-a);
        to_upper = true;
      } else {
        continue;
      }
      bool better = limit < step - 1e-13;
      bool tie = !better && limit <= step + 1e-13 && leave >= 0 && b < basis[static_cast<std::size_t>(leave)];
      if (better || tie) {
        step = limit;
        leave = static_cast<long>(i);
        leave_to_upper = to_upper;
      }
    }
    if (!std::isfinite(step)) throw NumericalFailure("solve_box_lp: unbounded direction");

    val[j] += sigma * step;
    for (std::size_t i = 0; i < m; ++i) val[basis[i]] -= T[i][j] * sigma * step;

    if (leave < 0) {
      at_upper[j] = !at_upper[j];
      val[j] = at_upper[j] ? upper[j] : 0.0;
      continue;
    }
    const std::size_t r = static_cast<std::size_t>(leave);
    const std::size_t out = basis[r];
    at_upper[out] = leave_to_upper;
    val[out] = leave_to_upper ? upper[out] : 0.0;
    row_of[out] = -1;

    double piv = T[r][j];
    for (double& x : T[r]) x /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r) continue;
      double factor = T[i][j];
      if (factor == 0.0) continue;
      for (std::size_t k = 0; k < total; ++k) T[i][k] -= factor * T[r][k];
    }
    basis[r] = j;
    row_of[j] = static_cast<long>(r);
    at_upper[j] = false;
  }

  sol.x.assign(val.begin(), val.begin() + static_cast<long>(n));
  for (double& x : sol.x) x = std::min(1.0, std::max(0.0, x));
  for (std::size_t j = 0; j < n; ++j) sol.objective += lp.c[j] * sol.x[j];
  return sol;
}

}  // namespace alphasr
