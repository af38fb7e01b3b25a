#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "alphasr/harness.hpp"
#include "alphasr/numeric.hpp"

namespace alphasr {
namespace {

void enumerate_profiles(const std::vector<Distribution>& dists, std::size_t i, std::vector<double>& values,
                        double prob, const std::function<void(const std::vector<double>&, double)>& visit) {
  if (i == dists.size()) {
    visit(values, prob);
    return;
  }
  const Distribution& d = dists[i];
  for (std::size_t k = 0; k < d.support().size(); ++k) {
    values[i] = d.support()[k];
    enumerate_profiles(dists, i + 1, values, prob * d.pmf()[k], visit);
  }
}

// Solves the square system M y = r by Gaussian elimination with partial
// pivoting; returns false when singular.
bool solve_square(std::vector<std::vector<double>> M, std::vector<double> r, std::vector<double>& y) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(M[i][c]) > std::abs(M[piv][c])) piv = i;
    if (std::abs(M[piv][c]) < 1e-12) return false;
    std::swap(M[piv], M[c]);
    std::swap(r[piv], r[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      double f = M[i][c] / M[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) M[i][k] -= f * M[c][k];
      r[i] -= f * r[c];
    }
  }
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = r[i] / M[i][i];
  return true;
}

}  // namespace

double oracle_optimal_revenue_single_item(const std::vector<Distribution>& dists) {
  for (const Distribution& d : dists)
    if (d.is_continuous()) throw std::invalid_argument("oracle: discrete distributions required");
  double total = 0.0;
  std::vector<double> values(dists.size());
  enumerate_profiles(dists, 0, values, 1.0, [&](const std::vector<double>& v, double p) {
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) best = std::max(best, dists[i].virtual_valuation(v[i]));
    total += p * best;
  });
  return total;
}

BidderSet oracle_feasible_argmax(const Environment& env, const std::vector<double>& weights) {
  const std::size_t n = env.bidder_count();
  if (n > 24) throw std::invalid_argument("oracle_feasible_argmax: too many bidders");
  BidderSet best = 0;
  double best_w = 0.0;
  for (BidderSet s = 0; s < (BidderSet{1} << n); ++s) {
    if (!env.is_feasible(s)) continue;
    double w = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!((s >> i) & 1u)) continue;
      w += weights[i];
      positive = positive && weights[i] > 0.0;
    }
    if (!positive) continue;
    if (w > best_w || (w == best_w && lex_less(s, best))) {
      best = s;
      best_w = w;
    }
  }
  return best;
}

double oracle_exact_expectation(const std::vector<Distribution>& dists,
                                const std::function<double(const std::vector<double>&)>& f) {
  for (const Distribution& d : dists)
    if (d.is_continuous()) throw std::invalid_argument("oracle: discrete distributions required");
  double total = 0.0;
  std::vector<double> values(dists.size());
  enumerate_profiles(dists, 0, values, 1.0, [&](const std::vector<double>& v, double p) { total += p * f(v); });
  return total;
}

double optimal_revenue_from_curve(std::vector<std::pair<double, double>> points, int n) {
  points.emplace_back(0.0, 0.0);
  std::sort(points.begin(), points.end());
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : points) {
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      double cr = (a.first - o.first) * (p.second - o.second) - (a.second - o.second) * (p.first - o.first);
      if (cr >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  double total = 0.0;
  for (std::size_t k = 1; k < hull.size(); ++k) {
    double dq = hull[k].first - hull[k - 1].first;
    if (dq <= 0.0) continue;
    double slope = (hull[k].second - hull[k - 1].second) / dq;
    if (slope <= 0.0) break;
    total += slope * (std::pow(1.0 - hull[k - 1].first, n) - std::pow(1.0 - hull[k].first, n));
  }
  return total;
}

double optimal_revenue_iid_continuous(const Distribution& d, int n) {
  if (!d.is_continuous()) throw std::invalid_argument("optimal_revenue_iid_continuous: continuous kind required");
  double qr = d.quantile_of_value(d.reserve_price());
  auto R = [&](double q) { return q <= 0.0 ? 0.0 : d.revenue_curve(std::min(q, 1.0)).cr; };
  double head = R(qr) * n * std::pow(1.0 - qr, n - 1);
  if (n == 1) return head;
  double body = numeric::integrate([&](double q) { return R(q) * std::pow(1.0 - q, n - 2); }, 0.0, qr, 1e-11);
  return head + n * (n - 1) * body;
}

double expected_top_k_sum(const std::vector<Distribution>& dists, int k) {
  auto integrand = [&](double v) {
    // Distribution of the number of draws exceeding v.
    std::vector<double> count(dists.size() + 1, 0.0);
    count[0] = 1.0;
    for (std::size_t i = 0; i < dists.size(); ++i) {
      double q = dists[i].quantile_of_value(v);
      for (std::size_t c = i + 2; c-- > 0;) count[c] = count[c] * (1.0 - q) + (c > 0 ? count[c - 1] * q : 0.0);
    }
    double tail = 0.0;
    double total = 0.0;
    for (std::size_t c = dists.size(); c >= 1; --c) {
      tail += count[c];
      if (static_cast<int>(c) <= k) total += tail;
    }
    return total;
  };
  return numeric::integrate_to_infinity(integrand, 0.0, 1e-10);
}

double oracle_lp_vertex_enumeration(const BoxLp& lp, std::vector<double>* argmax) {
  const std::size_t n = lp.c.size();
  const std::size_t m = lp.b.size();
  // Constraint g: a_g . x <= r_g.
  std::vector<std::vector<double>> G;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < m; ++i) {
    G.push_back(lp.A[i]);
    rhs.push_back(lp.b[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> lo(n, 0.0), hi(n, 0.0);
    lo[j] = -1.0;
    hi[j] = 1.0;
    G.push_back(lo);
    rhs.push_back(0.0);
    G.push_back(hi);
    rhs.push_back(1.0);
  }
  const std::size_t total = G.size();
  double best = -1e300;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      std::vector<std::vector<double>> M;
      std::vector<double> r;
      for (std::size_t t : pick) {
        M.push_back(G[t]);
        r.push_back(rhs[t]);
      }
      std::vector<double> y;
      if (!solve_square(M, r, y)) return;
      for (std::size_t g = 0; g < total; ++g) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += G[g][j] * y[j];
        if (lhs > rhs[g] + 1e-9) return;
      }
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += lp.c[j] * y[j];
      if (obj > best) {
        best = obj;
        if (argmax) *argmax = y;
      }
      return;
    }
    for (std::size_t g = start; g + (n - depth) <= total; ++g) {
      pick[depth] = g;
      rec(g + 1, depth + 1);
    }
  };
  if (n == 0) return 0.0;
  rec(0, 0);
  return best;
}

}  // namespace alphasr
