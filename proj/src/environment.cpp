#include "alphasr/environment.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace alphasr {

std::vector<int> to_indices(BidderSet s) {
  std::vector<int> out;
  for (int i = 0; s != 0; ++i, s >>= 1)
    if (s & 1u) out.push_back(i);
  return out;
}

BidderSet from_indices(const std::vector<int>& idx) {
  BidderSet s = 0;
  for (int i : idx) {
    if (i < 0 || i >= 64) throw std::invalid_argument("bidder index out of range");
    s |= BidderSet{1} << i;
  }
  return s;
}

bool lex_less(BidderSet a, BidderSet b) {
  if (a == b) return false;
  auto x = to_indices(a);
  auto y = to_indices(b);
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

Environment Environment::k_uniform(std::size_t bidders, std::size_t k) {
  if (bidders > 64) throw std::invalid_argument("Environment: at most 64 bidders");
  Environment e;
  e.kind_ = Kind::KUniformMatroid;
  e.n_ = bidders;
  e.k_ = std::min(k, bidders);
  return e;
}

Environment Environment::explicit_sets(std::size_t bidders, const std::vector<std::vector<int>>& sets) {
  if (bidders > 64) throw std::invalid_argument("Environment: at most 64 bidders");
  Environment e;
  e.kind_ = Kind::ExplicitFeasibleSets;
  e.n_ = bidders;
  std::vector<BidderSet> all{0};
  for (const auto& s : sets) {
    for (int i : s)
      if (i < 0 || static_cast<std::size_t>(i) >= bidders)
        throw std::invalid_argument("Environment: set references unknown bidder");
    all.push_back(from_indices(s));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  for (BidderSet s : all) {
    for (BidderSet rest = s; rest != 0; rest &= rest - 1) {
      BidderSet sub = s & ~(rest & (~rest + 1));
      if (!std::binary_search(all.begin(), all.end(), sub))
        throw std::invalid_argument("Environment: feasible sets are not closed under subsets");
    }
  }
  for (BidderSet s : all) e.k_ = std::max<std::size_t>(e.k_, std::popcount(s));
  e.sets_ = std::move(all);
  return e;
}

bool Environment::is_feasible(BidderSet s) const {
  if (n_ < 64 && (s >> n_) != 0) return false;
  if (kind_ == Kind::KUniformMatroid) return static_cast<std::size_t>(std::popcount(s)) <= k_;
  return std::binary_search(sets_.begin(), sets_.end(), s);
}

double Environment::set_weight(BidderSet s, const std::vector<double>& w) const {
  double total = 0.0;
  for (int i : to_indices(s)) total += w[static_cast<std::size_t>(i)];
  return total;
}

BidderSet Environment::max_weight_set(const std::vector<double>& w, BidderSet excluded) const {
  if (w.size() != n_) throw std::invalid_argument("max_weight_set: weight count mismatch");
  if (kind_ == Kind::KUniformMatroid) {
    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    BidderSet s = 0;
    std::size_t taken = 0;
    for (std::size_t i : order) {
      if (taken == k_ || !(w[i] > 0.0)) break;
      if (excluded & (BidderSet{1} << i)) continue;
      s |= BidderSet{1} << i;
      ++taken;
    }
    return s;
  }
  BidderSet best = 0;
  double best_w = 0.0;
  BidderSet nonpositive = 0;
  for (std::size_t i = 0; i < n_; ++i)
    if (!(w[i] > 0.0)) nonpositive |= BidderSet{1} << i;
  for (BidderSet s : sets_) {
    if (s & (excluded | nonpositive)) continue;
    double ws = set_weight(s, w);
    if (ws > best_w || (ws == best_w && lex_less(s, best))) {
      best = s;
      best_w = ws;
    }
  }
  return best;
}

bool Environment::in_some_optimum(const std::vector<double>& w, std::size_t i, double tol) const {
  double best = set_weight(max_weight_set(w), w);
  BidderSet bit = BidderSet{1} << i;
  double with_i;
  if (kind_ == Kind::KUniformMatroid) {
    if (k_ == 0) return false;
    std::vector<double> others;
    for (std::size_t b = 0; b < n_; ++b)
      if (b != i && w[b] > 0.0) others.push_back(w[b]);
    std::sort(others.begin(), others.end(), std::greater<double>());
    with_i = w[i];
    for (std::size_t t = 0; t + 1 < k_ && t < others.size(); ++t) with_i += others[t];
  } else {
    with_i = -1e300;
    for (BidderSet s : sets_)
      if (s & bit) with_i = std::max(with_i, set_weight(s, w));
  }
  return with_i >= best - tol * std::max(1.0, std::abs(best));
}

Environment Environment::with_duplicates() const {
  if (2 * n_ > 64) throw std::invalid_argument("with_duplicates: too many bidders");
  if (kind_ == Kind::KUniformMatroid && k_ == 1) return k_uniform(2 * n_, 1);
  std::vector<BidderSet> base = sets_;
  if (kind_ == Kind::KUniformMatroid) {
    base.clear();
    for (BidderSet s = 0; s < (BidderSet{1} << n_); ++s)
      if (static_cast<std::size_t>(std::popcount(s)) <= k_) base.push_back(s);
  }
  std::vector<std::vector<int>> doubled;
  for (BidderSet s : base) {
    auto idx = to_indices(s);
    for (BidderSet choice = 0; choice < (BidderSet{1} << idx.size()); ++choice) {
      std::vector<int> members;
      for (std::size_t t = 0; t < idx.size(); ++t)
        members.push_back((choice >> t) & 1u ? idx[t] + static_cast<int>(n_) : idx[t]);
      doubled.push_back(members);
    }
  }
  return explicit_sets(2 * n_, doubled);
}

}  // namespace alphasr
