#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace alphasr {

using BidderSet = std::uint64_t;  // bit i set <=> bidder i (0-based) belongs to the set

std::vector<int> to_indices(BidderSet s);
BidderSet from_indices(const std::vector<int>& idx);
// Lexicographic order on ascending index lists (a proper prefix is smaller).
bool lex_less(BidderSet a, BidderSet b);

// Downward-closed feasibility system over n bidders.
class Environment {
 public:
  enum class Kind { ExplicitFeasibleSets, KUniformMatroid };

  static Environment k_uniform(std::size_t bidders, std::size_t k);
  static Environment single_item(std::size_t bidders) { return k_uniform(bidders, 1); }
  // Sets use 0-based bidder indices. The family must be closed under subsets;
  // the empty set is added if missing.
  static Environment explicit_sets(std::size_t bidders, const std::vector<std::vector<int>>& sets);

  Kind kind() const { return kind_; }
  std::size_t bidder_count() const { return n_; }
  std::size_t k() const { return k_; }
  const std::vector<BidderSet>& sets() const { return sets_; }

  bool is_feasible(BidderSet s) const;

  // Maximum-weight feasible set without zero- or negative-weight bidders;
  // remaining ties go to the lexicographically smallest index set. Bidders
  // in `excluded` are never selected.
  BidderSet max_weight_set(const std::vector<double>& w, BidderSet excluded = 0) const;
  double set_weight(BidderSet s, const std::vector<double>& w) const;

  // True iff some maximum-weight feasible set contains bidder i.
  bool in_some_optimum(const std::vector<double>& w, std::size_t i, double tol = 1e-12) const;

  // 2n bidders: bidder i and its copy n+i are mutually exclusive, and the
  // projection onto original indices must be feasible here.
  Environment with_duplicates() const;

 private:
  Kind kind_ = Kind::KUniformMatroid;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<BidderSet> sets_;
};

}  // namespace alphasr
