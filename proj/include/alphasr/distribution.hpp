#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace alphasr {

class UndefinedVirtualValue : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NoReserveError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct QuantileValuePair {
  double q;
  double v;
};

struct RevenueCurvePoint {
  double q;
  double cr;
};

// A single bidder's valuation distribution. Immutable after construction; the
// reserve price is computed once in the factory functions.
//
// Quantiles follow the sale-probability convention q(v) = Pr[X >= v]. For
// continuous kinds this is 1 - F(v). For discrete kinds it is the
// probability that a posted price of v sells.
class Distribution {
 public:
  enum class Kind { FAlpha, Exponential, Discrete };

  static Distribution falpha(double alpha, double scale = 1.0);
  static Distribution exponential(double rate);
  // Zero-probability entries are dropped. Support must be strictly ascending
  // and nonnegative; the pmf must sum to 1 within 1e-12 (it is renormalized).
  static Distribution discrete(std::vector<double> support, std::vector<double> pmf);

  Kind kind() const { return kind_; }
  bool is_continuous() const { return kind_ != Kind::Discrete; }
  double alpha() const { return alpha_; }
  double scale() const { return scale_; }
  double rate() const { return rate_; }
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& pmf() const { return pmf_; }
  double support_min() const;
  double support_max() const;

  double cdf(double v) const;
  double density(double v) const;
  double quantile_of_value(double v) const;
  double value_of_quantile(double q) const;
  double virtual_valuation(double v) const;
  double hazard_rate(double v) const;
  double cumulative_hazard(double v) const;
  double reserve_price() const;
  bool has_reserve() const { return reserve_.has_value(); }
  RevenueCurvePoint revenue_curve(double q) const;
  double posted_price_revenue(double price) const { return price * quantile_of_value(price); }
  double posted_price_welfare(double t) const;
  double survival_power_integral(int p) const;
  double mean() const { return survival_power_integral(1); }

  // Multiplies every value by factor (scale for F^alpha, 1/rate for Exp).
  Distribution scaled(double factor) const;

  // Discrete kinds only: index of v in the support, or -1.
  int support_index(double v) const;

 private:
  Distribution() = default;
  void init_reserve();
  double discrete_phi_at(std::size_t k) const;

  Kind kind_ = Kind::Discrete;
  double alpha_ = 0.0;
  double scale_ = 1.0;
  double rate_ = 1.0;
  std::vector<double> support_;
  std::vector<double> pmf_;
  std::vector<double> upper_;  // upper_[k] = Pr[X >= support_[k]]
  std::vector<double> phi_;
  std::optional<double> reserve_;
};

struct AlphaSrReport {
  double margin;
  double worst_x;
  double worst_y;
};

AlphaSrReport check_alpha_sr(const Distribution& d, double alpha, int grid_size = 400);

// Folds all probability above B onto an atom at B. Continuous inputs are
// discretized onto the ascending grid (values <= B); each grid point receives
// the mass between it and the previous grid point.
Distribution truncate_at(const Distribution& d, double B, const std::vector<double>& grid = {});

std::vector<double> sample(const Distribution& d, std::mt19937_64& rng, std::size_t n);

// One uniform draw on (0, 1].
double uniform_open_closed(std::mt19937_64& rng);

}  // namespace alphasr
