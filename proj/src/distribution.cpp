#include "alphasr/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "alphasr/numeric.hpp"

namespace alphasr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

Distribution Distribution::falpha(double alpha, double scale) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("falpha: alpha must lie in (0,1)");
  if (!(scale > 0.0)) throw std::invalid_argument("falpha: scale must be positive");
  Distribution d;
  d.kind_ = Kind::FAlpha;
  d.alpha_ = alpha;
  d.scale_ = scale;
  d.init_reserve();
  return d;
}

Distribution Distribution::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
  Distribution d;
  d.kind_ = Kind::Exponential;
  d.alpha_ = 1.0;
  d.rate_ = rate;
  d.init_reserve();
  return d;
}

Distribution Distribution::discrete(std::vector<double> support, std::vector<double> pmf) {
  if (support.size() != pmf.size()) throw std::invalid_argument("discrete: support/pmf size mismatch");
  if (support.empty()) throw std::invalid_argument("discrete: empty support");
  double total = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (!(pmf[k] >= 0.0)) throw std::invalid_argument("discrete: negative pmf entry");
    if (!(support[k] >= 0.0)) throw std::invalid_argument("discrete: negative support value");
    if (k > 0 && !(support[k] > support[k - 1]))
      throw std::invalid_argument("discrete: support must be strictly ascending");
    total += pmf[k];
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("discrete: pmf must sum to 1");
  Distribution d;
  d.kind_ = Kind::Discrete;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (pmf[k] == 0.0) continue;
    d.support_.push_back(support[k]);
    d.pmf_.push_back(pmf[k] / total);
  }
  std::size_t n = d.support_.size();
  d.upper_.assign(n, 0.0);
  double acc = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    acc += d.pmf_[k];
    d.upper_[k] = acc;
  }
  d.upper_[0] = 1.0;
  d.phi_.resize(n);
  for (std::size_t k = 0; k < n; ++k) d.phi_[k] = d.discrete_phi_at(k);
  d.init_reserve();
  return d;
}

double Distribution::discrete_phi_at(std::size_t k) const {
  if (k + 1 == support_.size()) return support_[k];
  double gap = support_[k + 1] - support_[k];
  return support_[k] - gap * upper_[k + 1] / pmf_[k];
}

void Distribution::init_reserve() {
  if (kind_ == Kind::Discrete) {
    for (std::size_t k = 0; k < support_.size(); ++k) {
      if (phi_[k] >= 0.0) {
        reserve_ = support_[k];
        return;
      }
    }
    return;
  }
  auto phi = [this](double v) { return virtual_valuation(v); };
  if (phi(0.0) >= 0.0) {
    reserve_ = 0.0;
    return;
  }
  double hi = 1.0;
  while (phi(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) return;
  }
  reserve_ = numeric::bisect_root(phi, 0.0, hi, 1e-13 * std::max(1.0, hi));
}

double Distribution::support_min() const { return kind_ == Kind::Discrete ? support_.front() : 0.0; }

double Distribution::support_max() const { return kind_ == Kind::Discrete ? support_.back() : kInf; }

int Distribution::support_index(double v) const {
  if (kind_ != Kind::Discrete) return -1;
  auto it = std::lower_bound(support_.begin(), support_.end(), v - 1e-12 * std::max(1.0, std::abs(v)));
  if (it != support_.end() && same_value(*it, v)) return static_cast<int>(it - support_.begin());
  return -1;
}

double Distribution::cdf(double v) const {
  if (kind_ != Kind::Discrete) return 1.0 - quantile_of_value(v);
  auto it = std::upper_bound(support_.begin(), support_.end(), v + 1e-12 * std::max(1.0, std::abs(v)));
  std::size_t k = static_cast<std::size_t>(it - support_.begin());
  return k == support_.size() ? 1.0 : 1.0 - upper_[k];
}

double Distribution::density(double v) const {
  switch (kind_) {
    case Kind::FAlpha: {
      if (v < 0.0) return 0.0;
      double k = (1.0 - alpha_) / alpha_;
      return std::pow(1.0 + k * v / scale_, -(2.0 - alpha_) / (1.0 - alpha_)) / (alpha_ * scale_);
    }
    case Kind::Exponential:
      return v < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * v);
    case Kind::Discrete: {
      int k = support_index(v);
      return k < 0 ? 0.0 : pmf_[k];
    }
  }
  return 0.0;
}

double Distribution::quantile_of_value(double v) const {
  switch (kind_) {
    case Kind::FAlpha: {
      if (v <= 0.0) return 1.0;
      double k = (1.0 - alpha_) / alpha_;
      return std::pow(1.0 + k * v / scale_, -1.0 / (1.0 - alpha_));
    }
    case Kind::Exponential:
      return v <= 0.0 ? 1.0 : std::exp(-rate_ * v);
    case Kind::Discrete: {
      auto it = std::lower_bound(support_.begin(), support_.end(), v - 1e-12 * std::max(1.0, std::abs(v)));
      if (it == support_.end()) return 0.0;
      return upper_[it - support_.begin()];
    }
  }
  return 0.0;
}

double Distribution::value_of_quantile(double q) const {
  if (q > 1.0 + 1e-12) throw std::invalid_argument("value_of_quantile: q must be at most 1");
  switch (kind_) {
    case Kind::FAlpha: {
      if (!(q > 0.0)) throw std::invalid_argument("value_of_quantile: q must be positive");
      double k = (1.0 - alpha_) / alpha_;
      return std::max(0.0, scale_ * (std::pow(q, -(1.0 - alpha_)) - 1.0) / k);
    }
    case Kind::Exponential:
      if (!(q > 0.0)) throw std::invalid_argument("value_of_quantile: q must be positive");
      return std::max(0.0, -std::log(q) / rate_);
    case Kind::Discrete: {
      // Largest support value whose sale probability is at least q.
      auto it = std::lower_bound(upper_.begin(), upper_.end(), q, std::greater<double>());
      std::size_t count = static_cast<std::size_t>(it - upper_.begin());
      if (it != upper_.end() && *it == q) ++count;
      if (count == 0) return support_.front();
      return support_[count - 1];
    }
  }
  return 0.0;
}

double Distribution::virtual_valuation(double v) const {
  if (kind_ == Kind::Discrete) {
    int k = support_index(v);
    if (k < 0) {
      auto it = std::upper_bound(support_.begin(), support_.end(), v);
      if (it == support_.begin()) throw UndefinedVirtualValue("virtual_valuation: value below support");
      k = static_cast<int>(it - support_.begin()) - 1;
    }
    return phi_[k];
  }
  if (kind_ == Kind::Exponential) return v - 1.0 / rate_;
  double f = density(v);
  if (!(f > 0.0)) throw UndefinedVirtualValue("virtual_valuation: zero density");
  return v - quantile_of_value(v) / f;
}

double Distribution::hazard_rate(double v) const {
  if (kind_ == Kind::Discrete) {
    double inv = v - virtual_valuation(v);
    return inv <= 0.0 ? kInf : 1.0 / inv;
  }
  double q = quantile_of_value(v);
  if (!(q > 0.0)) return kInf;
  return density(v) / q;
}

double Distribution::cumulative_hazard(double v) const {
  if (kind_ == Kind::Discrete) {
    double total = 0.0;
    for (std::size_t k = 0; k < support_.size() && support_[k] <= v; ++k) total += hazard_rate(support_[k]);
    return total;
  }
  if (v <= 0.0) return 0.0;
  return numeric::integrate([this](double x) { return hazard_rate(x); }, 0.0, v, 1e-10);
}

double Distribution::reserve_price() const {
  if (!reserve_) throw NoReserveError("reserve_price: virtual valuation is everywhere negative");
  return *reserve_;
}

RevenueCurvePoint Distribution::revenue_curve(double q) const {
  if (q < 0.0 || q > 1.0 + 1e-12) throw std::invalid_argument("revenue_curve: q outside [0,1]");
  if (q <= 0.0) return {0.0, 0.0};
  if (kind_ != Kind::Discrete) return {q, q * value_of_quantile(q)};
  std::size_t n = support_.size();
  if (q <= upper_[n - 1]) return {q, q * support_[n - 1]};
  for (std::size_t k = n - 1; k-- > 0;) {
    if (q <= upper_[k]) {
      double q_lo = upper_[k + 1];
      double q_hi = upper_[k];
      double r_lo = q_lo * support_[k + 1];
      double r_hi = q_hi * support_[k];
      double lam = (q - q_lo) / (q_hi - q_lo);
      return {q, r_lo + lam * (r_hi - r_lo)};
    }
  }
  return {q, support_[0]};
}

double Distribution::posted_price_welfare(double t) const {
  if (kind_ == Kind::Discrete) {
    double total = 0.0;
    for (std::size_t k = 0; k < support_.size(); ++k)
      if (support_[k] >= t - 1e-12 * std::max(1.0, std::abs(t))) total += support_[k] * pmf_[k];
    return total;
  }
  double t0 = std::max(t, 0.0);
  double tail = numeric::integrate_to_infinity([this](double x) { return quantile_of_value(x); }, t0, 1e-11);
  return t0 * quantile_of_value(t0) + tail;
}

double Distribution::survival_power_integral(int p) const {
  if (p < 1) throw std::invalid_argument("survival_power_integral: p must be positive");
  if (kind_ == Kind::Discrete) {
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < support_.size(); ++k) {
      total += (support_[k] - prev) * std::pow(upper_[k], p);
      prev = support_[k];
    }
    return total;
  }
  return numeric::integrate_to_infinity([this, p](double x) { return std::pow(quantile_of_value(x), p); }, 0.0, 1e-11);
}

Distribution Distribution::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
  switch (kind_) {
    case Kind::FAlpha:
      return falpha(alpha_, scale_ * factor);
    case Kind::Exponential:
      return exponential(rate_ / factor);
    case Kind::Discrete: {
      std::vector<double> s = support_;
      for (double& x : s) x *= factor;
      return discrete(s, pmf_);
    }
  }
  return *this;
}

AlphaSrReport check_alpha_sr(const Distribution& d, double alpha, int grid_size) {
  std::vector<double> grid;
  if (d.kind() == Distribution::Kind::Discrete) {
    grid = d.support();
  } else {
    int n = std::max(grid_size, 3);
    for (int k = 0; k < n; ++k) {
      double q = std::pow(1e-6, static_cast<double>(k) / (n - 1));
      double v = d.value_of_quantile(q);
      if (grid.empty() || v > grid.back()) grid.push_back(v);
    }
  }
  AlphaSrReport rep{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    double x = grid[k];
    double y = grid[k + 1];
    double slope = (d.virtual_valuation(y) - d.virtual_valuation(x)) / (y - x);
    if (slope - alpha < rep.margin) rep = {slope - alpha, x, y};
  }
  return rep;
}

Distribution truncate_at(const Distribution& d, double B, const std::vector<double>& grid) {
  if (!(B >= d.support_min())) throw std::invalid_argument("truncate_at: B below support minimum");
  std::vector<double> s;
  std::vector<double> p;
  if (d.kind() == Distribution::Kind::Discrete) {
    if (d.support_max() <= B) return d;
    double folded = 0.0;
    for (std::size_t k = 0; k < d.support().size(); ++k) {
      if (d.support()[k] < B) {
        s.push_back(d.support()[k]);
        p.push_back(d.pmf()[k]);
      } else {
        folded += d.pmf()[k];
      }
    }
    s.push_back(B);
    p.push_back(folded);
    return Distribution::discrete(s, p);
  }
  if (grid.empty()) throw std::invalid_argument("truncate_at: continuous input needs a grid");
  double prev_cdf = 0.0;
  for (double g : grid) {
    if (g >= B) break;
    double c = d.cdf(g);
    s.push_back(g);
    p.push_back(c - prev_cdf);
    prev_cdf = c;
  }
  s.push_back(B);
  p.push_back(1.0 - prev_cdf);
  return Distribution::discrete(s, p);
}

double uniform_open_closed(std::mt19937_64& rng) {
  // 53 random bits mapped to (0, 1].
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

std::vector<double> sample(const Distribution& d, std::mt19937_64& rng, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(d.value_of_quantile(uniform_open_closed(rng)));
  return out;
}

}  // namespace alphasr
