#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "alphasr/harness.hpp"

namespace alphasr {
namespace {

constexpr std::uint64_t kChunks = 256;

struct Accumulator {
  std::uint64_t n = 0;
  std::vector<double> mean;
  std::vector<double> m2;

  explicit Accumulator(std::size_t metrics = 0) : mean(metrics, 0.0), m2(metrics, 0.0) {}

  void push(const std::vector<double>& x) {
    ++n;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      double d = x[k] - mean[k];
      mean[k] += d / static_cast<double>(n);
      m2[k] += d * (x[k] - mean[k]);
    }
  }

  void merge(const Accumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    double na = static_cast<double>(n);
    double nb = static_cast<double>(o.n);
    double nt = na + nb;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      double d = o.mean[k] - mean[k];
      mean[k] += d * nb / nt;
      m2[k] += o.m2[k] + d * d * na * nb / nt;
    }
    n += o.n;
  }
};

MetricStats finish(double mean, double m2, std::uint64_t n) {
  MetricStats s;
  s.n = n;
  s.mean = mean;
  if (n > 1) s.std_error = std::sqrt(std::max(0.0, m2 / static_cast<double>(n - 1)) / static_cast<double>(n));
  s.ci_lo = s.mean - 1.96 * s.std_error;
  s.ci_hi = s.mean + 1.96 * s.std_error;
  return s;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index));
}

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t index) {
  return std::mt19937_64(stream_seed(master_seed, index));
}

std::vector<MetricStats> monte_carlo(const TrialFn& trial, std::size_t metrics, std::uint64_t trials,
                                     std::uint64_t master_seed, unsigned threads) {
  if (trials == 0) throw std::invalid_argument("monte_carlo: trials must be positive");
  const std::uint64_t chunks = std::min(trials, kChunks);
  std::vector<Accumulator> parts(chunks, Accumulator(metrics));
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    std::vector<double> out(metrics);
    for (;;) {
      std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      std::uint64_t begin = trials * c / chunks;
      std::uint64_t end = trials * (c + 1) / chunks;
      for (std::uint64_t t = begin; t < end; ++t) {
        std::mt19937_64 rng = make_stream(master_seed, t);
        std::fill(out.begin(), out.end(), 0.0);
        trial(rng, out);
        parts[c].push(out);
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  Accumulator total(metrics);
  for (const Accumulator& a : parts) total.merge(a);
  std::vector<MetricStats> out;
  for (std::size_t k = 0; k < metrics; ++k) out.push_back(finish(total.mean[k], total.m2[k], total.n));
  return out;
}

MetricStats summarize(const std::vector<double>& xs) {
  Accumulator acc(1);
  std::vector<double> one(1);
  for (double x : xs) {
    one[0] = x;
    acc.push(one);
  }
  return finish(acc.mean[0], acc.m2[0], acc.n);
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  double nn = static_cast<double>(n);
  double p = static_cast<double>(successes) / nn;
  double z2 = z * z;
  double center = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace alphasr
