#include "alphasr/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace alphasr::numeric {
namespace {

constexpr int kPanels = 64;
constexpr int kMaxDepth = 48;

double simpson_step(const Function& f, double a, double b, double fa, double fm, double fb,
                    double whole, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace

double integrate(const Function& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  double h = (b - a) / kPanels;
  double xs[kPanels + 1];
  double fx[kPanels + 1];
  double fm[kPanels];
  for (int i = 0; i <= kPanels; ++i) {
    xs[i] = (i == kPanels) ? b : a + i * h;
    fx[i] = f(xs[i]);
  }
  double coarse = 0.0;
  double coarse_abs = 0.0;
  double whole[kPanels];
  for (int i = 0; i < kPanels; ++i) {
    fm[i] = f(0.5 * (xs[i] + xs[i + 1]));
    whole[i] = (xs[i + 1] - xs[i]) / 6.0 * (fx[i] + 4.0 * fm[i] + fx[i + 1]);
    coarse += whole[i];
    coarse_abs += std::abs(whole[i]);
  }
  if (coarse_abs == 0.0) return 0.0;
  double eps = rel_tol * coarse_abs / kPanels;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i)
    total += simpson_step(f, xs[i], xs[i + 1], fx[i], fm[i], fx[i + 1], whole[i], eps, kMaxDepth);
  return total;
}

double integrate_to_infinity(const Function& f, double a, double rel_tol) {
  double head = integrate(f, a, a + 1.0, rel_tol);
  auto g = [&](double u) {
    double e = std::exp(u);
    double val = f(a + e);
    return std::isfinite(val) ? val * e : 0.0;
  };
  // Grow the upper limit in unit steps until the integrand is negligible
  // relative to the running total and no longer increasing.
  double upper = 1.0;
  double running = std::abs(head) + integrate(g, 0.0, upper, 1e-4);
  constexpr double kMaxU = 700.0;
  double prev = g(upper);
  while (upper < kMaxU) {
    double next = g(upper + 1.0);
    upper += 1.0;
    if (next <= prev && std::abs(next) <= 1e-14 * std::max(running, 1e-300)) break;
    running += 0.5 * (std::abs(prev) + std::abs(next));
    prev = next;
  }
  // Integrate the transformed tail piecewise so each piece is well resolved.
  double tail = 0.0;
  for (double u = 0.0; u < upper; u += 8.0) tail += integrate(g, u, std::min(u + 8.0, upper), rel_tol);
  return head + tail;
}

double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi,
                        double tol) {
  if (pred(lo)) return lo;
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double bisect_root(const Function& f, double lo, double hi, double tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) throw NumericalFailure("bisect_root: root not bracketed");
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace alphasr::numeric
