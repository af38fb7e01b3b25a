#pragma once

#include <functional>
#include <stdexcept>

namespace alphasr {

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace numeric {

using Function = std::function<double(double)>;

// Adaptive Simpson quadrature on [a, b] to relative tolerance rel_tol.
double integrate(const Function& f, double a, double b, double rel_tol = 1e-8);

// Integral of f over [a, inf). The range beyond a + 1 is mapped through
// v = a + e^u and integrated until the transformed integrand is negligible.
double integrate_to_infinity(const Function& f, double a, double rel_tol = 1e-8);

// Smallest x in [lo, hi] (to tolerance tol) with pred(x) true, assuming pred
// is monotone (false then true) and pred(hi) holds.
double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi,
                        double tol = 1e-10);

// Root of a nondecreasing function with f(lo) <= 0 <= f(hi).
double bisect_root(const Function& f, double lo, double hi, double tol = 1e-10);

}  // namespace numeric
}  // namespace alphasr
