#pragma once

#include <random>

#include "alphasr/distribution.hpp"

namespace alphasr {

// Random discrete alpha-strongly-regular distribution on {1, ..., L}.
// Virtual values are drawn backwards from phi(L) = L with increments of at
// least alpha, the pmf is rebuilt from them, and the result is re-validated
// with check_alpha_sr (rejection sampling on failure).
Distribution random_alpha_sr_discrete(double alpha, int L, std::mt19937_64& rng);

}  // namespace alphasr
