#include "alphasr/generators.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace alphasr {

Distribution random_alpha_sr_discrete(double alpha, int L, std::mt19937_64& rng) {
  if (L < 1) throw std::invalid_argument("random_alpha_sr_discrete: L must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("random_alpha_sr_discrete: alpha in (0,1]");
  std::uniform_real_distribution<double> extra(0.0, 1.5);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> phi(L + 1);
    phi[L] = L;
    for (int k = L - 1; k >= 1; --k) {
      double step = std::max(alpha, phi[k + 1] - k + 0.05) + extra(rng);
      phi[k] = phi[k + 1] - step;
    }
    // upper[k] = Pr[X >= k], built from f_k = upper[k+1] / (k - phi_k).
    std::vector<double> upper(L + 2, 0.0);
    upper[L] = 1.0;
    for (int k = L - 1; k >= 1; --k) upper[k] = upper[k + 1] * (1.0 + 1.0 / (k - phi[k]));
    std::vector<double> support(L);
    std::vector<double> pmf(L);
    for (int k = 1; k <= L; ++k) {
      support[k - 1] = k;
      pmf[k - 1] = (upper[k] - upper[k + 1]) / upper[1];
    }
    double total = 0.0;
    for (double p : pmf) total += p;
    for (double& p : pmf) p /= total;
    Distribution d = Distribution::discrete(support, pmf);
    if (static_cast<int>(d.support().size()) == L && check_alpha_sr(d, alpha).margin >= -1e-12) return d;
  }
  throw std::runtime_error("random_alpha_sr_discrete: rejection sampling failed");
}

}  // namespace alphasr
