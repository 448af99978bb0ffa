#include "mcot/oracle.hpp"

#include "mcot/calculus.hpp"
#include "mcot/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mcot::oracle {

double two_state_swap_distance(double m, double d0, double a, double b, const SwapGrid& grid) {
  if (!(d0 > 0.0 && m > d0 && a > 0.0 && b > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "need m > d0 > 0 and positive weights");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const int nd = grid.d_steps;
  const double dd = d0 / nd;
  const double dm = dd / grid.refine;
  const int band = static_cast<int>(std::floor(grid.max_slope * dd / dm));

  // Half length of the constant-mass path bounds how far an optimal path can move in m.
  double straight = 0.0;
  for (int i = 0; i < nd; ++i) {
    const double d = d0 - (i + 0.5) * dd;
    straight += b * dd / std::sqrt(log_mean(m + d, m - d));
  }
  const double reach = straight / a;
  const int j_lo = -static_cast<int>(std::ceil(std::min(reach, m) / dm));
  const int j_hi = static_cast<int>(std::ceil(reach / dm));
  const int count = j_hi - j_lo + 1;
  auto mass_at = [&](int idx) { return m + (idx + j_lo) * dm; };

  std::vector<double> cost(count, inf), next(count);
  cost[-j_lo] = 0.0;
  std::vector<double> inv_theta(2 * count);
  for (int i = 0; i < nd; ++i) {
    const double d_mid = d0 - (i + 0.5) * dd;
    const double d_next = d0 - (i + 1) * dd;
    // inv_theta[s] at mass m_lo + s dm / 2
    for (int s = 0; s < 2 * count - 1; ++s) {
      const double mm = mass_at(0) + 0.5 * s * dm;
      inv_theta[s] = mm > d_mid ? 1.0 / log_mean(mm + d_mid, mm - d_mid) : inf;
    }
    std::fill(next.begin(), next.end(), inf);
    for (int j = 0; j < count; ++j) {
      if (!std::isfinite(cost[j])) continue;
      const int k_lo = std::max(0, j - band);
      const int k_hi = std::min(count - 1, j + band);
      for (int k = k_lo; k <= k_hi; ++k) {
        if (!(mass_at(k) > d_next)) continue;
        const double it = inv_theta[j + k];
        if (!std::isfinite(it)) continue;
        const double step_m = (k - j) * dm;
        const double c = cost[j] + std::sqrt(a * a * step_m * step_m + b * b * dd * dd * it);
        if (c < next[k]) next[k] = c;
      }
    }
    cost.swap(next);
  }
  return 2.0 * *std::min_element(cost.begin(), cost.end());
}

}  // namespace mcot::oracle
