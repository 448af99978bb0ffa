#pragma once

namespace mcot::oracle {

struct SwapGrid {
  int d_steps = 200;
  /// Mass grid spacing is the d spacing divided by this.
  int refine = 8;
  /// Largest |dm/dd| a single step may take.
  double max_slope = 8.0;
};

/// Distance between (m + d0, m - d0) and (m - d0, m + d0) on the symmetric
/// two-state chain with p = 1, by dynamic programming over paths that are
/// graphs over d. In coordinates (m, d) the speed is
/// a^2 m'^2 + b^2 d'^2 / theta(m + d, m - d); by the reflection d -> -d the
/// optimum is twice the best half path from d0 to d = 0 with free end mass.
/// Requires m > d0 > 0.
double two_state_swap_distance(double m, double d0, double a, double b, const SwapGrid& grid = {});

}  // namespace mcot::oracle
