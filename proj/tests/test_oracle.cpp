#include "doctest.h"
#include "mcot/oracle.hpp"

#include <cmath>
#include <initializer_list>

using namespace mcot::oracle;

TEST_CASE("swap distance is bounded by the constant-mass path") {
  // Constant m costs b * int |d'| / sqrt(theta); the oracle can only do better.
  const double m = 1.0, d0 = 0.5;
  double straight = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double d = -d0 + (i + 0.5) * 2 * d0 / n;
    const double u = m + d, v = m - d;
    const double theta = std::abs(u - v) < 1e-12 ? u : (u - v) / (std::log(u) - std::log(v));
    straight += (2 * d0 / n) / std::sqrt(theta);
  }
  for (double a : {0.3, 1.0, 3.0}) {
    const double w = two_state_swap_distance(m, d0, a, 1.0);
    CHECK(w <= straight * (1 + 1e-6));
    CHECK(w > 0.0);
  }
  // Large a freezes the mass.
  CHECK(two_state_swap_distance(m, d0, 1e6, 1.0) == doctest::Approx(straight).epsilon(1e-5));
}

TEST_CASE("swap distance scales with b at fixed mass") {
  const double w1 = two_state_swap_distance(1.0, 0.4, 1e6, 1.0);
  const double w2 = two_state_swap_distance(1.0, 0.4, 1e6, 2.0);
  CHECK(w2 == doctest::Approx(2 * w1).epsilon(1e-8));
}

TEST_CASE("grid refinement changes the oracle little") {
  SwapGrid coarse;
  SwapGrid fine;
  fine.d_steps = 400;
  fine.refine = 12;
  const double a = two_state_swap_distance(1.0, 0.5, 0.5, 1.0, coarse);
  const double b = two_state_swap_distance(1.0, 0.5, 0.5, 1.0, fine);
  CHECK(std::abs(a - b) <= 2e-3 * b);
}
