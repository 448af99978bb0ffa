#pragma once

#include "mcot/path.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mcot {

struct DistanceOptions {
  int n_steps = 32;
  int restarts = 4;
  std::uint64_t seed = 0;
  int max_iters = 500;
  double tol = 1e-9;
  /// Reported only; log-parameterized interior measures are positive by construction.
  double positivity_floor = 1e-10;
  /// Lift used for the three-phase initial path of restart 0.
  double init_eps = 0.1;
};

struct DistanceEstimate {
  double upper_bound = 0.0;
  double lower_bound = 0.0;
  DiscretePath path;
  std::vector<std::pair<int, double>> optimizer_trace;
  int n_steps = 0;
  int restarts_used = 0;
  int best_restart = 0;
  bool converged = false;
  double min_interior = 0.0;
};

/// Discrete action sum_k dt g_{mid_k}(rho_k, rho_k) of the piecewise-linear
/// curve through `measures` on a uniform grid over [0, 1]. Returns +inf
/// when a midpoint solve is ill-conditioned.
double discrete_path_action(const std::vector<Density>& measures, const TransportParams& params,
                            const MarkovChain& chain);

/// Upper estimate of W(mu0, mu1) by minimizing the discrete action over
/// strictly positive interior measures (log-parameterized), with the
/// potentials and sources eliminated interval by interval. The lower bound
/// is the mass bound a |[mu1 - mu0, w]|. Restart 0 starts from the
/// three-phase path, restart 1 from the straight line, later ones from
/// seeded perturbations of both. Deterministic in opts.seed.
DistanceEstimate estimate_distance(const Density& mu0, const Density& mu1, const TransportParams& params,
                                   const MarkovChain& chain, const DistanceOptions& opts = {});

struct L1Bounds {
  double c = 0.0;
  double C = 0.0;
  double l1_distance = 0.0;
  int samples = 0;
  bool lower_holds = false;  // ||mu0 - mu1||_{w,1} <= c * w_hat
  bool upper_holds = false;  // w_hat <= C * ||mu0 - mu1||_{w,1}
};

/// Local equivalence constants between W and the weighted L1 distance.
/// The maximum defining C is approximated over `samples` random densities on
/// the boundary of the mass ball plus the strictly positive endpoints.
L1Bounds l1_bounds(const Density& mu0, const Density& mu1, const TransportParams& params, const MarkovChain& chain,
                   double w_hat, int samples = 256, std::uint64_t seed = 0);

/// ||A_nu||^{1/2} ||(B_nu restricted)^{-1}|| in Euclidean operator norms;
/// +inf when nu has a zero entry on a connected pair.
double operator_norm_product(const Density& nu, const MarkovChain& chain);

}  // namespace mcot
