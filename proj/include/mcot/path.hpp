#pragma once

#include "mcot/operators.hpp"

#include <utility>
#include <vector>

namespace mcot {

/// Time-discretized admissible curve. Measures live on the n+1 time nodes;
/// potentials and sources live on the n intervals (midpoint convention).
struct DiscretePath {
  std::vector<double> times;
  std::vector<Density> measures;
  std::vector<Vector> potentials;
  std::vector<double> sources;

  int intervals() const noexcept { return static_cast<int>(times.size()) - 1; }
  double start_time() const { return times.front(); }
  double end_time() const { return times.back(); }
};

/// Componentwise mean of the two measures bounding interval k.
Density interval_midpoint(const DiscretePath& path, int k);

/// max_k || (mu_{k+1} - mu_k)/dt_k - B_{mid_k} psi_k - h_k p ||_inf
double continuity_residual(const DiscretePath& path, const TransportParams& params, const MarkovChain& chain);

/// Per-interval integrand a^2 h_k^2 + b^2 [A_{mid_k} psi_k, psi_k].
std::vector<double> action_integrand(const DiscretePath& path, const TransportParams& params,
                                     const MarkovChain& chain);

/// sum_k dt_k (a^2 h_k^2 + b^2 [A psi_k, psi_k])
double action_quad(const DiscretePath& path, const TransportParams& params, const MarkovChain& chain);

/// (sum_k dt_k sqrt(a^2 h_k^2 + b^2 [A psi_k, psi_k]))^2
double action_linsq(const DiscretePath& path, const TransportParams& params, const MarkovChain& chain);

/// Measure of the lift-transport-descend curve at t in [0, 1], assuming
/// [mu1, w] >= [mu0, w].
Density three_phase_measure(const Density& mu0, const Density& mu1, double eps, double t,
                            const TransportParams& params, const MarkovChain& chain);

/// Explicit admissible path on [0, 1] with 3 * n_per_phase uniform intervals:
/// lift mu0 along p, transport between the lifted endpoints, then remove
/// eps p. Endpoints with decreasing mass are handled by building the
/// reversed path. Interior measures are strictly positive.
DiscretePath three_phase_path(const Density& mu0, const Density& mu1, double eps, int n_per_phase,
                              const TransportParams& params, const MarkovChain& chain);

/// Affine time change onto [new_start, new_end]; potentials and sources are
/// scaled by (T - tau) / (new_end - new_start).
DiscretePath reparameterize(const DiscretePath& path, std::pair<double, double> new_interval);

/// Same curve traversed backwards (potentials and sources change sign).
DiscretePath reverse_path(const DiscretePath& path);

/// (1 - eps) mu + eps 1
Density epsilon_lift(const Density& mu, double eps);

/// Fills potentials and sources from the measures by decomposing each
/// finite-difference velocity at its interval midpoint.
void fill_tangents(DiscretePath& path, const TransportParams& params, const MarkovChain& chain);

}  // namespace mcot
