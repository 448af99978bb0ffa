#pragma once

#include "mcot/operators.hpp"

#include <cstdint>
#include <vector>

namespace mcot {

/// sum_x (mu log mu - mu) w(x), with 0 log 0 = 0.
double entropy(const Density& mu, const MarkovChain& chain);

/// H(mu) - H(1) = sum_x (mu log mu - mu + 1) w(x), evaluated without
/// cancellation near mu = 1. H(1) = -1 exactly.
double entropy_gap(const Density& mu, const MarkovChain& chain);

/// Metric gradient of the entropy in tangent coordinates:
/// (b^-2 grad log mu, a^-2 <log mu, p>_w).
TangentDecomposition entropy_gradient(const Density& mu, const TransportParams& params, const MarkovChain& chain);

/// ||grad H(mu)||_g^2 = a^-2 <log mu, p>_w^2 + b^-2 <grad log mu, grad mu>_w.
double entropy_gradient_norm_sq(const Density& mu, const TransportParams& params, const MarkovChain& chain);

/// b^-2 (K - I) rho - a^-2 <log rho, p>_w p
Vector heat_rhs(const Density& rho, const TransportParams& params, const MarkovChain& chain);

struct FlowOptions {
  double dt = 0.01;
  double t_max = 200.0;
  double stop_tol = 1e-10;
  int record_every = 10;
  int max_halvings = 20;
};

/// Default step 0.01 min(a^2, b^2); remaining fields at their defaults.
FlowOptions default_flow_options(const TransportParams& params);

struct FlowTrajectory {
  std::vector<double> times;
  std::vector<Density> states;
  std::vector<double> entropy;
  std::vector<double> grad_norm_sq;
  std::vector<double> min_state;
  std::vector<double> mass;
  /// Fourth-order central differences of entropy and mass (steps at +-dt, +-2dt).
  std::vector<double> entropy_rate_fd;
  std::vector<double> mass_rate_fd;
  /// Predicted mass rate -a^-2 <log rho, p>_w.
  std::vector<double> source_rate;

  double dt = 0.0;
  /// Positivity floor; log form stays finite when the floor underflows.
  double positivity_floor = 0.0;
  double log_positivity_floor = 0.0;
  /// Entropy-sublevel bound on the largest state component.
  double state_bound = 0.0;
  double max_component = 0.0;
  int halvings_used = 0;
  bool converged = false;  // reached stop_tol before t_max
};

/// a priori bound on max_x rho(x) over {H <= H(rho0)}.
double sublevel_state_bound(const Density& rho0, const MarkovChain& chain);

/// log of min{ min(rho0)/2, exp(-2 C max p / min(w p^2)) } with
/// C = [p, w] max(0, log bound).
double log_positivity_floor(const Density& rho0, const TransportParams& params, const MarkovChain& chain);

/// Classical RK4 integration of the heat flow with source. Steps whose
/// stages leave the floor are retried in halves (at most max_halvings deep);
/// throws StepSizeUnderflow past that, NotStrictlyPositive for bad input.
FlowTrajectory integrate_flow(const Density& rho0, const TransportParams& params, const MarkovChain& chain,
                              const FlowOptions& opts);

/// ||grad H(mu)||_g^2 / |H(mu) - H(1)|; throws AtEquilibrium when the gap is below 1e-14.
double lojasiewicz_ratio(const Density& mu, const TransportParams& params, const MarkovChain& chain);

struct DecayReport {
  double fitted_rate = 0.0;
  double r_squared = 0.0;
  double l2_rate = 0.0;
  double l2_r_squared = 0.0;
  /// Minimum ratio over recorded states. Bounds the true constant from above.
  double loja_constant = 0.0;
  double l2_distance_final = 0.0;
  int samples_used = 0;
};

/// Tail fit of log(H - H(1)) against t over the last half of the samples
/// whose gap is at least 1e-13. Throws InsufficientData below 10 samples.
DecayReport estimate_decay(const FlowTrajectory& traj, const MarkovChain& chain);

/// Min ratio over `samples` random states with H <= level, drawn along rays
/// from the equilibrium. Being a minimum over a subset, it can only
/// overestimate the inequality constant.
double sample_lojasiewicz_constant(double level, const TransportParams& params, const MarkovChain& chain,
                                   int samples = 200, std::uint64_t seed = 0);

/// Local constant C1 from the second-order expansion at 1 (uses the spectral
/// gap lambda2 of K and ||p - 1||_{w,2}).
double local_lojasiewicz_constant(const TransportParams& params, const MarkovChain& chain, double spectral_gap);

/// Right derivative of t -> min_x eta_t(x): min of `rates` over the argmin
/// set of `values` (ties within 1e-12 (1 + |min|)).
double argmin_envelope_rate(const Vector& values, const Vector& rates);

}  // namespace mcot
