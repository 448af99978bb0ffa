#pragma once

#include "mcot/calculus.hpp"

namespace mcot {

/// Cost weights and source direction of the transport metric.
///
/// Invariants: a > 0, b > 0, p strictly positive with [p, w] = 1 (1e-10).
/// Build with make_params(), which validates against a chain.
struct TransportParams {
  double a = 1.0;
  double b = 1.0;
  Vector p;
};

/// Validates (or, with normalize_p, rescales p to unit mass). Throws
/// InvalidArgument, NotStrictlyPositive or NotInRange.
TransportParams make_params(double a, double b, Vector p, const MarkovChain& chain, bool normalize_p = false);

/// Velocity rho written through the continuity equation with source:
/// rho + div_mu grad psi = h p.
struct TangentDecomposition {
  EdgeField grad_potential;
  double source_rate = 0.0;
  Vector potential;  // zero-sum representative psi
};

/// A_mu(x,y) = -K(x,y) mu_hat(x,y) w(x) off the diagonal, row sums zero.
Matrix assemble_A(const Density& mu, const MarkovChain& chain);

/// B_mu(x,y) = -K(x,y) mu_hat(x,y) off the diagonal, row sums zero.
/// Satisfies A_mu = diag(w) B_mu and -B_mu psi = div(mu_hat * grad psi).
Matrix assemble_B(const Density& mu, const MarkovChain& chain);

struct RestrictedSolve {
  Vector psi;
  double condition_estimate = 1.0;
  double residual = 0.0;  // ||B psi - nu||_inf
};

/// Unique zero-sum psi with B psi = nu for an assembled B_mu (mu in M+).
/// Solves the stacked least-squares system [B; 1^T] psi = [nu; 0] by
/// column-pivoted QR. Throws IllConditioned past a condition estimate of 1e12.
RestrictedSolve solve_restricted(const Matrix& b_matrix, const Vector& nu);

/// (B_mu restricted to zero-sum vectors)^{-1} nu. Requires mu strictly
/// positive (min > 1e-12) and [nu, w] = 0 within 1e-10 (1 + ||nu||_inf).
/// Throws NotStrictlyPositive, NotInRange, IllConditioned.
Vector solve_B_restricted(const Density& mu, const Vector& nu, const MarkovChain& chain);

/// Tangent coordinates of rho at mu: h = [rho, w] and psi solving
/// B_mu psi = rho - h p, so that rho + div_mu grad psi = h p.
TangentDecomposition decompose_tangent(const Density& mu, const Vector& rho, const TransportParams& params,
                                       const MarkovChain& chain);

/// Riemannian metric a^2 h_rho h_xi + b^2 <grad psi_rho, grad psi_xi>_mu.
double metric_g(const Density& mu, const Vector& rho, const Vector& xi, const TransportParams& params,
                const MarkovChain& chain);

/// Squared metric norm of a decomposed tangent, a^2 h^2 + b^2 ||grad psi||_mu^2.
double metric_norm_sq(const TangentDecomposition& tangent, const Density& mu, const TransportParams& params,
                      const MarkovChain& chain);

/// Closest gradient field to Phi in the mu-seminorm; the remainder is
/// mu-divergence free.
EdgeField project_gradient(const Density& mu, const EdgeField& field, const MarkovChain& chain);

/// div_mu Phi = div(mu_hat * Phi)
Vector divergence_mu(const EdgeField& field, const Density& mu, const MarkovChain& chain);

}  // namespace mcot
