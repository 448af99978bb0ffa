#pragma once

#include "mcot/chain.hpp"

namespace mcot {

/// Nonnegative (or strictly positive) mass density on the states.
/// Membership in M / M+ is checked by classify(), not enforced on construction.
struct Density {
  Vector values;

  Density() = default;
  explicit Density(Vector v) : values(std::move(v)) {}

  static Density ones(int n) { return Density(Vector::Ones(n)); }

  int size() const noexcept { return static_cast<int>(values.size()); }
  double operator()(int x) const { return values(x); }
};

enum class DensityClass { Negative, Nonnegative, StrictlyPositive };

DensityClass classify(const Density& mu, double positive_threshold = 0.0);

/// Throws NotStrictlyPositive unless every entry exceeds `threshold`.
void require_strictly_positive(const Density& mu, double threshold = 1e-12);
/// Throws NegativeInput if any entry is negative or not finite.
void require_nonnegative(const Density& mu);

/// Real function on ordered pairs of states, stored densely.
struct EdgeField {
  Matrix values;

  EdgeField() = default;
  explicit EdgeField(Matrix m) : values(std::move(m)) {}

  static EdgeField zero(int n) { return EdgeField(Matrix::Zero(n, n)); }

  int size() const noexcept { return static_cast<int>(values.rows()); }
  double operator()(int x, int y) const { return values(x, y); }
};

/// Logarithmic mean: v if u == v, 0 if either argument is 0, otherwise
/// (u - v) / (log u - log v). Throws NegativeInput for negative arguments.
double log_mean(double u, double v);

/// Mobility field mu_hat(x,y) = log_mean(mu(x), mu(y)).
EdgeField mobility(const Density& mu);

/// grad psi (x,y) = psi(y) - psi(x)
EdgeField gradient(const Vector& psi);

/// (div Psi)(x) = 1/2 sum_y (Psi(x,y) - Psi(y,x)) K(x,y)
Vector divergence(const EdgeField& field, const MarkovChain& chain);

/// div(grad psi), which equals (K - I) psi.
Vector laplacian(const Vector& psi, const MarkovChain& chain);

/// sum_x phi(x) psi(x) w(x)
double inner_node(const Vector& phi, const Vector& psi, const MarkovChain& chain);

/// ||psi||_{w,1}
double l1_norm(const Vector& psi, const MarkovChain& chain);

/// ||psi||_{w,2}
double l2_norm(const Vector& psi, const MarkovChain& chain);

/// Total mass [mu, w].
double mass(const Density& mu, const MarkovChain& chain);

/// 1/2 sum_{x,y} Phi(x,y) Psi(x,y) K(x,y) w(x)
double inner_edge(const EdgeField& phi, const EdgeField& psi, const MarkovChain& chain);

/// <Phi, mu_hat * Psi>_w
double inner_mu(const EdgeField& phi, const EdgeField& psi, const Density& mu, const MarkovChain& chain);

/// Elementwise product mu_hat * Psi.
EdgeField weight_by_mobility(const EdgeField& field, const Density& mu);

/// Largest |Phi(x,y) - Psi(x,y)| over pairs carrying flux, i.e. with
/// mu_hat(x,y) K(x,y) > 1e-14. Fields are compared as elements of the
/// quotient space only through this support.
double support_distance(const EdgeField& phi, const EdgeField& psi, const Density& mu, const MarkovChain& chain);

}  // namespace mcot
