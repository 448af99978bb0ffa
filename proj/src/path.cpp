#include "mcot/path.hpp"

#include "mcot/error.hpp"

#include <algorithm>
#include <cmath>

namespace mcot {

Density interval_midpoint(const DiscretePath& path, int k) {
  return Density(0.5 * (path.measures[k].values + path.measures[k + 1].values));
}

double continuity_residual(const DiscretePath& path, const TransportParams& params, const MarkovChain& chain) {
  double worst = 0.0;
  for (int k = 0; k < path.intervals(); ++k) {
    const double dt = path.times[k + 1] - path.times[k];
    const Vector velocity = (path.measures[k + 1].values - path.measures[k].values) / dt;
    const Matrix b = assemble_B(interval_midpoint(path, k), chain);
    const Vector r = velocity - b * path.potentials[k] - path.sources[k] * params.p;
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<double> action_integrand(const DiscretePath& path, const TransportParams& params,
                                     const MarkovChain& chain) {
  std::vector<double> out(path.intervals());
  const double a2 = params.a * params.a;
  const double b2 = params.b * params.b;
  for (int k = 0; k < path.intervals(); ++k) {
    const Vector& psi = path.potentials[k];
    const double transport = psi.dot(assemble_A(interval_midpoint(path, k), chain) * psi);
    out[k] = a2 * path.sources[k] * path.sources[k] + b2 * transport;
  }
  return out;
}

double action_quad(const DiscretePath& path, const TransportParams& params, const MarkovChain& chain) {
  const auto integrand = action_integrand(path, params, chain);
  double total = 0.0;
  for (int k = 0; k < path.intervals(); ++k) total += (path.times[k + 1] - path.times[k]) * integrand[k];
  return total;
}

double action_linsq(const DiscretePath& path, const TransportParams& params, const MarkovChain& chain) {
  const auto integrand = action_integrand(path, params, chain);
  double length = 0.0;
  for (int k = 0; k < path.intervals(); ++k) {
    length += (path.times[k + 1] - path.times[k]) * std::sqrt(std::max(0.0, integrand[k]));
  }
  return length * length;
}

Density three_phase_measure(const Density& mu0, const Density& mu1, double eps, double t,
                            const TransportParams& params, const MarkovChain& chain) {
  const double gain = mass(mu1, chain) - mass(mu0, chain) + eps;
  const Vector& p = params.p;
  if (t <= 1.0 / 3.0) return Density(mu0.values + 3.0 * t * gain * p);
  if (t <= 2.0 / 3.0) {
    const Vector lifted0 = mu0.values + gain * p;
    const Vector lifted1 = mu1.values + eps * p;
    return Density((2.0 - 3.0 * t) * lifted0 + (3.0 * t - 1.0) * lifted1);
  }
  return Density(mu1.values + (3.0 - 3.0 * t) * eps * p);
}

DiscretePath three_phase_path(const Density& mu0, const Density& mu1, double eps, int n_per_phase,
                              const TransportParams& params, const MarkovChain& chain) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  if (n_per_phase < 1) throw Error(ErrorCode::InvalidArgument, "n_per_phase must be positive");
  require_nonnegative(mu0);
  require_nonnegative(mu1);
  if (mass(mu1, chain) < mass(mu0, chain)) {
    return reverse_path(three_phase_path(mu1, mu0, eps, n_per_phase, params, chain));
  }

  const int n = 3 * n_per_phase;
  const double gain = mass(mu1, chain) - mass(mu0, chain) + eps;
  const Vector shift = (mu1.values - mu0.values) - (mass(mu1, chain) - mass(mu0, chain)) * params.p;

  DiscretePath path;
  path.times.resize(n + 1);
  path.measures.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    path.times[k] = t;
    path.measures[k] = three_phase_measure(mu0, mu1, eps, t, params, chain);
  }
  path.measures.front() = mu0;
  path.measures.back() = mu1;

  path.potentials.assign(n, Vector::Zero(chain.size()));
  path.sources.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    if (k < n_per_phase) {
      path.sources[k] = 3.0 * gain;
    } else if (k < 2 * n_per_phase) {
      path.potentials[k] = 3.0 * solve_B_restricted(interval_midpoint(path, k), shift, chain);
    } else {
      path.sources[k] = -3.0 * eps;
    }
  }
  return path;
}

DiscretePath reparameterize(const DiscretePath& path, std::pair<double, double> new_interval) {
  const auto [new_start, new_end] = new_interval;
  if (!(new_end > new_start)) throw Error(ErrorCode::InvalidArgument, "target interval must have positive length");
  const double start = path.start_time();
  const double ratio = (path.end_time() - start) / (new_end - new_start);

  DiscretePath out = path;
  for (std::size_t k = 0; k < out.times.size(); ++k) {
    out.times[k] = new_start + (path.times[k] - start) / ratio;
  }
  out.times.front() = new_start;
  out.times.back() = new_end;
  for (auto& psi : out.potentials) psi *= ratio;
  for (auto& h : out.sources) h *= ratio;
  return out;
}

DiscretePath reverse_path(const DiscretePath& path) {
  DiscretePath out;
  const int n = path.intervals();
  const double start = path.start_time();
  const double end = path.end_time();
  out.times.resize(n + 1);
  for (int k = 0; k <= n; ++k) out.times[k] = start + end - path.times[n - k];
  out.measures.assign(path.measures.rbegin(), path.measures.rend());
  for (int k = n - 1; k >= 0; --k) {
    out.potentials.push_back(-path.potentials[k]);
    out.sources.push_back(-path.sources[k]);
  }
  return out;
}

Density epsilon_lift(const Density& mu, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  require_nonnegative(mu);
  return Density((1.0 - eps) * mu.values + eps * Vector::Ones(mu.size()));
}

void fill_tangents(DiscretePath& path, const TransportParams& params, const MarkovChain& chain) {
  const int n = path.intervals();
  path.potentials.resize(n);
  path.sources.resize(n);
  for (int k = 0; k < n; ++k) {
    const double dt = path.times[k + 1] - path.times[k];
    const Vector velocity = (path.measures[k + 1].values - path.measures[k].values) / dt;
    auto tangent = decompose_tangent(interval_midpoint(path, k), velocity, params, chain);
    path.potentials[k] = std::move(tangent.potential);
    path.sources[k] = tangent.source_rate;
  }
}

}  // namespace mcot
