#include "mcot/flow.hpp"

#include "mcot/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

namespace mcot {

namespace {

// u log u - u + 1, accurate near u = 1.
double relative_entropy_density(double u) {
  if (u == 0.0) return 1.0;
  const double e = u - 1.0;
  if (std::abs(e) < 0.5) return u * std::log1p(e) - e;
  return u * std::log(u) - u + 1.0;
}

Vector log_of(const Density& mu) { return mu.values.array().log().matrix(); }

double source_pairing(const Density& mu, const TransportParams& params, const MarkovChain& chain) {
  return (log_of(mu).array() * params.p.array() * chain.stationary().array()).sum();
}

// One classical RK4 step; empty when a stage leaves the positive cone or the
// result drops below the floor.
std::optional<Vector> rk4_step(const Vector& rho, double h, double log_floor, const TransportParams& params,
                               const MarkovChain& chain) {
  auto rhs = [&](const Vector& state) -> std::optional<Vector> {
    if (!(state.minCoeff() > 0.0)) return std::nullopt;
    return heat_rhs(Density(state), params, chain);
  };
  const auto k1 = rhs(rho);
  if (!k1) return std::nullopt;
  const auto k2 = rhs(rho + 0.5 * h * *k1);
  if (!k2) return std::nullopt;
  const auto k3 = rhs(rho + 0.5 * h * *k2);
  if (!k3) return std::nullopt;
  const auto k4 = rhs(rho + h * *k3);
  if (!k4) return std::nullopt;
  Vector next = rho + (h / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
  const double lowest = next.minCoeff();
  if (!(lowest > 0.0) || std::log(lowest) < log_floor) return std::nullopt;
  return next;
}

struct Stepper {
  const TransportParams& params;
  const MarkovChain& chain;
  double log_floor;
  int max_halvings;
  int deepest = 0;

  Vector advance(const Vector& rho, double h, int depth) {
    if (auto next = rk4_step(rho, h, log_floor, params, chain)) return std::move(*next);
    if (depth >= max_halvings) {
      std::ostringstream os;
      os << "positivity monitor still failing after " << depth << " step halvings";
      throw Error(ErrorCode::StepSizeUnderflow, os.str());
    }
    deepest = std::max(deepest, depth + 1);
    const Vector half = advance(rho, 0.5 * h, depth + 1);
    return advance(half, 0.5 * h, depth + 1);
  }
};

struct LineFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace

double entropy(const Density& mu, const MarkovChain& chain) {
  require_nonnegative(mu);
  double total = 0.0;
  for (int x = 0; x < mu.size(); ++x) {
    const double v = mu(x);
    const double term = v > 0.0 ? v * std::log(v) - v : 0.0;
    total += term * chain.stationary()(x);
  }
  return total;
}

double entropy_gap(const Density& mu, const MarkovChain& chain) {
  require_nonnegative(mu);
  double total = 0.0;
  for (int x = 0; x < mu.size(); ++x) total += relative_entropy_density(mu(x)) * chain.stationary()(x);
  return total;
}

TangentDecomposition entropy_gradient(const Density& mu, const TransportParams& params, const MarkovChain& chain) {
  require_strictly_positive(mu, 0.0);
  TangentDecomposition out;
  out.potential = log_of(mu) / (params.b * params.b);
  out.grad_potential = gradient(out.potential);
  out.source_rate = source_pairing(mu, params, chain) / (params.a * params.a);
  return out;
}

double entropy_gradient_norm_sq(const Density& mu, const TransportParams& params, const MarkovChain& chain) {
  require_strictly_positive(mu, 0.0);
  const Vector logs = log_of(mu);
  const Matrix& k = chain.kernel();
  const Vector& w = chain.stationary();
  double dirichlet = 0.0;
  for (int x = 0; x < mu.size(); ++x) {
    for (int y = 0; y < mu.size(); ++y) {
      if (k(x, y) == 0.0) continue;
      dirichlet += (logs(y) - logs(x)) * (mu(y) - mu(x)) * k(x, y) * w(x);
    }
  }
  dirichlet *= 0.5;
  const double pairing = source_pairing(mu, params, chain);
  return pairing * pairing / (params.a * params.a) + dirichlet / (params.b * params.b);
}

Vector heat_rhs(const Density& rho, const TransportParams& params, const MarkovChain& chain) {
  require_strictly_positive(rho, 0.0);
  const Vector diffusion = chain.kernel() * rho.values - rho.values;
  return diffusion / (params.b * params.b) - (source_pairing(rho, params, chain) / (params.a * params.a)) * params.p;
}

FlowOptions default_flow_options(const TransportParams& params) {
  FlowOptions opts;
  opts.dt = 0.01 * std::min(params.a * params.a, params.b * params.b);
  return opts;
}

double sublevel_state_bound(const Density& rho0, const MarkovChain& chain) {
  const double target = entropy_gap(rho0, chain) / chain.min_stationary();
  // iota(u) = u log u - u + 1 is increasing on [1, inf).
  double lo = 1.0, hi = 2.0;
  while (relative_entropy_density(hi) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (relative_entropy_density(mid) < target ? lo : hi) = mid;
  }
  return std::max(hi, rho0.values.maxCoeff());
}

double log_positivity_floor(const Density& rho0, const TransportParams& params, const MarkovChain& chain) {
  const double bound = sublevel_state_bound(rho0, chain);
  const double c = params.p.dot(chain.stationary()) * std::max(0.0, std::log(bound));
  const double min_wp2 = (chain.stationary().array() * params.p.array().square()).minCoeff();
  const double exponent = -2.0 * c * params.p.maxCoeff() / min_wp2;
  return std::min(std::log(0.5 * rho0.values.minCoeff()), exponent);
}

FlowTrajectory integrate_flow(const Density& rho0, const TransportParams& params, const MarkovChain& chain,
                              const FlowOptions& opts) {
  require_strictly_positive(rho0, 0.0);
  if (rho0.size() != chain.size()) throw Error(ErrorCode::InvalidArgument, "density length does not match state count");
  if (!(opts.dt > 0.0) || !(opts.t_max >= 0.0) || opts.record_every < 1) {
    throw Error(ErrorCode::InvalidArgument, "dt must be positive, t_max nonnegative, record_every >= 1");
  }

  FlowTrajectory traj;
  traj.dt = opts.dt;
  traj.log_positivity_floor = log_positivity_floor(rho0, params, chain);
  traj.positivity_floor = std::exp(traj.log_positivity_floor);
  traj.state_bound = sublevel_state_bound(rho0, chain);

  Stepper stepper{params, chain, traj.log_positivity_floor, opts.max_halvings};
  const Vector ones = Vector::Ones(chain.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto record = [&](double t, const Vector& state) {
    const Density rho(state);
    traj.times.push_back(t);
    traj.states.push_back(rho);
    traj.entropy.push_back(entropy(rho, chain));
    traj.grad_norm_sq.push_back(entropy_gradient_norm_sq(rho, params, chain));
    traj.min_state.push_back(state.minCoeff());
    traj.mass.push_back(mass(rho, chain));
    traj.source_rate.push_back(-source_pairing(rho, params, chain) / (params.a * params.a));
    // Fourth-order central differences from probe steps at +-dt and +-2dt; the
    // floor is not enforced on the probes.
    std::optional<Vector> probes[4];
    probes[1] = rk4_step(state, opts.dt, -INFINITY, params, chain);
    probes[2] = rk4_step(state, -opts.dt, -INFINITY, params, chain);
    if (probes[1]) probes[0] = rk4_step(*probes[1], opts.dt, -INFINITY, params, chain);
    if (probes[2]) probes[3] = rk4_step(*probes[2], -opts.dt, -INFINITY, params, chain);
    if (probes[0] && probes[1] && probes[2] && probes[3]) {
      auto stencil = [&](auto&& f) {
        return (-f(*probes[0]) + 8.0 * f(*probes[1]) - 8.0 * f(*probes[2]) + f(*probes[3])) / (12.0 * opts.dt);
      };
      traj.entropy_rate_fd.push_back(stencil([&](const Vector& v) { return entropy(Density(v), chain); }));
      traj.mass_rate_fd.push_back(stencil([&](const Vector& v) { return mass(Density(v), chain); }));
    } else {
      traj.entropy_rate_fd.push_back(nan);
      traj.mass_rate_fd.push_back(nan);
    }
  };

  Vector state = rho0.values;
  traj.max_component = state.maxCoeff();
  long step = 0;
  const long max_steps = static_cast<long>(std::ceil(opts.t_max / opts.dt - 1e-9));
  record(0.0, state);
  bool recorded_last = true;
  while (true) {
    if (l2_norm(state - ones, chain) < opts.stop_tol) {
      traj.converged = true;
      break;
    }
    if (step >= max_steps) break;
    state = stepper.advance(state, opts.dt, 0);
    ++step;
    traj.max_component = std::max(traj.max_component, state.maxCoeff());
    recorded_last = false;
    if (step % opts.record_every == 0) {
      record(step * opts.dt, state);
      recorded_last = true;
    }
  }
  if (!recorded_last) record(step * opts.dt, state);
  traj.halvings_used = stepper.deepest;
  return traj;
}

double lojasiewicz_ratio(const Density& mu, const TransportParams& params, const MarkovChain& chain) {
  const double gap = entropy_gap(mu, chain);
  if (gap < 1e-14) throw Error(ErrorCode::AtEquilibrium, "entropy gap below 1e-14");
  return entropy_gradient_norm_sq(mu, params, chain) / gap;
}

DecayReport estimate_decay(const FlowTrajectory& traj, const MarkovChain& chain) {
  std::vector<std::size_t> usable;
  std::vector<double> gaps(traj.states.size());
  DecayReport report;
  report.loja_constant = INFINITY;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    gaps[i] = entropy_gap(traj.states[i], chain);
    if (gaps[i] >= 1e-13) usable.push_back(i);
    if (gaps[i] >= 1e-14) report.loja_constant = std::min(report.loja_constant, traj.grad_norm_sq[i] / gaps[i]);
  }
  if (usable.size() < 10) {
    std::ostringstream os;
    os << "only " << usable.size() << " samples with entropy gap >= 1e-13";
    throw Error(ErrorCode::InsufficientData, os.str());
  }
  const std::size_t tail = std::max<std::size_t>(10, usable.size() / 2);
  std::vector<double> ts, log_gap, log_l2;
  const Vector ones = Vector::Ones(chain.size());
  for (std::size_t j = usable.size() - tail; j < usable.size(); ++j) {
    const std::size_t i = usable[j];
    ts.push_back(traj.times[i]);
    log_gap.push_back(std::log(gaps[i]));
    log_l2.push_back(2.0 * std::log(l2_norm(traj.states[i].values - ones, chain)));
  }
  const LineFit gap_fit = fit_line(ts, log_gap);
  const LineFit l2_fit = fit_line(ts, log_l2);
  report.fitted_rate = -gap_fit.slope;
  report.r_squared = gap_fit.r_squared;
  report.l2_rate = -l2_fit.slope;
  report.l2_r_squared = l2_fit.r_squared;
  report.l2_distance_final = l2_norm(traj.states.back().values - ones, chain);
  report.samples_used = static_cast<int>(tail);
  return report;
}

double sample_lojasiewicz_constant(double level, const TransportParams& params, const MarkovChain& chain, int samples,
                                   std::uint64_t seed) {
  if (!(level > 0.0)) throw Error(ErrorCode::InvalidArgument, "sublevel must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  const int n = chain.size();
  const Vector ones = Vector::Ones(n);
  double best = INFINITY;
  for (int s = 0; s < samples; ++s) {
    Vector dir(n);
    for (int x = 0; x < n; ++x) dir(x) = normal(rng);
    dir /= dir.norm();
    // Largest admissible step along the ray: stay positive and inside the sublevel set.
    double limit = INFINITY;
    for (int x = 0; x < n; ++x) {
      if (dir(x) < 0.0) limit = std::min(limit, -1.0 / dir(x));
    }
    double lo = 0.0;
    double hi = std::isfinite(limit) ? limit * (1.0 - 1e-9) : 1.0;
    while (!std::isfinite(limit) && entropy_gap(Density(ones + hi * dir), chain) < level) hi *= 2.0;
    if (entropy_gap(Density(ones + hi * dir), chain) > level) {
      for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (entropy_gap(Density(ones + mid * dir), chain) <= level ? lo : hi) = mid;
      }
      hi = lo;
    }
    const Density mu(ones + unit(rng) * hi * dir);
    if (entropy_gap(mu, chain) < 1e-14) continue;
    best = std::min(best, lojasiewicz_ratio(mu, params, chain));
  }
  return best;
}

double local_lojasiewicz_constant(const TransportParams& params, const MarkovChain& chain, double spectral_gap) {
  const double a2 = params.a * params.a;
  const double inv_b2 = 1.0 / (params.b * params.b);
  const Vector p_perp = params.p - Vector::Ones(chain.size());
  const double p_perp_sq = inner_node(p_perp, p_perp, chain);
  if (p_perp_sq < 1e-24) return std::min(0.5 / a2, inv_b2 * spectral_gap);
  const double x = a2 * inv_b2 * spectral_gap / p_perp_sq;
  const double mass_coeff = inv_b2 * spectral_gap / p_perp_sq / (2.0 + 2.0 * x);
  const double perp_coeff = (1.0 + x) * inv_b2 * spectral_gap / (2.0 + x);
  return std::min(mass_coeff, perp_coeff);
}

double argmin_envelope_rate(const Vector& values, const Vector& rates) {
  if (values.size() == 0 || values.size() != rates.size()) {
    throw Error(ErrorCode::InvalidArgument, "values and rates must be non-empty and of equal length");
  }
  const double lowest = values.minCoeff();
  const double slack = 1e-12 * (1.0 + std::abs(lowest));
  double rate = INFINITY;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) <= lowest + slack) rate = std::min(rate, rates(i));
  }
  return rate;
}

}  // namespace mcot
