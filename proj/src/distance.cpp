#include "mcot/distance.hpp"

#include "mcot/error.hpp"
#include "mcot/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mcot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// dt * g_mid(rho, rho) for the segment left -> right. The potential solves
// (A_mid + c 11^T) psi = diag(w) (rho - h p); the rank-one term only fixes the
// additive constant, which the energy psi^T diag(w) (rho - h p) ignores.
double interval_cost(const Vector& left, const Vector& right, double dt, const TransportParams& params,
                     const MarkovChain& chain) {
  const int n = chain.size();
  const Vector rho = (right - left) / dt;
  const Vector& w = chain.stationary();
  const double h = rho.dot(w);
  double transport = 0.0;
  if (n > 1) {
    const Vector rhs = w.cwiseProduct(rho - h * params.p);
    const Matrix& k = chain.kernel();
    Matrix m = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) {
      for (int y = x + 1; y < n; ++y) {
        if (k(x, y) == 0.0) continue;
        const double c = k(x, y) * w(x) * log_mean(0.5 * (left(x) + right(x)), 0.5 * (left(y) + right(y)));
        m(x, y) -= c;
        m(y, x) -= c;
        m(x, x) += c;
        m(y, y) += c;
      }
    }
    const double shift = m.diagonal().mean();
    if (!(shift > 0.0)) return kInf;
    m.array() += shift / n;
    const Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) return kInf;
    const Vector diag = Matrix(llt.matrixL()).diagonal();
    const double ratio = diag.maxCoeff() / diag.minCoeff();
    if (!(ratio * ratio < 1e12)) return kInf;
    transport = llt.solve(rhs).dot(rhs);
  }
  return dt * (params.a * params.a * h * h + params.b * params.b * transport);
}

class PathObjective {
 public:
  PathObjective(const Density& mu0, const Density& mu1, int n_steps, const TransportParams& params,
                const MarkovChain& chain)
      : mu0_(mu0.values), mu1_(mu1.values), n_steps_(n_steps), dt_(1.0 / n_steps), params_(params), chain_(chain) {}

  int dimension() const { return chain_.size() * (n_steps_ - 1); }

  Vector node(const Vector& u, int k) const {
    if (k == 0) return mu0_;
    if (k == n_steps_) return mu1_;
    return u.segment(static_cast<Eigen::Index>(k - 1) * chain_.size(), chain_.size()).array().exp().matrix();
  }

  double operator()(const Vector& u) const {
    double total = 0.0;
    Vector left = node(u, 0);
    for (int k = 0; k < n_steps_; ++k) {
      Vector right = node(u, k + 1);
      total += interval_cost(left, right, dt_, params_, chain_);
      if (!std::isfinite(total)) return kInf;
      left = std::move(right);
    }
    return total;
  }

  // Central differences; node k only touches intervals k-1 and k.
  void gradient(const Vector& u, Vector& g) const {
    const int n = chain_.size();
    g.resize(u.size());
    for (int k = 1; k < n_steps_; ++k) {
      const Vector prev = node(u, k - 1);
      const Vector next = node(u, k + 1);
      Vector current = node(u, k);
      for (int x = 0; x < n; ++x) {
        const Eigen::Index idx = static_cast<Eigen::Index>(k - 1) * n + x;
        const double base = u(idx);
        const double step = 1e-6 * (1.0 + std::abs(base));
        const double up = base + step;
        const double down = base - step;

        current(x) = std::exp(up);
        const double f_up = interval_cost(prev, current, dt_, params_, chain_) +
                            interval_cost(current, next, dt_, params_, chain_);
        current(x) = std::exp(down);
        const double f_down = interval_cost(prev, current, dt_, params_, chain_) +
                              interval_cost(current, next, dt_, params_, chain_);
        current(x) = std::exp(base);
        double f_mid = 0.0;
        if (!std::isfinite(f_up) || !std::isfinite(f_down)) {
          f_mid = interval_cost(prev, current, dt_, params_, chain_) +
                  interval_cost(current, next, dt_, params_, chain_);
        }
        if (std::isfinite(f_up) && std::isfinite(f_down)) {
          g(idx) = (f_up - f_down) / (up - down);
        } else if (std::isfinite(f_up)) {
          g(idx) = (f_up - f_mid) / (up - base);
        } else if (std::isfinite(f_down)) {
          g(idx) = (f_mid - f_down) / (base - down);
        } else {
          g(idx) = 0.0;
        }
      }
    }
  }

 private:
  Vector mu0_;
  Vector mu1_;
  int n_steps_;
  double dt_;
  const TransportParams& params_;
  const MarkovChain& chain_;
};

// Interior measures of the three-phase path between the eps-lifted endpoints.
std::vector<Vector> three_phase_interior(const Density& mu0, const Density& mu1, int n_steps, double eps,
                                         const TransportParams& params, const MarkovChain& chain) {
  const Density lift0 = epsilon_lift(mu0, eps);
  const Density lift1 = epsilon_lift(mu1, eps);
  const bool increasing = mass(lift1, chain) >= mass(lift0, chain);
  std::vector<Vector> out;
  for (int k = 1; k < n_steps; ++k) {
    const double t = static_cast<double>(k) / n_steps;
    out.push_back(increasing ? three_phase_measure(lift0, lift1, eps, t, params, chain).values
                             : three_phase_measure(lift1, lift0, eps, 1.0 - t, params, chain).values);
  }
  return out;
}

Vector initial_point(const Density& mu0, const Density& mu1, int restart, const DistanceOptions& opts,
                     const TransportParams& params, const MarkovChain& chain) {
  const int n = chain.size();
  const int steps = opts.n_steps;
  const auto phased = three_phase_interior(mu0, mu1, steps, opts.init_eps, params, chain);
  Vector u(static_cast<Eigen::Index>(n) * (steps - 1));
  if (restart == 0) {
    for (int k = 1; k < steps; ++k) u.segment((k - 1) * n, n) = phased[k - 1].array().log().matrix();
    return u;
  }
  if (restart == 1) {
    // Straight line; states empty at both ends follow the lifted line instead.
    const Density lift0 = epsilon_lift(mu0, opts.init_eps);
    const Density lift1 = epsilon_lift(mu1, opts.init_eps);
    for (int k = 1; k < steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      for (int x = 0; x < n; ++x) {
        double v = (1.0 - t) * mu0(x) + t * mu1(x);
        if (!(v > 1e-12)) v = (1.0 - t) * lift0(x) + t * lift1(x);
        u((k - 1) * n + x) = std::log(v);
      }
    }
    return u;
  }

  std::seed_seq seq{static_cast<std::uint64_t>(opts.seed), static_cast<std::uint64_t>(restart)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const Density lift0 = epsilon_lift(mu0, opts.init_eps);
  const Density lift1 = epsilon_lift(mu1, opts.init_eps);
  const double blend = unit(rng);
  const double bump = -0.5 + 1.5 * unit(rng);
  for (int k = 1; k < steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    const Vector straight = (1.0 - t) * lift0.values + t * lift1.values;
    const Vector base = blend * straight + (1.0 - blend) * phased[k - 1];
    for (int x = 0; x < n; ++x) {
      const double noise = 0.2 * normal(rng) * std::sin(M_PI * t);
      u((k - 1) * n + x) = std::log(base(x)) + bump * std::sin(M_PI * t) + noise;
    }
  }
  return u;
}

}  // namespace

double discrete_path_action(const std::vector<Density>& measures, const TransportParams& params,
                            const MarkovChain& chain) {
  const int n = static_cast<int>(measures.size()) - 1;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    total += interval_cost(measures[k].values, measures[k + 1].values, 1.0 / n, params, chain);
  }
  return total;
}

DistanceEstimate estimate_distance(const Density& mu0, const Density& mu1, const TransportParams& params,
                                   const MarkovChain& chain, const DistanceOptions& opts) {
  if (opts.n_steps < 2) throw Error(ErrorCode::InvalidArgument, "n_steps must be at least 2");
  if (opts.restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be at least 1");
  if (mu0.size() != chain.size() || mu1.size() != chain.size()) {
    throw Error(ErrorCode::InvalidArgument, "density length does not match state count");
  }
  require_nonnegative(mu0);
  require_nonnegative(mu1);

  const PathObjective objective(mu0, mu1, opts.n_steps, params, chain);
  LbfgsOptions lbfgs;
  lbfgs.max_iters = opts.max_iters;
  lbfgs.tol = opts.tol;

  DistanceEstimate best;
  best.upper_bound = kInf;
  double best_value = kInf;
  Vector best_u;
  for (int r = 0; r < opts.restarts; ++r) {
    const Vector u0 = initial_point(mu0, mu1, r, opts, params, chain);
    auto run = minimize_lbfgs([&](const Vector& u) { return objective(u); },
                              [&](const Vector& u, double, Vector& g) { objective.gradient(u, g); }, u0, lbfgs);
    if (run.value < best_value) {
      best_value = run.value;
      best_u = run.x;
      best.optimizer_trace = std::move(run.trace);
      best.converged = run.converged;
      best.best_restart = r;
    }
  }
  if (!std::isfinite(best_value)) {
    throw Error(ErrorCode::IllConditioned, "no restart produced a finite action");
  }

  DiscretePath path;
  for (int k = 0; k <= opts.n_steps; ++k) {
    path.times.push_back(static_cast<double>(k) / opts.n_steps);
    path.measures.emplace_back(objective.node(best_u, k));
  }
  fill_tangents(path, params, chain);

  best.upper_bound = std::sqrt(std::max(0.0, best_value));
  best.lower_bound = params.a * std::abs(mass(mu1, chain) - mass(mu0, chain));
  best.n_steps = opts.n_steps;
  best.restarts_used = opts.restarts;
  best.min_interior = best_u.size() > 0 ? std::exp(best_u.minCoeff()) : 0.0;
  best.path = std::move(path);
  return best;
}

double operator_norm_product(const Density& nu, const MarkovChain& chain) {
  const int n = chain.size();
  if (n == 1) return 0.0;
  const Matrix a = assemble_A(nu, chain);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  const double a_norm = eig.eigenvalues().cwiseAbs().maxCoeff();

  // Orthonormal bases of the zero-sum space and of the w-orthogonal complement.
  const Matrix q_ones = Eigen::HouseholderQR<Matrix>(Vector::Ones(n)).householderQ();
  const Matrix q_w = Eigen::HouseholderQR<Matrix>(Matrix(chain.stationary())).householderQ();
  const Matrix restricted = q_w.rightCols(n - 1).transpose() * assemble_B(nu, chain) * q_ones.rightCols(n - 1);
  const Eigen::JacobiSVD<Matrix> svd(restricted);
  const double smallest = svd.singularValues().minCoeff();
  if (!(smallest > 0.0)) return kInf;
  return std::sqrt(a_norm) / smallest;
}

L1Bounds l1_bounds(const Density& mu0, const Density& mu1, const TransportParams& params, const MarkovChain& chain,
                   double w_hat, int samples, std::uint64_t seed) {
  if (!(w_hat >= 0.0)) throw Error(ErrorCode::InvalidArgument, "w_hat must be nonnegative");
  require_nonnegative(mu0);
  require_nonnegative(mu1);
  const Vector& w = chain.stationary();
  const double min_w = chain.min_stationary();

  L1Bounds out;
  out.l1_distance = l1_norm(mu0.values - mu1.values, chain);
  out.c = 1.0 / params.a + std::sqrt((2.0 * mass(mu0, chain) + 2.0 * w_hat / params.a) / min_w) / params.b;

  const double prefactor = params.b * (1.0 / min_w + params.p.norm());
  double worst = 0.0;
  auto consider = [&](const Density& nu) {
    worst = std::max(worst, operator_norm_product(nu, chain));
    ++out.samples;
  };
  if (classify(mu0) == DensityClass::StrictlyPositive) consider(mu0);
  if (classify(mu1) == DensityClass::StrictlyPositive) consider(mu1);

  const double radius = std::max(l1_norm(mu0.values, chain), l1_norm(mu1.values, chain));
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Vector weights(chain.size());
    for (int x = 0; x < chain.size(); ++x) weights(x) = gamma(rng);
    weights /= weights.sum();
    consider(Density(radius * weights.cwiseQuotient(w)));
  }
  out.C = params.a + prefactor * worst;
  out.lower_holds = out.l1_distance <= out.c * w_hat * (1.0 + 1e-12);
  out.upper_holds = w_hat <= out.C * out.l1_distance * (1.0 + 1e-12);
  return out;
}

}  // namespace mcot
