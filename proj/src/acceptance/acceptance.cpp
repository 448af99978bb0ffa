#include "mcot/acceptance.hpp"

#include "mcot/distance.hpp"
#include "mcot/error.hpp"
#include "mcot/flow.hpp"
#include "mcot/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <iomanip>
#include <random>
#include <sstream>

namespace mcot {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Vector random_vector(Rng& rng, int n, double lo, double hi) {
  Vector v(n);
  for (int x = 0; x < n; ++x) v(x) = uniform(rng, lo, hi);
  return v;
}

TransportParams random_params(Rng& rng, const MarkovChain& chain, double a, double b) {
  return make_params(a, b, random_vector(rng, chain.size(), 0.5, 1.5), chain, true);
}

MarkovChain random_chain(Rng& rng, int n) { return random_reversible_chain(n, rng(), uniform(rng, 0.2, 0.8)); }

std::string describe(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << x;
  return os.str();
}

// Shared between the flow criteria.
struct FlowRun {
  FlowTrajectory traj;
  TransportParams params;
  const MarkovChain* chain = nullptr;
};

struct Context {
  std::uint64_t seed = 0;
  std::deque<MarkovChain> chains;  // owns chains referenced by flow runs
  std::vector<FlowRun> flows;
};

Rng criterion_rng(const Context& ctx, int id) {
  std::seed_seq seq{ctx.seed, static_cast<std::uint64_t>(id)};
  return Rng(seq);
}

struct Outcome {
  bool passed;
  std::string detail;
};

Outcome pure_source_distance(Context& ctx) {
  Rng rng = criterion_rng(ctx, 1);
  const double weights[] = {0.5, 1.0, 2.0};
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 20; ++i) {
    const MarkovChain chain = random_chain(rng, uniform_int(rng, 2, 10));
    const TransportParams params = random_params(rng, chain, weights[i % 3], 1.0);
    double s = 0.0;
    while (std::abs(s) < 1e-3) s = uniform(rng, -0.5, 0.5);
    // Keeps mu0 + s p nonnegative for every admissible s.
    const Density mu0(random_vector(rng, chain.size(), 0.1, 1.5) + 0.5 * params.p);
    const Density mu1(mu0.values + s * params.p);
    const auto est = estimate_distance(mu0, mu1, params, chain);
    const double exact = params.a * std::abs(s);
    const double rel = std::abs(est.upper_bound - exact) / exact;
    worst = std::max(worst, rel);
    const bool lower_ok = std::abs(est.lower_bound - exact) <= 1e-9 * exact;
    if (rel > 0.01 || !lower_ok || est.lower_bound > est.upper_bound + 1e-9) ++failures;
  }
  return {failures == 0, "20 chains, worst relative gap " + describe(worst) + ", failures " + std::to_string(failures)};
}

Outcome operator_identities(Context& ctx) {
  Rng rng = criterion_rng(ctx, 2);
  int failures = 0;
  std::string first;
  auto fail = [&](const std::string& what, int i) {
    if (failures++ == 0) first = what + " at instance " + std::to_string(i);
  };
  for (int i = 0; i < 500; ++i) {
    const MarkovChain chain = random_chain(rng, uniform_int(rng, 2, 10));
    const int n = chain.size();
    const Matrix& k = chain.kernel();
    const Vector psi = random_vector(rng, n, -2.0, 2.0);
    const Density mu(random_vector(rng, n, 0.05, 3.0));
    EdgeField field(Matrix(n, n));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) field.values(x, y) = uniform(rng, -1.0, 1.0);

    // Laplacian against the kernel directly.
    const Vector lap = laplacian(psi, chain);
    if ((lap - (k * psi - psi)).lpNorm<Eigen::Infinity>() > 1e-14 * (1.0 + psi.lpNorm<Eigen::Infinity>()) * n) {
      fail("laplacian", i);
    }

    // Integration by parts.
    const double lhs = inner_edge(gradient(psi), field, chain);
    const double rhs = -inner_node(psi, divergence(field, chain), chain);
    if (std::abs(lhs - rhs) > 1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs))) fail("integration by parts", i);

    const Matrix a_mu = assemble_A(mu, chain);
    const Matrix b_mu = assemble_B(mu, chain);
    const double scale = 1.0 + a_mu.cwiseAbs().maxCoeff();
    if ((a_mu - chain.stationary().asDiagonal() * b_mu).cwiseAbs().maxCoeff() > 1e-14 * scale) fail("A = Pi B", i);

    const double energy = inner_mu(gradient(psi), gradient(psi), mu, chain);
    const double quad = psi.dot(a_mu * psi);
    if (std::abs(energy - quad) > 1e-12 * std::max(1.0, std::abs(energy))) fail("energy identity", i);

    const Vector ones = Vector::Ones(n);
    const double kernel_defect = std::max({(a_mu * ones).lpNorm<Eigen::Infinity>(),
                                           (b_mu * ones).lpNorm<Eigen::Infinity>(),
                                           (chain.stationary().transpose() * b_mu).lpNorm<Eigen::Infinity>(),
                                           (ones.transpose() * a_mu).lpNorm<Eigen::Infinity>()});
    if (kernel_defect > 1e-12 * scale) fail("kernel vectors", i);

    for (const Matrix* m : {&a_mu, &b_mu}) {
      const Eigen::JacobiSVD<Matrix> svd(*m);
      const Vector sv = svd.singularValues();
      const int rank = static_cast<int>((sv.array() > 1e-10 * sv(0)).count());
      if (rank != n - 1) fail("rank", i);
    }
  }
  return {failures == 0,
          "500 instances x 6 identities, failures " + std::to_string(failures) + (first.empty() ? "" : " (" + first + ")")};
}

Outcome tangent_round_trip(Context& ctx) {
  Rng rng = criterion_rng(ctx, 3);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const MarkovChain chain = random_chain(rng, uniform_int(rng, 2, 10));
    const TransportParams params = random_params(rng, chain, 1.0, 1.0);
    const Density mu(random_vector(rng, chain.size(), 0.05, 3.0));
    const Vector rho = random_vector(rng, chain.size(), -1.0, 1.0);
    const auto tangent = decompose_tangent(mu, rho, params, chain);
    const Vector residual =
        rho + divergence_mu(tangent.grad_potential, mu, chain) - tangent.source_rate * params.p;
    worst = std::max(worst, residual.lpNorm<Eigen::Infinity>());
  }
  return {worst <= 1e-10, "500 instances, worst residual " + describe(worst)};
}

FlowRun run_flow(const MarkovChain& chain, const TransportParams& params, const Density& rho0, double t_max) {
  FlowOptions opts = default_flow_options(params);
  opts.t_max = t_max;
  return FlowRun{integrate_flow(rho0, params, chain, opts), params, &chain};
}

double fd_tolerance(double dt) { return std::max(1e-8, 5.0 * dt * dt); }

Outcome gradient_flow_identification(Context& ctx) {
  Rng rng = criterion_rng(ctx, 4);
  const double weights[] = {0.5, 1.0, 2.0};
  double worst_ratio = 0.0;
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    ctx.chains.push_back(random_chain(rng, uniform_int(rng, 2, 8)));
  }
  for (int i = 0; i < 20; ++i) {
    const MarkovChain& chain = ctx.chains[ctx.chains.size() - 20 + i];
    const TransportParams params = random_params(rng, chain, weights[i % 3], weights[(i / 3) % 3]);
    const Density rho0(random_vector(rng, chain.size(), 0.2, 3.0));
    FlowRun run = run_flow(chain, params, rho0, 20.0);
    const double tol = fd_tolerance(run.traj.dt);
    for (std::size_t r = 0; r < run.traj.times.size(); ++r) {
      const double err = std::abs(run.traj.entropy_rate_fd[r] + run.traj.grad_norm_sq[r]);
      worst_ratio = std::max(worst_ratio, std::isnan(err) ? INFINITY : err / tol);
      ++checked;
    }
    ctx.flows.push_back(std::move(run));
  }
  return {worst_ratio <= 1.0, std::to_string(checked) + " recorded steps, worst error / tolerance " + describe(worst_ratio)};
}

Outcome exponential_convergence(Context& ctx) {
  Rng rng = criterion_rng(ctx, 5);
  int not_converged = 0, poor_fit = 0, envelope_broken = 0;
  double min_r2 = 1.0, worst_excess = 0.0;
  for (int c = 0; c < 5; ++c) ctx.chains.push_back(random_reversible_chain(5, rng(), 0.5));
  for (int c = 0; c < 5; ++c) {
    const MarkovChain& chain = ctx.chains[ctx.chains.size() - 5 + c];
    for (int j = 0; j < 10; ++j) {
      const TransportParams params = random_params(rng, chain, 1.0, 1.0);
      const Density rho0(random_vector(rng, chain.size(), 0.2, 3.0));
      FlowRun run = run_flow(chain, params, rho0, 200.0);
      if (!run.traj.converged) ++not_converged;
      const DecayReport decay = estimate_decay(run.traj, chain);
      min_r2 = std::min(min_r2, decay.r_squared);
      if (decay.r_squared < 0.99) ++poor_fit;

      // log gap(t) + C t must not rise more than log 1.05 above its running minimum.
      double running_min = INFINITY, excess = -INFINITY;
      for (std::size_t r = 0; r < run.traj.times.size(); ++r) {
        const double gap = entropy_gap(run.traj.states[r], chain);
        if (gap < 1e-13) continue;
        const double f = std::log(gap) + decay.loja_constant * run.traj.times[r];
        running_min = std::min(running_min, f);
        excess = std::max(excess, f - running_min);
      }
      worst_excess = std::max(worst_excess, excess);
      if (excess > std::log(1.05)) ++envelope_broken;
      ctx.flows.push_back(std::move(run));
    }
  }
  std::ostringstream os;
  os << "50 runs: unconverged " << not_converged << ", r2 < 0.99 " << poor_fit << " (min " << describe(min_r2)
     << "), envelope violations " << envelope_broken << " (worst factor " << describe(std::exp(worst_excess)) << ")";
  return {not_converged == 0 && poor_fit == 0 && envelope_broken == 0, os.str()};
}

Outcome positivity_and_mass(Context& ctx) {
  int floor_breaks = 0;
  double worst_ratio = 0.0;
  for (const FlowRun& run : ctx.flows) {
    const double tol = fd_tolerance(run.traj.dt);
    for (std::size_t r = 0; r < run.traj.times.size(); ++r) {
      if (!(run.traj.min_state[r] > 0.0) || std::log(run.traj.min_state[r]) < run.traj.log_positivity_floor) {
        ++floor_breaks;
      }
      const double err = std::abs(run.traj.mass_rate_fd[r] - run.traj.source_rate[r]);
      worst_ratio = std::max(worst_ratio, std::isnan(err) ? INFINITY : err / tol);
    }
  }
  std::ostringstream os;
  os << ctx.flows.size() << " trajectories, floor violations " << floor_breaks << ", worst mass-rate error / tolerance "
     << describe(worst_ratio);
  return {!ctx.flows.empty() && floor_breaks == 0 && worst_ratio <= 1.0, os.str()};
}

Outcome metric_axioms(Context& ctx) {
  Rng rng = criterion_rng(ctx, 7);
  const MarkovChain chain = builtin_five_state_chain();
  const TransportParams params = make_params(1.0, 1.0, Vector::Ones(chain.size()), chain);
  int sym = 0, tri = 0, ident = 0, sandwich = 0;
  double worst_asym = 0.0, worst_tri = 0.0, worst_self = 0.0;
  for (int i = 0; i < 30; ++i) {
    const Density x(random_vector(rng, chain.size(), 0.3, 2.0));
    const Density y(random_vector(rng, chain.size(), 0.3, 2.0));
    const Density z(random_vector(rng, chain.size(), 0.3, 2.0));
    const double xy = estimate_distance(x, y, params, chain).upper_bound;
    const double yx = estimate_distance(y, x, params, chain).upper_bound;
    const double yz = estimate_distance(y, z, params, chain).upper_bound;
    const double xz = estimate_distance(x, z, params, chain).upper_bound;
    const double xx = estimate_distance(x, x, params, chain).upper_bound;

    const double asym = std::abs(xy - yx) / std::max(xy, yx);
    worst_asym = std::max(worst_asym, asym);
    if (asym > 0.02) ++sym;
    const double tri_ratio = xz / (xy + yz);
    worst_tri = std::max(worst_tri, tri_ratio);
    if (tri_ratio > 1.02) ++tri;
    worst_self = std::max(worst_self, xx);
    if (xx > 1e-6) ++ident;
    if (!l1_bounds(x, y, params, chain, xy).lower_holds) ++sandwich;
  }
  std::ostringstream os;
  os << "30 triples: asymmetry " << describe(worst_asym) << " (" << sym << " over 2%), triangle ratio "
     << describe(worst_tri) << " (" << tri << " over 1.02), self distance " << describe(worst_self) << " (" << ident
     << " over 1e-6), L1 bound failures " << sandwich;
  return {sym == 0 && tri == 0 && ident == 0 && sandwich == 0, os.str()};
}

Outcome scaling_degeneracy(Context&) {
  const MarkovChain chain = builtin_five_state_chain();
  const TransportParams params = make_params(1.0, 1.0, Vector::Ones(chain.size()), chain);
  Vector v0(5), v1(5);
  v0 << 1.5, 1.2, 1.0, 0.8, 0.5;
  v1 << 0.5, 0.8, 1.0, 1.2, 1.5;
  v1 *= mass(Density(v0), chain) / mass(Density(v1), chain);
  double lo = INFINITY, hi = 0.0;
  double l1_first = 0.0, l1_last = 0.0;
  std::ostringstream os;
  os << "W/sqrt(lambda):";
  for (double lambda : {1.0, 4.0, 16.0, 64.0}) {
    const Density mu0(lambda * v0), mu1(lambda * v1);
    const double scaled = estimate_distance(mu0, mu1, params, chain).upper_bound / std::sqrt(lambda);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
    os << ' ' << describe(scaled);
    const double l1 = l1_norm(mu0.values - mu1.values, chain);
    if (lambda == 1.0) l1_first = l1;
    l1_last = l1;
  }
  const double spread = (hi - lo) / lo;
  const double growth = l1_last / l1_first;
  os << ", spread " << describe(spread) << ", L1 growth " << describe(growth);
  return {spread <= 0.2 && std::abs(growth - 64.0) <= 1e-9 * 64.0, os.str()};
}

Outcome spectrum_checks(Context& ctx) {
  Rng rng = criterion_rng(ctx, 9);
  double worst_top = 0.0, worst_imag = 0.0, worst_match = 0.0, min_gap = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const MarkovChain chain = random_chain(rng, uniform_int(rng, 2, 12));
    const SpectrumReport report = weighted_spectrum(chain);
    worst_top = std::max(worst_top, std::abs(report.eigenvalues(0) - 1.0));
    min_gap = std::min(min_gap, report.spectral_gap);
    // Independent check with the unsymmetrized general eigensolver.
    const Eigen::EigenSolver<Matrix> general(chain.kernel(), false);
    const Eigen::VectorXcd ev = general.eigenvalues();
    worst_imag = std::max(worst_imag, ev.imag().cwiseAbs().maxCoeff());
    std::vector<double> re(ev.size());
    for (Eigen::Index j = 0; j < ev.size(); ++j) re[j] = ev(j).real();
    std::sort(re.begin(), re.end(), std::greater<>());
    for (std::size_t j = 0; j < re.size(); ++j) {
      worst_match = std::max(worst_match, std::abs(re[j] - report.eigenvalues(static_cast<Eigen::Index>(j))));
    }
  }
  std::ostringstream os;
  os << "100 chains: |k1 - 1| " << describe(worst_top) << ", max imaginary part " << describe(worst_imag)
     << ", solver mismatch " << describe(worst_match) << ", min gap " << describe(min_gap);
  return {worst_top <= 1e-10 && worst_imag <= 1e-10 && worst_match <= 1e-8 && min_gap > 0.0, os.str()};
}

Outcome danskin_oracle(Context& ctx) {
  Rng rng = criterion_rng(ctx, 10);
  const double steps[] = {1e-2, 1e-3, 1e-4, 1e-5};
  double slope_lo = INFINITY, slope_hi = -INFINITY, worst_final = 0.0;
  int degenerate = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = uniform_int(rng, 2, 8);
    const int ties = uniform_int(rng, 1, n);
    // eta_t(x) = c_x + r_x t + q_x t^2 + s_x sin(t); the first `ties` share the minimum.
    Vector c(n), r(n), q(n), s(n);
    for (int x = 0; x < n; ++x) {
      c(x) = x < ties ? 0.0 : uniform(rng, 0.5, 2.0);
      r(x) = uniform(rng, -1.0, 1.0);
      q(x) = uniform(rng, 0.5, 2.0) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      s(x) = uniform(rng, -0.5, 0.5);
    }
    auto eta = [&](double t) {
      Vector v(n);
      for (int x = 0; x < n; ++x) v(x) = c(x) + r(x) * t + q(x) * t * t + s(x) * std::sin(t);
      return v;
    };
    const double rate = argmin_envelope_rate(eta(0.0), r + s);
    std::vector<double> log_h, log_err;
    for (double h : steps) {
      const double fd = (eta(h).minCoeff() - eta(0.0).minCoeff()) / h;
      const double err = std::abs(fd - rate);
      log_h.push_back(std::log(h));
      log_err.push_back(std::log(std::max(err, 1e-300)));
      if (h == steps[3]) worst_final = std::max(worst_final, err);
    }
    double mx = 0, my = 0;
    for (int j = 0; j < 4; ++j) {
      mx += log_h[j] / 4;
      my += log_err[j] / 4;
    }
    double sxx = 0, sxy = 0;
    for (int j = 0; j < 4; ++j) {
      sxx += (log_h[j] - mx) * (log_h[j] - mx);
      sxy += (log_h[j] - mx) * (log_err[j] - my);
    }
    const double slope = sxy / sxx;
    if (!std::isfinite(slope)) ++degenerate;
    slope_lo = std::min(slope_lo, slope);
    slope_hi = std::max(slope_hi, slope);
  }
  std::ostringstream os;
  os << "100 envelopes: log-log error slope in [" << describe(slope_lo) << ", " << describe(slope_hi)
     << "], error at h=1e-5 " << describe(worst_final);
  return {degenerate == 0 && slope_lo >= 0.9 && slope_hi <= 1.1 && worst_final <= 1e-4, os.str()};
}

Outcome two_state_oracle(Context&) {
  struct Pair {
    double m, d, a;
  };
  const Pair pairs[] = {{1.0, 0.5, 1.0}, {1.0, 0.8, 0.3}, {1.0, 0.5, 0.5}, {2.0, 1.0, 2.0}, {1.0, 0.3, 1.0}};
  // Oracle values first, independently of the optimizer.
  std::vector<double> reference;
  for (const Pair& pr : pairs) reference.push_back(oracle::two_state_swap_distance(pr.m, pr.d, pr.a, 1.0));

  const MarkovChain chain = builtin_two_state_chain();
  double worst = 0.0;
  std::ostringstream os;
  os << "optimizer/oracle:";
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const Pair& pr = pairs[i];
    const TransportParams params = make_params(pr.a, 1.0, Vector::Ones(2), chain);
    Vector v0(2), v1(2);
    v0 << pr.m + pr.d, pr.m - pr.d;
    v1 << pr.m - pr.d, pr.m + pr.d;
    const double est = estimate_distance(Density(v0), Density(v1), params, chain).upper_bound;
    const double rel = est / reference[i] - 1.0;
    worst = std::max(worst, std::abs(rel));
    os << ' ' << describe(est) << '/' << describe(reference[i]);
  }
  os << ", worst relative gap " << describe(worst);
  return {worst <= 0.02, os.str()};
}

struct Criterion {
  int id;
  const char* title;
  double limit;
  Outcome (*run)(Context&);
};

}  // namespace

MarkovChain builtin_two_state_chain() {
  Matrix k(2, 2);
  k << 0.5, 0.5, 0.5, 0.5;
  return build_chain(k, {"s1", "s2"});
}

MarkovChain builtin_five_state_chain() {
  Matrix w(5, 5);
  w << 1.0, 1.0, 0.0, 0.0, 0.5,  //
      1.0, 0.5, 2.0, 0.0, 0.0,   //
      0.0, 2.0, 1.0, 1.5, 0.5,   //
      0.0, 0.0, 1.5, 0.5, 1.0,   //
      0.5, 0.0, 0.5, 1.0, 1.0;
  const Vector rows = w.rowwise().sum();
  return build_chain(rows.asDiagonal().inverse() * w, {"a", "b", "c", "d", "e"});
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  const Criterion criteria[] = {
      {1, "pure-source distance is exact", 60.0, pure_source_distance},
      {2, "operator identities", 30.0, operator_identities},
      {3, "tangent round trip", 10.0, tangent_round_trip},
      {4, "entropy dissipation equals squared gradient norm", 60.0, gradient_flow_identification},
      {5, "exponential convergence to equilibrium", 300.0, exponential_convergence},
      {6, "positivity floor and mass law", 0.0, positivity_and_mass},
      {7, "metric axioms", 300.0, metric_axioms},
      {8, "scaling degeneracy of the L1 comparison", 0.0, scaling_degeneracy},
      {9, "spectrum of random chains", 0.0, spectrum_checks},
      {10, "min-envelope right derivative", 0.0, danskin_oracle},
      {11, "two-state brute-force distance", 0.0, two_state_oracle},
  };
  Context ctx;
  ctx.seed = opts.seed;
  std::vector<CriterionResult> results;
  for (const Criterion& c : criteria) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), c.id) == opts.only.end()) continue;
    CriterionResult res;
    res.id = c.id;
    res.title = c.title;
    res.time_limit = c.limit;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome out = c.run(ctx);
      res.passed = out.passed;
      res.detail = out.detail;
    } catch (const std::exception& e) {
      res.passed = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit > 0.0 && res.seconds > c.limit) {
      res.passed = false;
      res.detail += " [over time budget]";
    }
    if (on_result) on_result(res);
    results.push_back(std::move(res));
  }
  return results;
}

std::string format_result(const CriterionResult& result) {
  std::ostringstream os;
  os << (result.passed ? "PASS" : "FAIL") << "  " << std::setw(2) << result.id << "  " << result.title << "  ("
     << std::fixed << std::setprecision(1) << result.seconds << " s";
  if (result.time_limit > 0.0) os << " / " << std::setprecision(0) << result.time_limit << " s";
  os << ")  " << result.detail;
  return os.str();
}

}  // namespace mcot
