#include "mcot/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace mcot {

namespace {

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

// Two-loop recursion: returns -H g.
Eigen::VectorXd search_direction(const std::deque<CurvaturePair>& history, const Eigen::VectorXd& g) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(history.size());
  for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
    alpha[i] = history[i].rho * history[i].s.dot(q);
    q -= alpha[i] * history[i].y;
  }
  if (!history.empty()) {
    const auto& last = history.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double beta = history[i].rho * history[i].y.dot(q);
    q += (alpha[i] - beta) * history[i].s;
  }
  return -q;
}

}  // namespace

LbfgsResult minimize_lbfgs(const ObjectiveFn& objective, const GradientFn& gradient, Eigen::VectorXd x0,
                           const LbfgsOptions& options) {
  LbfgsResult result;
  Eigen::VectorXd x = std::move(x0);
  double fx = objective(x);
  result.trace.emplace_back(0, fx);
  if (!std::isfinite(fx)) {
    result.x = x;
    result.value = fx;
    result.stop_reason = "infeasible start";
    return result;
  }

  Eigen::VectorXd g(x.size());
  gradient(x, fx, g);
  std::deque<CurvaturePair> history;
  std::vector<double> values{fx};

  int iter = 0;
  result.converged = false;
  result.stop_reason = "max_iters";
  while (iter < options.max_iters) {
    if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tol) {
      result.converged = true;
      result.stop_reason = "gradient";
      break;
    }
    Eigen::VectorXd dir = search_direction(history, g);
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      history.clear();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = history.empty() ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>()) : 1.0;

    Eigen::VectorXd x_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      x_new = x + step * dir;
      f_new = objective(x_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope && f_new < fx) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!history.empty()) {
        history.clear();
        continue;
      }
      result.converged = true;
      result.stop_reason = "line search stalled";
      break;
    }

    ++iter;
    Eigen::VectorXd g_new(x.size());
    gradient(x_new, f_new, g_new);
    CurvaturePair pair{x_new - x, g_new - g, 0.0};
    const double sy = pair.s.dot(pair.y);
    if (sy > 1e-16 * pair.s.norm() * pair.y.norm()) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > options.memory) history.pop_front();
    }
    x = std::move(x_new);
    fx = f_new;
    g = std::move(g_new);
    values.push_back(fx);
    result.trace.emplace_back(iter, fx);

    if (static_cast<int>(values.size()) > options.window) {
      const double before = values[values.size() - 1 - options.window];
      if (before - fx <= options.tol * std::max(std::abs(fx), 1e-300)) {
        result.converged = true;
        result.stop_reason = "relative improvement";
        break;
      }
    }
  }
  result.x = std::move(x);
  result.value = fx;
  result.iterations = iter;
  return result;
}

}  // namespace mcot
