#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mcot {

struct LbfgsOptions {
  int memory = 8;
  int max_iters = 500;
  /// Stop once the objective improved by less than tol * |f| over `window` iterations.
  double tol = 1e-9;
  int window = 10;
  double gradient_tol = 1e-13;
  int max_backtracks = 40;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  /// False only when max_iters ran out while still improving.
  bool converged = false;
  std::string stop_reason;
  std::vector<std::pair<int, double>> trace;  // accepted (iteration, value)
};

/// Objective returning +inf for infeasible points; the line search backs off from them.
using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;
/// Writes the gradient at x (objective value fx already known) into g.
using GradientFn = std::function<void(const Eigen::VectorXd& x, double fx, Eigen::VectorXd& g)>;

/// Limited-memory BFGS with Armijo backtracking. The objective sequence of
/// accepted iterates is strictly decreasing.
LbfgsResult minimize_lbfgs(const ObjectiveFn& objective, const GradientFn& gradient, Eigen::VectorXd x0,
                           const LbfgsOptions& options = {});

}  // namespace mcot
