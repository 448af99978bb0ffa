#include "doctest.h"
#include "mcot/lbfgs.hpp"

#include <cmath>

using namespace mcot;

TEST_CASE("quadratic bowl") {
  Eigen::VectorXd target(3);
  target << 1.0, -2.0, 0.5;
  Eigen::VectorXd scale(3);
  scale << 1.0, 10.0, 100.0;
  auto f = [&](const Eigen::VectorXd& x) { return (x - target).cwiseProduct(scale).dot(x - target); };
  auto g = [&](const Eigen::VectorXd& x, double, Eigen::VectorXd& out) {
    out = 2.0 * (x - target).cwiseProduct(scale);
  };
  const auto res = minimize_lbfgs(f, g, Eigen::VectorXd::Zero(3));
  CHECK(res.converged);
  CHECK((res.x - target).norm() <= 1e-6);
}

TEST_CASE("Rosenbrock with a monotone trace") {
  auto f = [](const Eigen::VectorXd& x) {
    return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2);
  };
  auto g = [](const Eigen::VectorXd& x, double, Eigen::VectorXd& out) {
    out.resize(2);
    out(0) = -400 * x(0) * (x(1) - x(0) * x(0)) - 2 * (1 - x(0));
    out(1) = 200 * (x(1) - x(0) * x(0));
  };
  LbfgsOptions opts;
  opts.max_iters = 2000;
  opts.tol = 1e-14;
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto res = minimize_lbfgs(f, g, x0, opts);
  CHECK(std::abs(res.x(0) - 1.0) <= 1e-5);
  CHECK(std::abs(res.x(1) - 1.0) <= 1e-5);
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i].second < res.trace[i - 1].second);
}

TEST_CASE("infeasible regions are avoided") {
  // +inf for x <= 0; minimum of x - log x at x = 1.
  auto f = [](const Eigen::VectorXd& x) {
    return x(0) > 0 ? x(0) - std::log(x(0)) : std::numeric_limits<double>::infinity();
  };
  auto g = [](const Eigen::VectorXd& x, double, Eigen::VectorXd& out) {
    out.resize(1);
    out(0) = 1.0 - 1.0 / x(0);
  };
  Eigen::VectorXd x0(1);
  x0 << 5.0;
  const auto res = minimize_lbfgs(f, g, x0);
  CHECK(std::abs(res.x(0) - 1.0) <= 1e-4);
}

TEST_CASE("iteration cap is reported") {
  auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm() + std::pow(x(0), 4); };
  auto g = [](const Eigen::VectorXd& x, double, Eigen::VectorXd& out) {
    out = 2.0 * x;
    out(0) += 4 * std::pow(x(0), 3);
  };
  LbfgsOptions opts;
  opts.max_iters = 1;
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(4, 3.0);
  const auto res = minimize_lbfgs(f, g, x0, opts);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 1);
}
