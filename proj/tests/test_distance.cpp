#include "doctest.h"
#include "mcot/distance.hpp"
#include "mcot/error.hpp"
#include "mcot/oracle.hpp"
#include "support.hpp"

using namespace mcot;
using testing::vec;

TEST_CASE("pure-source endpoints give the exact distance") {
  testing::Rng rng(71);
  for (int i = 0; i < 3; ++i) {
    const auto chain = testing::random_chain(rng, 2, 6);
    const auto params = testing::random_params(rng, chain);
    const Density mu0(testing::random_vector(rng, chain.size(), 0.3, 1.5) + 0.3 * params.p);
    const Density mu1(mu0.values + 0.2 * params.p);
    const auto est = estimate_distance(mu0, mu1, params, chain);
    CHECK(est.lower_bound == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(est.upper_bound >= 0.2 - 1e-9);
    CHECK(est.upper_bound <= 0.202);
  }
}

TEST_CASE("equal endpoints") {
  testing::Rng rng(73);
  const auto chain = testing::random_chain(rng, 3, 6);
  const auto params = testing::random_params(rng, chain);
  const Density mu(testing::random_vector(rng, chain.size(), 0.3, 2.0));
  const auto est = estimate_distance(mu, mu, params, chain);
  CHECK(est.upper_bound <= 1e-6);
  CHECK(est.lower_bound == 0.0);
}

TEST_CASE("symmetric pair matches the brute-force oracle") {
  const auto pair = testing::symmetric_pair();
  const double reference = oracle::two_state_swap_distance(1.0, 0.5, 1.0, 1.0);
  const auto params = make_params(1.0, 1.0, Vector::Ones(2), pair);
  const auto est = estimate_distance(Density(vec({1.5, 0.5})), Density(vec({0.5, 1.5})), params, pair);
  CHECK(std::abs(est.upper_bound / reference - 1.0) <= 0.02);
}

TEST_CASE("estimate is deterministic and its trace decreases") {
  testing::Rng rng(79);
  const auto chain = testing::random_chain(rng, 3, 5);
  const auto params = testing::random_params(rng, chain);
  const Density mu0(testing::random_vector(rng, chain.size(), 0.3, 2.0));
  const Density mu1(testing::random_vector(rng, chain.size(), 0.3, 2.0));
  DistanceOptions opts;
  opts.seed = 5;
  const auto first = estimate_distance(mu0, mu1, params, chain, opts);
  const auto second = estimate_distance(mu0, mu1, params, chain, opts);
  CHECK(first.upper_bound == second.upper_bound);
  CHECK(first.optimizer_trace == second.optimizer_trace);
  for (std::size_t i = 1; i < first.optimizer_trace.size(); ++i) {
    CHECK(first.optimizer_trace[i].second < first.optimizer_trace[i - 1].second);
  }
  CHECK(first.lower_bound <= first.upper_bound + 1e-9);
  CHECK(first.restarts_used == 4);
  CHECK(first.path.intervals() == 32);
  CHECK(first.path.measures.front().values == mu0.values);
  CHECK(first.path.measures.back().values == mu1.values);
  CHECK(continuity_residual(first.path, params, chain) <= 1e-8);
}

TEST_CASE("endpoints on the boundary") {
  testing::Rng rng(83);
  const auto chain = testing::random_chain(rng, 3, 5);
  const auto params = testing::random_params(rng, chain);
  Vector v0 = testing::random_vector(rng, chain.size(), 0.3, 2.0);
  Vector v1 = testing::random_vector(rng, chain.size(), 0.3, 2.0);
  v0(0) = 0.0;
  v1(1) = 0.0;
  const auto est = estimate_distance(Density(v0), Density(v1), params, chain);
  CHECK(std::isfinite(est.upper_bound));
  CHECK(est.upper_bound >= est.lower_bound - 1e-9);
  CHECK(est.min_interior > 0.0);
}

TEST_CASE("mesh refinement converges at second order") {
  // The midpoint rule is convex in the measure, so refinement can raise the
  // discrete optimum slightly; successive changes shrink by about four.
  testing::Rng rng(89);
  const auto chain = testing::random_chain(rng, 3, 4);
  const auto params = make_params(1.0, 1.0, Vector::Ones(chain.size()), chain);
  const Density mu0(testing::random_vector(rng, chain.size(), 0.3, 1.8));
  const Density mu1(testing::random_vector(rng, chain.size(), 0.3, 1.8));
  std::vector<double> values;
  for (int steps : {8, 16, 32}) {
    DistanceOptions opts;
    opts.n_steps = steps;
    values.push_back(estimate_distance(mu0, mu1, params, chain, opts).upper_bound);
  }
  const double d1 = values[1] - values[0];
  const double d2 = values[2] - values[1];
  CHECK(std::abs(d1) <= 1e-3 * values[0]);
  CHECK(std::abs(d2) <= 0.5 * std::abs(d1) + 1e-9);
}

TEST_CASE("option validation") {
  const auto pair = testing::symmetric_pair();
  const auto params = make_params(1.0, 1.0, Vector::Ones(2), pair);
  DistanceOptions opts;
  opts.n_steps = 1;
  CHECK_THROWS_AS(estimate_distance(Density::ones(2), Density::ones(2), params, pair, opts), Error);
  CHECK_THROWS_AS(estimate_distance(Density(vec({1.0, -1.0})), Density::ones(2), params, pair), Error);
}

TEST_CASE("discrete action of an explicit path") {
  const auto pair = testing::symmetric_pair();
  const auto params = make_params(2.0, 1.0, Vector::Ones(2), pair);
  std::vector<Density> measures;
  for (int k = 0; k <= 4; ++k) measures.emplace_back(Vector::Constant(2, 1.0 + 0.1 * k));
  CHECK(discrete_path_action(measures, params, pair) == doctest::Approx(4.0 * 0.16).epsilon(1e-12));
}

TEST_CASE("L1 comparison constants") {
  testing::Rng rng(97);
  const auto chain = testing::random_chain(rng, 3, 5);
  const auto params = testing::random_params(rng, chain, 0.7, 1.3);
  const Density mu(testing::random_vector(rng, chain.size(), 0.3, 2.0));
  const auto same = l1_bounds(mu, mu, params, chain, 0.0);
  const double expected = 1 / 0.7 + std::sqrt(2 * mass(mu, chain) / chain.min_stationary()) / 1.3;
  CHECK(same.c == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::isfinite(same.C));
  CHECK(same.samples == 256 + 2);

  for (int i = 0; i < 3; ++i) {
    const Density mu0(testing::random_vector(rng, chain.size(), 0.3, 2.0));
    const Density mu1(testing::random_vector(rng, chain.size(), 0.3, 2.0));
    const double w = estimate_distance(mu0, mu1, params, chain).upper_bound;
    const auto bounds = l1_bounds(mu0, mu1, params, chain, w);
    CHECK(bounds.lower_holds);
    CHECK(bounds.upper_holds);
  }
}

TEST_CASE("operator norm product") {
  const auto pair = testing::symmetric_pair();
  // A = [[.25,-.25],[-.25,.25]] has norm 1/2; B restricted acts as 1 on (1,-1)/sqrt 2.
  CHECK(operator_norm_product(Density::ones(2), pair) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(std::isinf(operator_norm_product(Density(vec({1.0, 0.0})), pair)));
}
