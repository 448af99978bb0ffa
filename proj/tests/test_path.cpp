#include "doctest.h"
#include "mcot/error.hpp"
#include "mcot/path.hpp"
#include "support.hpp"

using namespace mcot;
using testing::vec;

namespace {

DiscretePath uniform_path(const std::vector<Vector>& measures, const std::vector<Vector>& potentials,
                          const std::vector<double>& sources) {
  DiscretePath path;
  const int n = static_cast<int>(measures.size()) - 1;
  for (int k = 0; k <= n; ++k) {
    path.times.push_back(static_cast<double>(k) / n);
    path.measures.emplace_back(measures[k]);
  }
  path.potentials = potentials;
  path.sources = sources;
  return path;
}

DiscretePath random_path(testing::Rng& rng, const MarkovChain& chain, const TransportParams& params, int n) {
  std::vector<Vector> measures;
  for (int k = 0; k <= n; ++k) measures.push_back(testing::random_vector(rng, chain.size(), 0.2, 2.0));
  DiscretePath path = uniform_path(measures, {}, {});
  fill_tangents(path, params, chain);
  return path;
}

}  // namespace

TEST_CASE("continuity residual examples") {
  testing::Rng rng(41);
  const auto chain = testing::random_chain(rng);
  const auto params = testing::random_params(rng, chain);
  const int n = chain.size();
  const Vector mu = testing::random_vector(rng, n, 0.5, 1.5);

  const DiscretePath constant = uniform_path({mu, mu, mu}, {Vector::Zero(n), Vector::Zero(n)}, {0.0, 0.0});
  CHECK(continuity_residual(constant, params, chain) == 0.0);

  const double s = 0.3;
  DiscretePath source = uniform_path({mu, mu + 0.5 * s * params.p, mu + s * params.p},
                                     {Vector::Zero(n), Vector::Zero(n)}, {s, s});
  CHECK(continuity_residual(source, params, chain) <= 1e-14);

  Vector bump = Vector::Zero(n);
  bump(0) = 1.0;
  bump(1) = -1.0;
  DiscretePath small = source, large = source;
  small.potentials[0] = 1e-3 * bump;
  large.potentials[0] = 2e-3 * bump;
  const double r1 = continuity_residual(small, params, chain);
  const double r2 = continuity_residual(large, params, chain);
  CHECK(r1 > 0.0);
  CHECK(r2 == doctest::Approx(2.0 * r1).epsilon(1e-6));
}

TEST_CASE("action examples") {
  const auto pair = testing::symmetric_pair();
  const auto params = make_params(1.3, 0.6, Vector::Ones(2), pair);
  const Vector one = Vector::Ones(2);

  const DiscretePath zero = uniform_path({one, one, one}, {Vector::Zero(2), Vector::Zero(2)}, {0.0, 0.0});
  CHECK(action_quad(zero, params, pair) == 0.0);
  CHECK(action_linsq(zero, params, pair) == 0.0);

  const double s = 0.4;
  const DiscretePath source =
      uniform_path({one, one + 0.5 * s * one, one + s * one}, {Vector::Zero(2), Vector::Zero(2)}, {s, s});
  CHECK(action_quad(source, params, pair) == doctest::Approx(1.3 * 1.3 * s * s));

  // Midpoints stay at 1, where [A psi, psi] = 1 for psi = (1, -1).
  const Vector psi = vec({1.0, -1.0});
  const DiscretePath swirl = uniform_path({one, one, one}, {psi, psi}, {0.0, 0.0});
  CHECK(action_quad(swirl, params, pair) == doctest::Approx(0.36));
  CHECK(action_linsq(swirl, params, pair) == doctest::Approx(0.36));

  const auto unit = make_params(1.0, 1.0, Vector::Ones(2), pair);
  const DiscretePath bursty =
      uniform_path({one, one + s * one, one + s * one}, {Vector::Zero(2), Vector::Zero(2)}, {2 * s, 0.0});
  CHECK(action_quad(bursty, unit, pair) == doctest::Approx(2 * s * s));
  CHECK(action_linsq(bursty, unit, pair) == doctest::Approx(s * s));
}

TEST_CASE("three-phase path") {
  testing::Rng rng(43);
  for (double a : {0.5, 1.0, 2.0}) {
    const auto chain = testing::random_chain(rng);
    const auto params = testing::random_params(rng, chain, a, 1.0);
    const Density one = Density::ones(chain.size());
    const double eps = 0.1;
    const DiscretePath path = three_phase_path(one, one, eps, 8, params, chain);
    CHECK(action_quad(path, params, chain) == doctest::Approx(6 * a * a * eps * eps).epsilon(1e-10));
    CHECK(continuity_residual(path, params, chain) <= 1e-10);
  }

  const auto chain = testing::random_chain(rng);
  const auto params = testing::random_params(rng, chain);
  const int n = chain.size();
  const Density mu0(testing::random_vector(rng, n, 0.0, 2.0));
  Vector v1 = testing::random_vector(rng, n, 0.0, 2.0);
  v1(0) = 0.0;
  const Density mu1(v1);
  for (const auto& [start, end] : {std::pair{mu0, mu1}, std::pair{mu1, mu0}}) {
    const DiscretePath path = three_phase_path(start, end, 0.2, 6, params, chain);
    CHECK(path.measures.front().values == start.values);
    CHECK(path.measures.back().values == end.values);
    CHECK(continuity_residual(path, params, chain) <= 1e-10);
    for (int k = 1; k < path.intervals(); ++k) CHECK(path.measures[k].values.minCoeff() > 0.0);
  }

  const Density low(testing::random_vector(rng, n, 0.2, 0.5));
  const Density high(testing::random_vector(rng, n, 1.0, 2.0));
  const double eps = 0.15;
  const Density lifted = three_phase_measure(low, high, eps, 1.0 / 3.0, params, chain);
  CHECK(mass(lifted, chain) == doctest::Approx(mass(high, chain) + eps).epsilon(1e-12));
}

TEST_CASE("Jensen inequality between the two actions") {
  testing::Rng rng(47);
  for (int i = 0; i < 50; ++i) {
    const auto chain = testing::random_chain(rng);
    const auto params = testing::random_params(rng, chain);
    const DiscretePath path = random_path(rng, chain, params, 6);
    CHECK(action_linsq(path, params, chain) <= action_quad(path, params, chain) * (1 + 1e-12));
  }
}

TEST_CASE("reparameterization") {
  testing::Rng rng(53);
  const auto chain = testing::random_chain(rng);
  const auto params = testing::random_params(rng, chain);
  const DiscretePath path = random_path(rng, chain, params, 5);

  const DiscretePath same = reparameterize(path, {0.0, 1.0});
  CHECK(same.sources == path.sources);

  const DiscretePath slow = reparameterize(path, {0.0, 2.0});
  CHECK(slow.sources[2] == doctest::Approx(0.5 * path.sources[2]));
  CHECK((slow.potentials[1] - 0.5 * path.potentials[1]).norm() <= 1e-14);
  CHECK(action_linsq(slow, params, chain) == doctest::Approx(action_linsq(path, params, chain)).epsilon(1e-12));
  CHECK(continuity_residual(slow, params, chain) <= 1e-10);

  const DiscretePath back = reparameterize(reparameterize(path, {0.0, 3.0}), {0.0, 1.0});
  for (int k = 0; k <= path.intervals(); ++k) CHECK(std::abs(back.times[k] - path.times[k]) <= 1e-14);
  for (int k = 0; k < path.intervals(); ++k) {
    CHECK(std::abs(back.sources[k] - path.sources[k]) <= 1e-14 * (1 + std::abs(path.sources[k])));
    CHECK((back.potentials[k] - path.potentials[k]).lpNorm<Eigen::Infinity>() <= 1e-14 * 10);
  }

  for (int i = 0; i < 20; ++i) {
    const DiscretePath p = random_path(rng, chain, params, 4);
    const double lo = testing::uniform(rng, -5, 5);
    const double hi = lo + testing::uniform(rng, 0.1, 10);
    CHECK(std::abs(action_linsq(reparameterize(p, {lo, hi}), params, chain) - action_linsq(p, params, chain)) <=
          1e-12 * action_linsq(p, params, chain));
  }
}

TEST_CASE("reversed paths keep the action") {
  testing::Rng rng(59);
  const auto chain = testing::random_chain(rng);
  const auto params = testing::random_params(rng, chain);
  const DiscretePath path = random_path(rng, chain, params, 5);
  const DiscretePath rev = reverse_path(path);
  CHECK(rev.measures.front().values == path.measures.back().values);
  CHECK(continuity_residual(rev, params, chain) <= 1e-10);
  CHECK(action_quad(rev, params, chain) == doctest::Approx(action_quad(path, params, chain)).epsilon(1e-12));
}

TEST_CASE("epsilon lift") {
  CHECK(epsilon_lift(Density::ones(3), 0.3).values.isApprox(Vector::Ones(3)));
  const Density lifted = epsilon_lift(Density(vec({2.0, 0.0})), 0.5);
  CHECK(lifted(0) == 1.5);
  CHECK(lifted(1) == 0.5);
  CHECK_THROWS_AS(epsilon_lift(Density::ones(2), 1.0), Error);
  testing::Rng rng(61);
  const auto chain = testing::random_chain(rng);
  const Density mu(testing::random_vector(rng, chain.size(), 0, 3));
  CHECK(mass(epsilon_lift(mu, 0.2), chain) == doctest::Approx(0.8 * mass(mu, chain) + 0.2).epsilon(1e-14));
}
