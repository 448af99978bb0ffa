#pragma once

#include "mcot/chain.hpp"
#include "mcot/operators.hpp"

#include <random>

namespace testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline mcot::Vector random_vector(Rng& rng, int n, double lo, double hi) {
  mcot::Vector v(n);
  for (int x = 0; x < n; ++x) v(x) = uniform(rng, lo, hi);
  return v;
}

inline mcot::MarkovChain random_chain(Rng& rng, int lo = 2, int hi = 8) {
  const int n = std::uniform_int_distribution<int>(lo, hi)(rng);
  return mcot::random_reversible_chain(n, rng(), uniform(rng, 0.2, 0.9));
}

inline mcot::MarkovChain chain_from(std::initializer_list<std::initializer_list<double>> rows) {
  const int n = static_cast<int>(rows.size());
  mcot::Matrix k(n, n);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) k(i, j++) = v;
    ++i;
  }
  return mcot::build_chain(k);
}

inline mcot::MarkovChain symmetric_pair() { return chain_from({{0.5, 0.5}, {0.5, 0.5}}); }

inline mcot::Vector vec(std::initializer_list<double> values) {
  mcot::Vector v(static_cast<Eigen::Index>(values.size()));
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline mcot::TransportParams random_params(Rng& rng, const mcot::MarkovChain& chain, double a = 1.0, double b = 1.0) {
  return mcot::make_params(a, b, random_vector(rng, chain.size(), 0.5, 1.5), chain, true);
}

}  // namespace testing
