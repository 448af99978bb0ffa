#include "mcot/calculus.hpp"

#include "mcot/error.hpp"

#include <cmath>
#include <sstream>

namespace mcot {

DensityClass classify(const Density& mu, double positive_threshold) {
  bool positive = true;
  for (int x = 0; x < mu.size(); ++x) {
    const double v = mu(x);
    if (!std::isfinite(v) || v < 0.0) return DensityClass::Negative;
    if (!(v > positive_threshold)) positive = false;
  }
  return positive ? DensityClass::StrictlyPositive : DensityClass::Nonnegative;
}

void require_nonnegative(const Density& mu) {
  for (int x = 0; x < mu.size(); ++x) {
    if (!std::isfinite(mu(x)) || mu(x) < 0.0) {
      std::ostringstream os;
      os << "density entry " << x << " = " << mu(x) << " is negative";
      throw Error(ErrorCode::NegativeInput, os.str());
    }
  }
}

void require_strictly_positive(const Density& mu, double threshold) {
  for (int x = 0; x < mu.size(); ++x) {
    if (!std::isfinite(mu(x)) || !(mu(x) > threshold)) {
      std::ostringstream os;
      os << "density entry " << x << " = " << mu(x) << " is not above " << threshold;
      throw Error(ErrorCode::NotStrictlyPositive, os.str());
    }
  }
}

double log_mean(double u, double v) {
  if (u < 0.0 || v < 0.0 || std::isnan(u) || std::isnan(v)) {
    throw Error(ErrorCode::NegativeInput, "log_mean needs nonnegative arguments");
  }
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == v) return v;
  const double diff = u - v;
  const double hi = std::max(u, v);
  if (std::abs(diff) <= 1e-8 * hi) {
    // m * s / atanh(s) with s = r/2 expanded in r = (u - v)/m.
    const double m = 0.5 * (u + v);
    const double r2 = (diff / m) * (diff / m);
    return m * (1.0 - r2 / 12.0 - r2 * r2 / 180.0);
  }
  // log1p keeps the denominator accurate when u/v is close to one.
  const double lo = std::min(u, v);
  const double log_ratio = (hi < 2.0 * lo) ? std::log1p((hi - lo) / lo) : std::log(hi) - std::log(lo);
  return (hi - lo) / log_ratio;
}

EdgeField mobility(const Density& mu) {
  const int n = mu.size();
  Matrix m(n, n);
  for (int x = 0; x < n; ++x) {
    m(x, x) = log_mean(mu(x), mu(x));
    for (int y = x + 1; y < n; ++y) {
      const double t = log_mean(mu(x), mu(y));
      m(x, y) = t;
      m(y, x) = t;
    }
  }
  return EdgeField(std::move(m));
}

EdgeField gradient(const Vector& psi) {
  const int n = static_cast<int>(psi.size());
  Matrix g(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) g(x, y) = psi(y) - psi(x);
  }
  return EdgeField(std::move(g));
}

Vector divergence(const EdgeField& field, const MarkovChain& chain) {
  const Matrix& k = chain.kernel();
  const Matrix antisym = field.values - field.values.transpose();
  return 0.5 * antisym.cwiseProduct(k).rowwise().sum();
}

Vector laplacian(const Vector& psi, const MarkovChain& chain) { return divergence(gradient(psi), chain); }

double inner_node(const Vector& phi, const Vector& psi, const MarkovChain& chain) {
  return (phi.array() * psi.array() * chain.stationary().array()).sum();
}

double l1_norm(const Vector& psi, const MarkovChain& chain) {
  return psi.cwiseAbs().dot(chain.stationary());
}

double l2_norm(const Vector& psi, const MarkovChain& chain) {
  return std::sqrt(inner_node(psi, psi, chain));
}

double mass(const Density& mu, const MarkovChain& chain) { return mu.values.dot(chain.stationary()); }

double inner_edge(const EdgeField& phi, const EdgeField& psi, const MarkovChain& chain) {
  const Matrix weighted = chain.stationary().asDiagonal() * chain.kernel();
  return 0.5 * (phi.values.array() * psi.values.array() * weighted.array()).sum();
}

EdgeField weight_by_mobility(const EdgeField& field, const Density& mu) {
  return EdgeField(mobility(mu).values.cwiseProduct(field.values));
}

double inner_mu(const EdgeField& phi, const EdgeField& psi, const Density& mu, const MarkovChain& chain) {
  return inner_edge(phi, weight_by_mobility(psi, mu), chain);
}

double support_distance(const EdgeField& phi, const EdgeField& psi, const Density& mu, const MarkovChain& chain) {
  const Matrix flux = mobility(mu).values.cwiseProduct(chain.kernel());
  double worst = 0.0;
  for (int x = 0; x < flux.rows(); ++x) {
    for (int y = 0; y < flux.cols(); ++y) {
      if (x != y && flux(x, y) > 1e-14) worst = std::max(worst, std::abs(phi(x, y) - psi(x, y)));
    }
  }
  return worst;
}

}  // namespace mcot
