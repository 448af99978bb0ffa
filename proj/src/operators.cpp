#include "mcot/operators.hpp"

#include "mcot/error.hpp"

#include <cmath>
#include <sstream>

namespace mcot {

TransportParams make_params(double a, double b, Vector p, const MarkovChain& chain, bool normalize_p) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidArgument, "weights a and b must be positive");
  }
  if (p.size() != chain.size()) {
    throw Error(ErrorCode::InvalidArgument, "source direction length does not match state count");
  }
  require_strictly_positive(Density(p), 0.0);
  double total = p.dot(chain.stationary());
  if (normalize_p) {
    p /= total;
    total = p.dot(chain.stationary());
  }
  if (std::abs(total - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "source direction has mass " << total << ", expected 1";
    throw Error(ErrorCode::NotInRange, os.str());
  }
  return TransportParams{a, b, std::move(p)};
}

Matrix assemble_B(const Density& mu, const MarkovChain& chain) {
  const int n = chain.size();
  const Matrix& k = chain.kernel();
  Matrix b = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      if (k(x, y) == 0.0 && k(y, x) == 0.0) continue;
      const double theta = log_mean(mu(x), mu(y));
      b(x, y) = -k(x, y) * theta;
      b(y, x) = -k(y, x) * theta;
    }
  }
  for (int x = 0; x < n; ++x) b(x, x) = -b.row(x).sum();
  return b;
}

Matrix assemble_A(const Density& mu, const MarkovChain& chain) {
  return chain.stationary().asDiagonal() * assemble_B(mu, chain);
}

RestrictedSolve solve_restricted(const Matrix& b_matrix, const Vector& nu) {
  const Eigen::Index n = b_matrix.rows();
  Matrix stacked(n + 1, n);
  stacked.topRows(n) = b_matrix;
  stacked.row(n).setOnes();
  Vector rhs(n + 1);
  rhs.head(n) = nu;
  rhs(n) = 0.0;

  Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
  const auto diag = qr.matrixR().diagonal().cwiseAbs();
  const double smallest = diag.minCoeff();
  const double condition = smallest > 0.0 ? diag.maxCoeff() / smallest : INFINITY;
  if (!(condition <= 1e12)) {
    std::ostringstream os;
    os << "restricted system condition estimate " << condition << " exceeds 1e12";
    throw Error(ErrorCode::IllConditioned, os.str());
  }
  RestrictedSolve out;
  out.psi = qr.solve(rhs);
  out.condition_estimate = condition;
  out.residual = n > 0 ? (b_matrix * out.psi - nu).cwiseAbs().maxCoeff() : 0.0;
  return out;
}

namespace {

void require_in_weighted_range(const Vector& nu, const MarkovChain& chain) {
  const double scale = 1.0 + nu.cwiseAbs().maxCoeff();
  const double mean = nu.dot(chain.stationary());
  if (std::abs(mean) > 1e-10 * scale) {
    std::ostringstream os;
    os << "right-hand side has weighted mean " << mean << ", expected 0";
    throw Error(ErrorCode::NotInRange, os.str());
  }
}

}  // namespace

Vector solve_B_restricted(const Density& mu, const Vector& nu, const MarkovChain& chain) {
  require_strictly_positive(mu);
  if (nu.size() != chain.size()) throw Error(ErrorCode::InvalidArgument, "vector length does not match state count");
  require_in_weighted_range(nu, chain);
  return solve_restricted(assemble_B(mu, chain), nu).psi;
}

TangentDecomposition decompose_tangent(const Density& mu, const Vector& rho, const TransportParams& params,
                                       const MarkovChain& chain) {
  const double h = rho.dot(chain.stationary());
  Vector psi = solve_B_restricted(mu, rho - h * params.p, chain);
  TangentDecomposition out;
  out.grad_potential = gradient(psi);
  out.source_rate = h;
  out.potential = std::move(psi);
  return out;
}

double metric_norm_sq(const TangentDecomposition& tangent, const Density& mu, const TransportParams& params,
                      const MarkovChain& chain) {
  const double transport = inner_mu(tangent.grad_potential, tangent.grad_potential, mu, chain);
  return params.a * params.a * tangent.source_rate * tangent.source_rate + params.b * params.b * transport;
}

double metric_g(const Density& mu, const Vector& rho, const Vector& xi, const TransportParams& params,
                const MarkovChain& chain) {
  const auto dr = decompose_tangent(mu, rho, params, chain);
  const auto dx = decompose_tangent(mu, xi, params, chain);
  return params.a * params.a * dr.source_rate * dx.source_rate +
         params.b * params.b * inner_mu(dr.grad_potential, dx.grad_potential, mu, chain);
}

Vector divergence_mu(const EdgeField& field, const Density& mu, const MarkovChain& chain) {
  return divergence(weight_by_mobility(field, mu), chain);
}

EdgeField project_gradient(const Density& mu, const EdgeField& field, const MarkovChain& chain) {
  // div_mu grad psi = -B_mu psi, so the normal equation reads B_mu psi = -div_mu Phi.
  const Vector rhs = -divergence_mu(field, mu, chain);
  return gradient(solve_B_restricted(mu, rhs, chain));
}

}  // namespace mcot
