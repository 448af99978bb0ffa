#include "mcot/chain.hpp"

#include "mcot/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

namespace mcot {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RowSumError: return "RowSumError";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::NotReversible: return "NotReversible";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::NotInRange: return "NotInRange";
    case ErrorCode::NotStrictlyPositive: return "NotStrictlyPositive";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::AtEquilibrium: return "AtEquilibrium";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Parse: return "ParseError";
  }
  return "UnknownError";
}

namespace {

// Reachability from state 0 along edges of `adj` (row x -> column y).
std::vector<bool> reachable_from_zero(const Matrix& kernel, double threshold, bool transpose) {
  const int n = static_cast<int>(kernel.rows());
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  seen[0] = true;
  frontier.push(0);
  while (!frontier.empty()) {
    const int x = frontier.front();
    frontier.pop();
    for (int y = 0; y < n; ++y) {
      const double w = transpose ? kernel(y, x) : kernel(x, y);
      if (!seen[y] && w > threshold) {
        seen[y] = true;
        frontier.push(y);
      }
    }
  }
  return seen;
}

Vector stationary_least_squares(const Matrix& kernel) {
  const int n = static_cast<int>(kernel.rows());
  Matrix system(n + 1, n);
  system.topRows(n) = kernel.transpose() - Matrix::Identity(n, n);
  system.row(n).setOnes();
  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;
  Vector w = system.colPivHouseholderQr().solve(rhs);
  // One step of iterative refinement keeps the residual at roundoff level.
  const Vector r = rhs - system * w;
  w += system.colPivHouseholderQr().solve(r);
  return w / w.sum();
}

}  // namespace

bool is_irreducible(const Matrix& kernel, double threshold) {
  if (kernel.rows() == 0) return false;
  const auto forward = reachable_from_zero(kernel, threshold, false);
  const auto backward = reachable_from_zero(kernel, threshold, true);
  return std::all_of(forward.begin(), forward.end(), [](bool b) { return b; }) &&
         std::all_of(backward.begin(), backward.end(), [](bool b) { return b; });
}

MarkovChain build_chain(const Matrix& kernel, std::vector<std::string> labels) {
  if (kernel.rows() == 0 || kernel.rows() != kernel.cols()) {
    throw Error(ErrorCode::NotSquare, "kernel must be a non-empty square matrix");
  }
  const int n = static_cast<int>(kernel.rows());
  if (!labels.empty() && static_cast<int>(labels.size()) != n) {
    throw Error(ErrorCode::InvalidArgument, "label count does not match state count");
  }
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (!std::isfinite(kernel(x, y)) || kernel(x, y) < 0.0) {
        std::ostringstream os;
        os << "kernel entry (" << x << "," << y << ") = " << kernel(x, y) << " is not a nonnegative real";
        throw Error(ErrorCode::NegativeInput, os.str());
      }
    }
  }
  Matrix normalized = kernel;
  for (int x = 0; x < n; ++x) {
    const double s = kernel.row(x).sum();
    if (std::abs(s - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "row " << x << " sums to " << s;
      throw Error(ErrorCode::RowSumError, os.str());
    }
    normalized.row(x) /= s;
  }
  if (!is_irreducible(normalized)) {
    throw Error(ErrorCode::NotIrreducible, "positive-entry digraph is not strongly connected");
  }

  MarkovChain chain;
  chain.kernel_ = std::move(normalized);
  chain.stationary_ = stationary_least_squares(chain.kernel_);
  if (chain.stationary_.minCoeff() <= 0.0) {
    throw Error(ErrorCode::NotIrreducible, "stationary distribution is not strictly positive");
  }
  const Matrix& k = chain.kernel_;
  const Vector& w = chain.stationary_;
  chain.stationary_residual_ = (k.transpose() * w - w).cwiseAbs().maxCoeff();

  double defect = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      defect = std::max(defect, std::abs(k(x, y) * w(x) - k(y, x) * w(y)));
    }
  }
  chain.reversibility_defect_ = defect;
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "detailed balance defect " << defect << " exceeds 1e-10";
    throw Error(ErrorCode::NotReversible, os.str());
  }
  chain.labels_ = std::move(labels);
  return chain;
}

SpectrumReport weighted_spectrum(const MarkovChain& chain) {
  const int n = chain.size();
  const Vector sqrt_w = chain.stationary().cwiseSqrt();
  const Vector inv_sqrt_w = sqrt_w.cwiseInverse();
  Matrix s = sqrt_w.asDiagonal() * chain.kernel() * inv_sqrt_w.asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
  Vector ev = solver.eigenvalues();
  std::sort(ev.data(), ev.data() + n, std::greater<>());

  SpectrumReport report;
  report.eigenvalues = ev;
  report.spectral_gap = n > 1 ? 1.0 - ev(1) : 1.0;
  report.top_eigenvector_defect = (chain.kernel() * Vector::Ones(n) - Vector::Ones(n)).cwiseAbs().maxCoeff();
  return report;
}

MarkovChain random_reversible_chain(int n, std::uint64_t seed, double connectivity) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "random chains need n >= 2");
  if (!(connectivity > 0.0 && connectivity <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "connectivity must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Matrix weights = Matrix::Zero(n, n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i + 1 < n; ++i) {
    const double w = 0.5 + unit(rng);
    weights(order[i], order[i + 1]) = w;
    weights(order[i + 1], order[i]) = w;
  }
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      const double draw = unit(rng);
      const double w = 0.1 + unit(rng);
      if (weights(x, y) == 0.0 && draw < connectivity) {
        weights(x, y) = w;
        weights(y, x) = w;
      }
    }
    // Holding probability on about half of the states.
    const double hold = unit(rng);
    if (hold < 0.5) weights(x, x) = unit(rng);
  }

  Matrix kernel(n, n);
  for (int x = 0; x < n; ++x) kernel.row(x) = weights.row(x) / weights.row(x).sum();
  return build_chain(kernel);
}

}  // namespace mcot
