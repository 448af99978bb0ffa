#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace mcot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Finite irreducible reversible Markov chain. Immutable once built; obtain
/// instances through build_chain() or random_reversible_chain().
class MarkovChain {
 public:
  int size() const noexcept { return static_cast<int>(kernel_.rows()); }
  const Matrix& kernel() const noexcept { return kernel_; }
  /// Stationary distribution, strictly positive and summing to one.
  const Vector& stationary() const noexcept { return stationary_; }
  /// max |K(x,y)w(x) - K(y,x)w(y)| over all pairs.
  double reversibility_defect() const noexcept { return reversibility_defect_; }
  /// ||w^T K - w^T||_inf
  double stationary_residual() const noexcept { return stationary_residual_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  double min_stationary() const noexcept { return stationary_.minCoeff(); }

 private:
  friend MarkovChain build_chain(const Matrix& kernel, std::vector<std::string> labels);

  Matrix kernel_;
  Vector stationary_;
  double reversibility_defect_ = 0.0;
  double stationary_residual_ = 0.0;
  std::vector<std::string> labels_;
};

struct SpectrumReport {
  Vector eigenvalues;  // descending
  double spectral_gap = 0.0;
  double top_eigenvector_defect = 0.0;
};

/// Validates a row-stochastic kernel and computes its stationary distribution.
///
/// Rows must sum to one within 1e-9 (they are renormalized exactly), the
/// positive-entry digraph must be strongly connected, and detailed balance
/// must hold to 1e-10. Throws Error with RowSumError, NotIrreducible,
/// NotReversible, NotSquare or NegativeInput.
MarkovChain build_chain(const Matrix& kernel, std::vector<std::string> labels = {});

/// Eigenvalues of K through the symmetrization diag(w)^{1/2} K diag(w)^{-1/2}.
/// For a single-state chain the spectral gap is reported as 1.
SpectrumReport weighted_spectrum(const MarkovChain& chain);

/// Random reversible chain from a symmetric weight matrix with a spanning
/// path backbone. Deterministic in (n, seed, connectivity).
MarkovChain random_reversible_chain(int n, std::uint64_t seed, double connectivity);

/// True when the digraph {(x,y) : K(x,y) > threshold} is strongly connected.
bool is_irreducible(const Matrix& kernel, double threshold = 1e-14);

}  // namespace mcot
