#pragma once

#include "mcot/chain.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mcot {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  /// Wall-clock budget in seconds; 0 when the criterion has none.
  double time_limit = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  /// Criterion ids to run; empty runs all. The mass-law check reuses the
  /// trajectories of the two flow criteria that ran before it.
  std::vector<int> only;
};

/// Symmetric two-state chain K = [[1/2, 1/2], [1/2, 1/2]].
MarkovChain builtin_two_state_chain();
/// Lazy weighted walk on five states (a path with two chords).
MarkovChain builtin_five_state_chain();

/// Runs the self-check suite in order, reporting each result through
/// `on_result` as soon as it is known. Deterministic in opts.seed apart
/// from the timings.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  title  (1.2 s / 10 s)  detail"
std::string format_result(const CriterionResult& result);

}  // namespace mcot
