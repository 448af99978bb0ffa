#pragma once

#include <ostream>

namespace mcot {

/// Entry point behind the `mcot` executable. Reports go to `out`, errors and
/// human summaries to `err`. Returns 0 on success, 1 on a domain error and
/// 2 on a file, parse or usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcot
