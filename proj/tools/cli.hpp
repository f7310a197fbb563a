#pragma once

#include <ostream>

namespace ridgeguard::cli {

/// Runs one `ridgeguard` invocation. Exit codes: 0 success / accept,
/// 1 reject (verify only), 2 error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ridgeguard::cli
