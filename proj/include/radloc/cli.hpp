#pragma once

#include <ostream>

namespace radloc {

/// Entry point of the radloc binary. Machine-readable output goes to `out`,
/// diagnostics to `err`. Returns 0 on success, 1 on a runtime failure and 2 on
/// a usage or configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace radloc
