#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sadic::cli {

/// Runs one command line (args excludes the program name). Reports go to
/// out, diagnostics to err. Returns 0 on success, 1 on validation or
/// numerical failure (an error JSON is written to out), 2 when a resource
/// cap is hit.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sadic::cli
