#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace eqhms::cli {

enum ExitCode { kOk = 0, kInputError = 1, kHypothesisError = 2, kInternalError = 3 };

// args excludes the program name.  Reports go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eqhms::cli
