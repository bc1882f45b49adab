#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace structpen {
namespace cli {

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 2 bad input, 3 numeric non-convergence.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace cli
}  // namespace structpen
