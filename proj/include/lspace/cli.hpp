#pragma once

#include <string>
#include <vector>

namespace lspace::cli {

/// Exit codes: 0 success (all assertions passed), 1 usage or input error,
/// 2 completed with a failed assertion, 3 inconclusive verdict.
int run(const std::vector<std::string>& args);

}  // namespace lspace::cli
