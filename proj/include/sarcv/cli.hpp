#pragma once

#include <string>
#include <vector>

namespace sarcv {

// Command-line front end. Exit codes: 0 success, 1 validation/config error,
// 2 numerical failure.
int cli_run(const std::vector<std::string>& args);

}  // namespace sarcv
