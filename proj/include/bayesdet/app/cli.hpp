// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bayesdet::app {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIndeterminate = 3;
inline constexpr int kExitUnachievable = 4;

// Runs the command line `args` (without the program name). Results go to
// `out` (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bayesdet::app
