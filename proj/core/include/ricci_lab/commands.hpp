#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ricci_lab/scenario.hpp"

namespace rlab::cli {

enum ExitStatus : int {
  kExitOk = 0,
  kExitCheckFailure = 1,
  kExitHypothesisRefused = 2,
  kExitConfigError = 3,
};

/// flow | spectrum | verify | kappa | report
const std::vector<std::string>& command_names();

/// Every check id `verify` can emit; the summary lists each exactly once.
const std::vector<std::string>& registered_check_ids();

/// Runs one command, writing artifacts under scenario.out_dir and a log to `log`.
/// Returns the exit status contract: 0 ok, 1 hard-check failure, 2 hypothesis refusal,
/// 3 configuration or input error.
int run_command(std::string_view command, const Scenario& scenario, std::ostream& log);

}  // namespace rlab::cli
