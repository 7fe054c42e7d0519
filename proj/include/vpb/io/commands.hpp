#pragma once

#include "vpb/io/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace vpb::io {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // I/O or other unexpected error
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitGate = 4,
};

const std::vector<std::string>& subcommand_names();

// Runs one subcommand into config.output_dir. Always leaves a manifest; on a
// non-zero exit also a failure.json record. Progress goes to `log`.
int run_subcommand(const std::string& name, const ScenarioConfig& config, std::ostream& log);

}  // namespace vpb::io
