#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace zkdamper {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitInfeasible = 2, kExitBlowUp = 3 };

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string axis;
  std::vector<double> values;
};

// Each command writes its artifacts to the paths of the [output] section
// (defaults next to the config file, or stdout for oracle-check and
// gn-estimate), reports problems on err and returns an ExitCode.
int cmd_certify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_oracle_check(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gn_estimate(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace zkdamper
