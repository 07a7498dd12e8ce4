#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>

#include "henonlab/config.hpp"

namespace henonlab {

/// A census that had to be complete came back Incomplete.
class IncompleteCensusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitIncomplete = 3,
  kExitIo = 4,
};

/// Runs every experiment in declaration order, writing one result directory per
/// experiment plus summary.json and plan.txt under config.output. Failed checks
/// are recorded in the summary; only execution errors give a nonzero code.
int run_experiments(const ExperimentConfig& config, std::ostream& log);

/// Loads the configuration (applying optional overrides) and runs it, mapping
/// errors to exit codes.
struct RunOverrides {
  std::optional<std::string> output;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
};
int run_config_file(const std::filesystem::path& path, const RunOverrides& overrides, std::ostream& out,
                    std::ostream& err);

/// Prints the resolved plan and its hash; exit 2 on parse errors.
int describe_config_file(const std::filesystem::path& path, const RunOverrides& overrides, std::ostream& out,
                         std::ostream& err);

void apply_overrides(ExperimentConfig& config, const RunOverrides& overrides);

}  // namespace henonlab
