#pragma once

#include "grpheat/classical_solver.hpp"
#include "grpheat/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace grpheat {

inline constexpr const char* kVersion = "0.1.0";

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  /// 0 when every check passed, 1 when a check failed, 2 when the run raised an error.
  int exit_code = 0;
  std::vector<CheckResult> checks;
  std::optional<std::string> error;
  std::vector<std::string> artifacts;  ///< file names inside the output directory
};

/// Builds initial data from `sin:<k>`, `polybump`, `file:<path>` or `compensated:<spec>`.
InitialCondition make_initial(const std::string& spec, const SpaceGrid& grid);

/// Runs one experiment, writing its artifacts and manifest.json into config.output_dir.
/// One PASS/FAIL line per check goes to `log` when given. Errors are caught and recorded.
RunResult run(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace grpheat
