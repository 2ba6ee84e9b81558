#pragma once

#include "thermo/config.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace thermo {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitCheckFailed = 2 };

struct RunOutcome {
  int exit_code = kExitOk;
  std::string status = "ok";  // ok | check-failed | error
  std::string error_name;
  std::string message;
  std::map<std::string, double> scalars;
  std::map<std::string, std::string> labels;
  std::vector<std::string> files;  // written CSVs, relative to the output directory
  double wall_time_seconds = 0.0;
};

struct RunOptions {
  std::filesystem::path out_dir = "out";
  bool parallel = true;
};

// Executes one command, writes its CSVs and summary.json into out_dir.
// Library errors are caught and reported through the outcome.
RunOutcome run(const RunConfig& config, const RunOptions& options = {});

// Reports configuration issues the same way a failed run is reported.
RunOutcome report_config_issues(const std::vector<ConfigIssue>& issues, const RunOptions& options);

std::string summary_json(const RunConfig* config, const RunOutcome& outcome);

}  // namespace thermo
