#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace anisop {

/// Exit codes of the command-line runner.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,   // schema/validation problems; nothing written
  kSolverError = 3,   // numerical failure; partial outputs + failure record
  kIoError = 4,
};

struct RunConfig {
  nlohmann::json config;      // parsed task payload, {"task": ..., ...}
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  double tol = 0.0;           // 0 = per-task defaults

  /// Loads and validates; throws std::invalid_argument on schema errors.
  static RunConfig load(const std::string& config_path,
                        const std::string& out_dir, std::uint64_t seed,
                        int threads, double tol);
};

/// Dispatches the configured task, writes report.json, field CSVs and
/// manifest.json under the output directory. Returns an ExitCode.
int run(const RunConfig& config);

}  // namespace anisop
