#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "geodyn/errors.hpp"

namespace geodyn {

inline constexpr const char* kConfigSchema = "geodyn-config-v1";

struct Diagnostic {
  std::string path;  // e.g. "gauge.couplings.g2" or "line 3, column 7"
  std::string message;
};

/// Raised when a configuration cannot be parsed or fails validation.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Parses JSON text. Throws ConfigError with the line and column of a syntax error.
nlohmann::json parse_config(const std::string& text);

/// Reads a file, or a builtin scenario when `source` is "builtin:NAME" or a
/// builtin name that is not an existing file. Throws ConfigError.
nlohmann::json load_config(const std::string& source);

/// Every inconsistency in the configuration; empty when valid.
std::vector<Diagnostic> validate_config(const nlohmann::json& config);

struct BuiltinScenario {
  std::string name;
  std::string description;
  std::string json;
};

const std::vector<BuiltinScenario>& builtin_scenarios();

struct RunOptions {
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
};

struct OracleCheck {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct TaskReport {
  std::string type;
  std::string label;     // "<index>_<type>"
  std::string text;      // human-readable output
  std::string csv;       // empty when the task emits no table
  std::vector<OracleCheck> checks;
  double seconds = 0.0;

  bool passed() const;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  int grid = 0;
  std::vector<TaskReport> tasks;

  bool passed() const;
  /// Structured text report including timings.
  std::string text() const;
};

/// Validates and runs every task in config order. Throws ConfigError when
/// the configuration is invalid.
RunReport run_scenario(const nlohmann::json& config, const RunOptions& options = {});

/// Writes report.txt and one CSV per task into `dir` (created if missing).
/// Returns the written paths.
std::vector<std::string> write_artifacts(const RunReport& report, const std::string& dir);

}  // namespace geodyn
