#pragma once

// Batch experiment runner: JSON configs in, CSV tables and a JSON summary out.
// Exit codes: 0 success, 1 configuration error, 2 numerical failure
// (accuracy, extraction, undetectable direction); diagnostics are still written.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace crad {

enum class ExperimentKind { VerifyMoments, FarField, Nonradiating, RecoverCorner, Enclosure, EdgeRecover };

const char* kind_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view name);
const std::vector<ExperimentKind>& all_kinds();

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Hash of the config with the keys that cannot change results ("output",
/// "threads") removed, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::VerifyMoments;
  nlohmann::json doc;
  std::string output_path;
  std::uint64_t seed = 0;
  std::string hash;
};

/// Reads and parses a JSON file. Throws ConfigError naming the line of a
/// syntax error.
nlohmann::json load_config_file(const std::string& path);

/// Validates the whole document against the schema of its kind. Throws
/// ConfigError whose field is the JSON path of the first problem. When
/// `expected` is set, a "kind" field must match it and may be omitted.
ExperimentConfig parse_config(nlohmann::json doc, std::optional<ExperimentKind> expected = std::nullopt);

/// Command-line values that replace config fields before validation.
struct Overrides {
  std::optional<std::string> out;
  std::optional<double> tol;
  std::optional<int> threads;
};

/// --out sets "output", --tol the kind's quadrature rel_tol, --threads "threads".
void apply_overrides(nlohmann::json& doc, ExperimentKind kind, const Overrides& overrides);

struct RunOutcome {
  int exit_code = 0;
  std::string message;
  std::vector<std::string> files;
};

/// Executes a validated config and writes its tables into output_path.
RunOutcome run(const ExperimentConfig& config);

/// Full command line: `<kind> --config <path> [--out DIR] [--threads N] [--tol X]`.
/// CORNER_RADIANCE_THREADS overrides --threads.
int cli_main(int argc, const char* const* argv);

}  // namespace crad
