#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "persist/exponent.hpp"
#include "persist/survival.hpp"

namespace persist {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "persist 0.1.0";

enum class Experiment {
  survival_curve,
  exponent_universality,
  theta_monotonicity,
  b_upper_bound,
  randpoly_curve,
  property_suite,
  drift_invariance,
  barrier_switch,
  fbm_vs_liouville,
};

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);
const std::vector<Experiment>& all_experiments();

/*!
 * A validated experiment description.
 *
 * `spec` is the canonical form: every default filled in, geometric grids
 * expanded, unknown keys rejected. Its sorted-key serialization is what
 * gets hashed; the output directory is not part of it.
 */
struct ExperimentConfig {
  Experiment experiment = Experiment::survival_curve;
  json spec;
  std::string output_dir = "runs";
  std::filesystem::path base_dir;  // resolves relative table-kernel paths

  /// Throws ConfigError on unknown experiments, keys or invalid values.
  static ExperimentConfig from_json(const json& j, const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& file);

  json to_json() const;
  std::string canonical() const;
  /// SHA-256 of the canonical text, hex.
  std::string config_hash() const;
  /// git blob id (SHA-1 of "blob <size>\0" + text) of the canonical text.
  std::string content_hash() const;

  bool operator==(const ExperimentConfig& other) const {
    return experiment == other.experiment && spec == other.spec && output_dir == other.output_dir;
  }
};

std::string sha256_hex(std::string_view data);
std::string git_blob_sha1(std::string_view data);

// Typed views of the config pieces shared by several experiments.
ProcessSpec process_from_json(const json& j);
json process_to_json(const ProcessSpec& p);
BarrierSpec barrier_from_json(const json& j);
json barrier_to_json(const BarrierSpec& b);
IncrementLaw law_from_json(const json& j);
json law_to_json(const IncrementLaw& law);
json estimate_to_json(const SurvivalEstimate& e);
json fit_to_json(const ExponentFit& f);
json verdict_to_json(const std::string& name, const Verdict& v);

struct RunResult {
  std::filesystem::path directory;
  json manifest;
  std::vector<json> records;
  bool all_pass = true;
};

/*!
 * Runs the experiment and writes <output_dir>/<hash prefix>/ with
 * config.json, results.jsonl (one record per line, no timings) and
 * manifest.json (hashes, version, wall time, verdicts, slack parameters).
 */
RunResult run_experiment(const ExperimentConfig& config);

/// Runs without touching the filesystem.
RunResult evaluate_experiment(const ExperimentConfig& config);

using Filter = std::vector<std::pair<std::string, std::string>>;

/*!
 * Flattens every record under the store (one row per record, nested keys
 * joined with '.') into a CSV with the sorted union of columns, RFC 4180
 * quoting and 17 significant digits. Returns the number of rows.
 */
std::size_t export_csv(const std::filesystem::path& store, const std::filesystem::path& out, const Filter& filter = {});

struct RunSummary {
  std::string directory;
  std::string experiment;
  std::string config_hash;
  std::size_t records = 0;
  bool all_pass = false;
};

std::vector<RunSummary> list_runs(const std::filesystem::path& store);

}  // namespace persist
