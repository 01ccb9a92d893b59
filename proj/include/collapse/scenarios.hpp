#pragma once

#include "collapse/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace collapse::cli {

using Json = nlohmann::json;

struct ScenarioInfo {
  std::string name;
  std::string theorem;  // short tag of the statement the scenario exercises
  Json defaults;        // full parameter object
};

// Alphabetical.
const std::vector<ScenarioInfo>& list_scenarios();
const ScenarioInfo& find_scenario(const std::string& name);  // throws ScenarioUnknown

struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = verify::kDefaultSeed;
  Json params;          // defaults overlaid with user values
  std::string out_dir;  // from the config file; empty when unset
};

// Config file (JSON): {"scenario": ..., "seed": ..., "out": ..., "params": {...}}.
// `scenario` may be omitted when it is given on the command line; when both
// are present they must agree. Throws ConfigInvalid naming the offending key.
ScenarioConfig make_config(const std::string& scenario, const Json& file = Json::object());
Json read_config_file(const std::filesystem::path& path);

// --eps-grid override; only for scenarios that take an eps grid.
void override_eps_grid(ScenarioConfig& config, const std::vector<double>& grid);

// Parses "a,b,c".
std::vector<double> parse_eps_list(const std::string& text);

// FNV-1a over the canonical dump of scenario, seed and params.
std::string config_hash(const ScenarioConfig& config);

struct Check {
  std::string name;
  bool pass = false;
  double margin = 0;
};

struct Artifact {
  std::string file;
  std::string content;
};

struct RunManifest {
  std::string scenario, theorem, config_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> artifacts;
  std::vector<Check> checks;

  bool pass() const;
  std::string to_json() const;
};

struct ScenarioResult {
  RunManifest manifest;
  std::vector<Artifact> artifacts;
};

// Pure evaluation; nothing is written.
ScenarioResult evaluate(const ScenarioConfig& config);

// Writes every artifact and manifest.json into out_dir (created if needed).
void write_result(const ScenarioResult& result, const std::filesystem::path& out_dir);

RunManifest run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

struct VerifySummary {
  std::vector<verify::Criterion> criteria;  // 1..12
  ScenarioResult result;                    // summary CSV and manifest
  double seconds = 0;
  bool pass() const;
};

// Runs the numerical criteria, then every scenario twice with default
// parameters to check byte-identical output and the overall time budget.
VerifySummary verify_all(std::uint64_t seed = verify::kDefaultSeed);

// "[PASS] 3 complex-validity  margin=... (0.01 s)" plus the failing sub-check.
std::string criterion_line(const verify::Criterion& c);

}  // namespace collapse::cli
