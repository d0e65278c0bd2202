#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "caafc/schemas.hpp"

namespace caafc {

inline constexpr const char* kVersion = "0.1.0";

// Stages that carry a model assignment, in canonical order.
const std::vector<std::string>& model_stages();

// Everything a run needs to know, one JSON document. Environment variables
// prefixed CAAFC_ override individual fields after the file is read.
struct RunConfig {
  // stage → model id; always holds every stage in model_stages().
  std::map<std::string, std::string> models;
  std::string retrieval_backend = "fixture";
  int threshold = 4;       // actionability pass bar, 0..7
  int max_revisions = 3;   // revisory passes per claim
  int parallelism = 1;     // record-level workers
  int call_budget = 64;    // physical model calls per record; <=0 = unlimited
  std::filesystem::path cache_dir;        // retrieval + link caches
  std::filesystem::path transcript_path;  // empty → no transcript
  std::filesystem::path fixture_dir;      // fixture backend root
};

RunConfig default_config();

// Throws ConfigError when a bound is violated.
void validate_config(const RunConfig& config);

// Strict parse: unknown top-level keys or stage names are ConfigError.
RunConfig config_from_json(const Json& value);
Json config_to_json(const RunConfig& config);

// Reads and parses a config file; missing file → ConfigError.
RunConfig load_config(const std::filesystem::path& path);

// getenv-shaped lookup, injectable for tests; nullptr means std::getenv.
using EnvFn = std::function<const char*(const char*)>;

// Applies CAAFC_MODEL_<STAGE>, CAAFC_BACKEND, CAAFC_THRESHOLD,
// CAAFC_MAX_REVISIONS, CAAFC_PARALLELISM, CAAFC_CALL_BUDGET, CAAFC_CACHE_DIR,
// CAAFC_TRANSCRIPT, CAAFC_FIXTURE_DIR. Malformed numbers → ConfigError.
RunConfig apply_env_overrides(RunConfig config, const EnvFn& env = nullptr);

// Run-level provenance. Wall-clock data lives here and only here, so every
// report stays byte-stable across runs.
struct RunManifest {
  Json config_snapshot;
  std::string dataset_hash;  // hash16 of the dataset bytes; empty for ad-hoc
  std::string started_at;    // ISO-8601 UTC
  std::string finished_at;
  std::map<std::string, int> stage_calls;  // stage tag → completed calls
  std::string version = kVersion;
};

Json manifest_to_json(const RunManifest& manifest);

}  // namespace caafc
