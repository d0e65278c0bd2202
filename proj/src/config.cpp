#include "caafc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "caafc/errors.hpp"
#include "caafc/text.hpp"

namespace caafc {

namespace {

constexpr const char* kDefaultModel = "gemma3-27b";

int parse_int(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    int value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
}

}  // namespace

const std::vector<std::string>& model_stages() {
  static const std::vector<std::string> stages{
      "segmenter", "fact_checker", "justifier",
      "revisory",  "judge",        "comparison"};
  return stages;
}

RunConfig default_config() {
  RunConfig config;
  for (const auto& stage : model_stages()) config.models[stage] = kDefaultModel;
  return config;
}

void validate_config(const RunConfig& config) {
  if (config.threshold < 0 || config.threshold > 7)
    throw ConfigError("threshold must be in [0,7], got " +
                      std::to_string(config.threshold));
  if (config.max_revisions < 0)
    throw ConfigError("max_revisions must be >= 0, got " +
                      std::to_string(config.max_revisions));
  if (config.parallelism < 1)
    throw ConfigError("parallelism must be >= 1, got " +
                      std::to_string(config.parallelism));
  for (const auto& stage : model_stages()) {
    auto it = config.models.find(stage);
    if (it == config.models.end() || trim(it->second).empty())
      throw ConfigError("no model assigned to stage '" + stage + "'");
  }
  for (const auto& [stage, model] : config.models) {
    (void)model;
    const auto& stages = model_stages();
    if (std::find(stages.begin(), stages.end(), stage) == stages.end())
      throw ConfigError("unknown stage '" + stage + "'");
  }
}

RunConfig config_from_json(const Json& value) {
  if (!value.is_object()) throw ConfigError("config root must be an object");
  RunConfig config = default_config();
  for (const auto& [key, field] : value.items()) {
    if (key == "models") {
      if (!field.is_object())
        throw ConfigError("models must map stage names to model ids");
      for (const auto& [stage, model] : field.items()) {
        if (!model.is_string())
          throw ConfigError("models." + stage + " must be a string");
        config.models[stage] = model.get<std::string>();
      }
    } else if (key == "retrieval_backend") {
      config.retrieval_backend = field.get<std::string>();
    } else if (key == "threshold") {
      if (!field.is_number_integer())
        throw ConfigError("threshold must be an integer");
      config.threshold = field.get<int>();
    } else if (key == "max_revisions") {
      if (!field.is_number_integer())
        throw ConfigError("max_revisions must be an integer");
      config.max_revisions = field.get<int>();
    } else if (key == "parallelism") {
      if (!field.is_number_integer())
        throw ConfigError("parallelism must be an integer");
      config.parallelism = field.get<int>();
    } else if (key == "call_budget") {
      if (!field.is_number_integer())
        throw ConfigError("call_budget must be an integer");
      config.call_budget = field.get<int>();
    } else if (key == "cache_dir") {
      config.cache_dir = field.get<std::string>();
    } else if (key == "transcript_path") {
      config.transcript_path = field.get<std::string>();
    } else if (key == "fixture_dir") {
      config.fixture_dir = field.get<std::string>();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  validate_config(config);
  return config;
}

Json config_to_json(const RunConfig& config) {
  Json models = Json::object();
  for (const auto& [stage, model] : config.models) models[stage] = model;
  return Json{{"models", models},
              {"retrieval_backend", config.retrieval_backend},
              {"threshold", config.threshold},
              {"max_revisions", config.max_revisions},
              {"parallelism", config.parallelism},
              {"call_budget", config.call_budget},
              {"cache_dir", config.cache_dir.string()},
              {"transcript_path", config.transcript_path.string()},
              {"fixture_dir", config.fixture_dir.string()}};
}

RunConfig load_config(const std::filesystem::path& path) {
  auto content = read_file(path);
  if (!content)
    throw ConfigError("cannot read config file: " + path.string());
  Json value = Json::parse(*content, nullptr, false);
  if (value.is_discarded())
    throw ConfigError("config file is not valid JSON: " + path.string());
  return config_from_json(value);
}

RunConfig apply_env_overrides(RunConfig config, const EnvFn& env) {
  auto get = [&env](const char* name) -> const char* {
    return env ? env(name) : std::getenv(name);
  };
  for (const auto& stage : model_stages()) {
    std::string var = "CAAFC_MODEL_";
    for (char c : stage) var += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = get(var.c_str())) config.models[stage] = v;
  }
  if (const char* v = get("CAAFC_BACKEND")) config.retrieval_backend = v;
  if (const char* v = get("CAAFC_THRESHOLD"))
    config.threshold = parse_int("CAAFC_THRESHOLD", v);
  if (const char* v = get("CAAFC_MAX_REVISIONS"))
    config.max_revisions = parse_int("CAAFC_MAX_REVISIONS", v);
  if (const char* v = get("CAAFC_PARALLELISM"))
    config.parallelism = parse_int("CAAFC_PARALLELISM", v);
  if (const char* v = get("CAAFC_CALL_BUDGET"))
    config.call_budget = parse_int("CAAFC_CALL_BUDGET", v);
  if (const char* v = get("CAAFC_CACHE_DIR")) config.cache_dir = v;
  if (const char* v = get("CAAFC_TRANSCRIPT")) config.transcript_path = v;
  if (const char* v = get("CAAFC_FIXTURE_DIR")) config.fixture_dir = v;
  validate_config(config);
  return config;
}

Json manifest_to_json(const RunManifest& manifest) {
  Json stage_calls = Json::object();
  for (const auto& [stage, count] : manifest.stage_calls)
    stage_calls[stage] = count;
  return Json{{"config", manifest.config_snapshot},
              {"dataset_hash", manifest.dataset_hash},
              {"started_at", manifest.started_at},
              {"finished_at", manifest.finished_at},
              {"stage_calls", stage_calls},
              {"version", manifest.version}};
}

}  // namespace caafc
