#include <doctest.h>

#include <map>
#include <memory>

#include "caafc/config.hpp"
#include "caafc/errors.hpp"
#include "caafc/text.hpp"
#include "support.hpp"

using namespace caafc;
using namespace caafc::test;

namespace {

// getenv stand-in over a fixed map.
EnvFn env_of(std::map<std::string, std::string> vars) {
  auto owned = std::make_shared<std::map<std::string, std::string>>(
      std::move(vars));
  return [owned](const char* name) -> const char* {
    auto it = owned->find(name);
    return it == owned->end() ? nullptr : it->second.c_str();
  };
}

}  // namespace

TEST_CASE("defaults are valid and cover every stage") {
  auto config = default_config();
  validate_config(config);
  CHECK(config.threshold == 4);
  CHECK(config.max_revisions == 3);
  CHECK(config.parallelism == 1);
  CHECK(config.models.size() == model_stages().size());
  for (const auto& stage : model_stages())
    CHECK(config.models.at(stage) == "gemma3-27b");
}

TEST_CASE("bounds are enforced") {
  auto config = default_config();
  config.threshold = 8;
  CHECK_THROWS_AS(validate_config(config), ConfigError);
  config.threshold = -1;
  CHECK_THROWS_AS(validate_config(config), ConfigError);
  config.threshold = 0;
  validate_config(config);
  config.threshold = 7;
  validate_config(config);

  config = default_config();
  config.max_revisions = -1;
  CHECK_THROWS_AS(validate_config(config), ConfigError);
  config = default_config();
  config.parallelism = 0;
  CHECK_THROWS_AS(validate_config(config), ConfigError);
  config = default_config();
  config.models.erase("judge");
  CHECK_THROWS_AS(validate_config(config), ConfigError);
  config = default_config();
  config.models["renderer"] = "x";  // not a stage
  CHECK_THROWS_AS(validate_config(config), ConfigError);
}

TEST_CASE("config documents parse strictly") {
  Json doc{{"models", Json{{"fact_checker", "big-model"}}},
           {"threshold", 6},
           {"parallelism", 4},
           {"cache_dir", "/tmp/caafc-cache"}};
  auto config = config_from_json(doc);
  CHECK(config.models.at("fact_checker") == "big-model");
  CHECK(config.models.at("judge") == "gemma3-27b");  // default kept
  CHECK(config.threshold == 6);
  CHECK(config.parallelism == 4);
  CHECK(config.cache_dir == "/tmp/caafc-cache");

  CHECK_THROWS_AS(config_from_json(Json{{"thresold", 4}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"threshold", "four"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::array()), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"threshold", 9}}), ConfigError);
}

TEST_CASE("to_json/from_json round-trips") {
  auto config = default_config();
  config.models["judge"] = "judge-model";
  config.retrieval_backend = "http";
  config.threshold = 5;
  config.max_revisions = 1;
  config.parallelism = 3;
  config.call_budget = 17;
  config.cache_dir = "/var/cache/caafc";
  config.transcript_path = "/tmp/run.jsonl";
  config.fixture_dir = "/data/fixtures";
  auto round = config_from_json(config_to_json(config));
  CHECK(config_to_json(round).dump() == config_to_json(config).dump());
}

TEST_CASE("load_config reads files and rejects bad ones") {
  TempDir dir;
  auto path = dir / "config.json";
  atomic_write_file(path, config_to_json(default_config()).dump(2));
  auto config = load_config(path);
  CHECK(config.threshold == 4);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  atomic_write_file(path, "{not json");
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("environment overrides") {
  auto config = apply_env_overrides(
      default_config(),
      env_of({{"CAAFC_THRESHOLD", "6"},
              {"CAAFC_MODEL_FACT_CHECKER", "level-2"},
              {"CAAFC_MODEL_JUDGE", "referee"},
              {"CAAFC_PARALLELISM", "8"},
              {"CAAFC_BACKEND", "http"},
              {"CAAFC_TRANSCRIPT", "/tmp/t.jsonl"}}));
  CHECK(config.threshold == 6);
  CHECK(config.models.at("fact_checker") == "level-2");
  CHECK(config.models.at("judge") == "referee");
  CHECK(config.models.at("segmenter") == "gemma3-27b");
  CHECK(config.parallelism == 8);
  CHECK(config.retrieval_backend == "http");
  CHECK(config.transcript_path == "/tmp/t.jsonl");

  CHECK_THROWS_AS(apply_env_overrides(default_config(),
                                      env_of({{"CAAFC_THRESHOLD", "four"}})),
                  ConfigError);
  // Overrides still go through validation.
  CHECK_THROWS_AS(apply_env_overrides(default_config(),
                                      env_of({{"CAAFC_THRESHOLD", "9"}})),
                  ConfigError);
  // No variables set → unchanged.
  auto same = apply_env_overrides(default_config(), env_of({}));
  CHECK(config_to_json(same).dump() ==
        config_to_json(default_config()).dump());
}

TEST_CASE("manifest serialization") {
  RunManifest manifest;
  manifest.config_snapshot = config_to_json(default_config());
  manifest.dataset_hash = hash16("dataset bytes");
  manifest.started_at = "2026-08-19T10:00:00Z";
  manifest.finished_at = "2026-08-19T10:05:00Z";
  manifest.stage_calls = {{"segmenter", 10}, {"fact_checker", 12}};
  auto value = manifest_to_json(manifest);
  CHECK(value.at("dataset_hash") == hash16("dataset bytes"));
  CHECK(value.at("started_at") == "2026-08-19T10:00:00Z");
  CHECK(value.at("stage_calls").at("fact_checker") == 12);
  CHECK(value.at("version") == kVersion);
  CHECK(value.at("config").at("threshold") == 4);
}
