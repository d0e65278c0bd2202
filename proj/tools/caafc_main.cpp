#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "caafc/config.hpp"
#include "caafc/datasets.hpp"
#include "caafc/errors.hpp"
#include "caafc/harness.hpp"
#include "caafc/metrics.hpp"
#include "caafc/pipeline.hpp"
#include "caafc/text.hpp"
#include "caafc/transcript.hpp"

using namespace caafc;

namespace {

int exit_for(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::True: return 0;
    case VerdictLabel::False: return 1;
    case VerdictLabel::Unverifiable: return 2;
  }
  return 12;
}

struct CommonFlags {
  std::string config_path;
  std::string backend;
  std::string mode;
  std::vector<std::string> models;  // stage=model_id
  int parallel = 0;                 // 0 = not set
  int threshold = -1;               // -1 = not set
  int max_revisions = -1;
  std::string binary_map;
  bool resume = false;
  bool replay = false;
  std::string out;
  std::string manifest;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--backend", flags.backend, "retrieval backend id");
  cmd->add_option("--mode", flags.mode,
                  "evidence mode: retrieved | dataset");
  cmd->add_option("--models", flags.models,
                  "stage=model assignment (repeatable)");
  cmd->add_option("--parallel", flags.parallel, "record-level workers");
  cmd->add_option("--threshold", flags.threshold,
                  "actionability pass bar, 0..7");
  cmd->add_option("--max-revisions", flags.max_revisions,
                  "revisory pass cap");
  cmd->add_option("--binary-map", flags.binary_map,
                  "unverifiable handling: false | abstain");
  cmd->add_flag("--resume", flags.resume, "reuse checkpointed records");
  cmd->add_flag("--replay", flags.replay,
                "serve model calls from the recorded transcript");
  cmd->add_option("--out", flags.out, "report file (default: stdout)");
  cmd->add_option("--manifest", flags.manifest,
                  "manifest file (default: <out>.manifest.json)");
}

// file → environment → flags, most specific last.
RunConfig assemble_config(const CommonFlags& flags) {
  RunConfig config = flags.config_path.empty()
                         ? default_config()
                         : load_config(flags.config_path);
  config = apply_env_overrides(std::move(config));
  for (const auto& assignment : flags.models) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == assignment.size())
      throw ConfigError("--models expects stage=model, got '" + assignment +
                        "'");
    config.models[assignment.substr(0, eq)] = assignment.substr(eq + 1);
  }
  if (!flags.backend.empty()) config.retrieval_backend = flags.backend;
  if (flags.parallel > 0) config.parallelism = flags.parallel;
  if (flags.threshold >= 0) config.threshold = flags.threshold;
  if (flags.max_revisions >= 0) config.max_revisions = flags.max_revisions;
  validate_config(config);
  return config;
}

// Owns everything with state: the gateway and its backends, the retriever,
// the link prober, and the transcript sink.
struct Runtime {
  RunConfig config;
  Gateway gateway;
  std::unique_ptr<Retriever> retriever;
  std::optional<LinkProber> prober;
  std::shared_ptr<TranscriptWriter> transcript;

  explicit Runtime(RunConfig c) : config(std::move(c)), gateway(GatewayConfig{}) {}

  Pipeline pipeline(bool with_probe = true) {
    return Pipeline(gateway, config, retriever.get(),
                    with_probe ? prober->as_fn() : LinkProbeFn{},
                    transcript.get());
  }
};

std::unique_ptr<Runtime> make_runtime(
    RunConfig config, bool replay,
    const std::vector<std::string>& extra_models = {}) {
  auto rt = std::make_unique<Runtime>(std::move(config));
  const RunConfig& c = rt->config;

  std::set<std::string> model_ids;
  for (const auto& [stage, model] : c.models) model_ids.insert(model);
  for (const auto& model : extra_models) model_ids.insert(model);

  if (replay) {
    if (c.transcript_path.empty() ||
        !std::filesystem::exists(c.transcript_path))
      throw ConfigError(
          "--replay needs an existing transcript; set transcript_path");
    auto responses = build_replay_map(read_transcript(c.transcript_path));
    auto backend = std::make_shared<ReplayBackend>(std::move(responses));
    for (const auto& id : model_ids) rt->gateway.register_backend(id, backend);
    // A replay run appends nothing: the transcript stays the source of truth.
  } else {
    if (const char* base = std::getenv("CAAFC_HTTP_BASE_URL")) {
      for (const auto& id : model_ids) {
        HttpBackendConfig http;
        http.base_url = base;
        if (const char* v = std::getenv("CAAFC_HTTP_PATH")) http.path = v;
        if (const char* v = std::getenv("CAAFC_HTTP_AUTH_HEADER"))
          http.auth_header = v;
        if (const char* v = std::getenv("CAAFC_HTTP_AUTH_VALUE"))
          http.auth_value = v;
        http.model_name = id;
        rt->gateway.register_backend(id,
                                     std::make_shared<HttpChatBackend>(http));
      }
    } else if (!c.fixture_dir.empty()) {
      // Models with their own subdirectory read from it; the rest share the
      // root, so single-model fixture sets need no nesting.
      auto shared = std::make_shared<FixtureBackend>(c.fixture_dir);
      for (const auto& id : model_ids) {
        auto per_model = c.fixture_dir / id;
        if (std::filesystem::is_directory(per_model))
          rt->gateway.register_backend(
              id, std::make_shared<FixtureBackend>(per_model));
        else
          rt->gateway.register_backend(id, shared);
      }
    } else {
      throw ConfigError(
          "no model backend: set fixture_dir, CAAFC_HTTP_BASE_URL, or "
          "--replay");
    }
    if (!c.transcript_path.empty()) {
      rt->transcript =
          std::make_shared<TranscriptWriter>(c.transcript_path, true);
      rt->gateway.set_transcript(rt->transcript);
    }
  }

  RetrieverConfig retriever_config;
  if (!c.cache_dir.empty())
    retriever_config.cache_dir = c.cache_dir / "retrieval";
  rt->retriever = std::make_unique<Retriever>(retriever_config);
  if (!c.fixture_dir.empty())
    rt->retriever->register_backend(
        "fixture", std::make_shared<FixtureRetrievalBackend>(c.fixture_dir /
                                                             "retrieval"));
  if (const char* url = std::getenv("CAAFC_RETRIEVAL_URL")) {
    HttpRetrievalConfig http;
    http.base_url = url;
    if (const char* v = std::getenv("CAAFC_RETRIEVAL_PATH")) http.path = v;
    rt->retriever->register_backend(
        "http", std::make_shared<HttpRetrievalBackend>(http));
  }

  LinkProbeConfig probe_config;
  if (!c.cache_dir.empty()) probe_config.cache_dir = c.cache_dir / "links";
  rt->prober.emplace(probe_config);
  return rt;
}

void require_retrieval(const Runtime& rt) {
  if (!rt.retriever->has_backend(rt.config.retrieval_backend))
    throw ConfigError("retrieval backend '" + rt.config.retrieval_backend +
                      "' is not configured (set fixture_dir or "
                      "CAAFC_RETRIEVAL_URL)");
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty())
    std::cout << content;
  else
    atomic_write_file(out, content);
}

// Writes the manifest and returns the reference string reports embed.
std::string emit_manifest(const Runtime& rt, const CommonFlags& flags,
                          const std::string& dataset_hash,
                          const std::string& started,
                          const std::string& finished) {
  RunManifest manifest;
  manifest.config_snapshot = config_to_json(rt.config);
  manifest.dataset_hash = dataset_hash;
  manifest.started_at = started;
  manifest.finished_at = finished;
  manifest.stage_calls = rt.gateway.calls_by_tag();

  std::string path = flags.manifest;
  if (path.empty() && !flags.out.empty()) path = flags.out + ".manifest.json";
  if (path.empty()) {
    std::cerr << "manifest: " << manifest_to_json(manifest).dump() << "\n";
    return "-";
  }
  atomic_write_file(path, manifest_to_json(manifest).dump(2) + "\n");
  return std::filesystem::path(path).filename().string();
}

std::string read_required(const std::string& path, const char* what) {
  auto content = read_file(path);
  if (!content)
    throw ConfigError(std::string("cannot read ") + what + ": " + path);
  return *content;
}

std::optional<BinaryMap> parse_binary_map(const std::string& text) {
  if (text.empty()) return std::nullopt;
  if (text == "false") return BinaryMap::unverifiable_as_false;
  if (text == "abstain") return BinaryMap::abstain;
  throw ConfigError("--binary-map must be 'false' or 'abstain', got '" +
                    text + "'");
}

// ---- verify ----

struct VerifyArgs {
  std::string claim;
  std::string input_file;
  bool dialogue = false;
  std::string evidence_file;
  std::string date;
  std::string id = "cli-claim";
};

int run_verify(const CommonFlags& flags, const VerifyArgs& args) {
  auto rt = make_runtime(assemble_config(flags), flags.replay);
  auto mode = flags.mode.empty() ? EvidenceMode::retrieved
                                 : evidence_mode_from_string(flags.mode);

  std::string text = args.claim;
  if (!args.input_file.empty())
    text = trim(read_required(args.input_file, "input file"));
  if (text.empty())
    throw ConfigError("verify needs a claim argument or --input-file");

  ClaimInput input;
  if (args.dialogue) {
    // A dialogue file is either a JSON list of {speaker, utterance} turns
    // or text already carrying [A1]:-style tags.
    Json parsed = Json::parse(text, nullptr, false);
    if (parsed.is_array()) {
      std::vector<DialogueTurn> turns;
      for (const auto& turn : parsed)
        turns.push_back({turn.at("speaker").get<std::string>(),
                         turn.at("utterance").get<std::string>()});
      input = normalize_dialogue(turns);
    } else {
      input.kind = InputKind::dialogue;
      input.text = text;
    }
  } else {
    input.text = text;
  }
  input.id = args.id;
  if (!args.date.empty()) {
    auto date = parse_date(args.date);
    if (!date) throw ConfigError("--date must be YYYY-MM-DD");
    input.claim_date = date;
  }

  std::string evidence;
  if (mode == EvidenceMode::dataset) {
    if (args.evidence_file.empty())
      throw ConfigError("--mode dataset needs --evidence FILE");
    evidence = read_required(args.evidence_file, "evidence file");
  } else {
    require_retrieval(*rt);
  }

  std::string started = now_iso8601_utc();
  auto pipeline = rt->pipeline();
  auto result = pipeline.run(input, mode, evidence);
  std::string finished = now_iso8601_utc();

  std::string ref = emit_manifest(*rt, flags, "", started, finished);
  emit(flags.out,
       report_to_json(result, rt->config.threshold, ref).dump(2) + "\n");
  return exit_for(result.checked.verdict.label);
}

// ---- bench ----

struct BenchArgs {
  std::string dataset;
  std::string adapter;
  std::string checkpoint;
};

int run_bench_cmd(const CommonFlags& flags, const BenchArgs& args) {
  auto rt = make_runtime(assemble_config(flags), flags.replay);
  auto mode = flags.mode.empty() ? EvidenceMode::dataset
                                 : evidence_mode_from_string(flags.mode);
  if (flags.resume && args.checkpoint.empty())
    throw ConfigError("--resume needs --checkpoint FILE");
  if (mode == EvidenceMode::retrieved) require_retrieval(*rt);

  std::string bytes = read_required(args.dataset, "dataset");
  auto records = parse_dataset(bytes, args.adapter);

  BenchOptions options;
  options.mode = mode;
  options.binary_map = parse_binary_map(flags.binary_map);
  options.resume = flags.resume;
  if (!args.checkpoint.empty()) options.checkpoint_path = args.checkpoint;

  std::string started = now_iso8601_utc();
  auto pipeline = rt->pipeline(false);
  auto bench = run_bench(records, pipeline, options);
  std::string finished = now_iso8601_utc();

  std::string ref = emit_manifest(*rt, flags, hash16(bytes), started,
                                  finished);
  auto out = bench_to_json(bench);
  out["manifest"] = ref;
  emit(flags.out, out.dump(2) + "\n");
  std::cerr << format_report(bench.report);
  return 0;
}

// ---- clean ----

struct CleanArgs {
  std::string dataset;
  std::string adapter;
  std::vector<std::string> trio;
  bool compare = false;
  std::string out_dir = ".";
};

int run_clean(const CommonFlags& flags, const CleanArgs& args) {
  if (args.trio.size() != 3)
    throw ConfigError("clean needs exactly three --trio models");
  auto rt = make_runtime(assemble_config(flags), flags.replay, args.trio);
  const auto& config = rt->config;

  std::string bytes = read_required(args.dataset, "dataset");
  auto records = parse_dataset(bytes, args.adapter);
  std::array<std::string, 3> trio{args.trio[0], args.trio[1], args.trio[2]};

  std::string started = now_iso8601_utc();
  auto pipeline = rt->pipeline(false);
  auto report = detect_mismatches(records, trio, pipeline);

  if (args.compare) {
    require_retrieval(*rt);
    std::map<std::string, const DatasetRecord*> by_id;
    for (const auto& record : records) by_id[record.id] = &record;
    for (auto& finding : report.findings) {
      if (!finding.flagged) continue;
      const DatasetRecord* record = by_id.at(finding.record_id);
      try {
        // Fresh evidence for the same claim, then the trio votes on which
        // narrative serves it better.
        Segmenter segmenter(rt->gateway, config.models.at("segmenter"));
        auto claims = segmenter.segment(record->input);
        SourceSelector selector(rt->gateway, config.models.at("segmenter"));
        auto sources = selector.select(record->input.text);
        auto query = build_query(claims, record->input.claim_date, sources);
        auto bundle = canonicalize(
            rt->retriever->retrieve(query, config.retrieval_backend));
        auto outcome =
            compare_evidence(rt->gateway, record->input.text,
                             *record->evidence_text, bundle.narrative, trio);
        finding.comparison_votes = outcome.votes;
      } catch (const Error& e) {
        report.skipped.push_back(
            {finding.record_id, std::string("comparison: ") + e.what()});
      }
    }
  }

  auto outcome = clean(records, report.findings);
  std::string finished = now_iso8601_utc();

  std::filesystem::create_directories(args.out_dir);
  auto out_path = [&args](const char* name) {
    return (std::filesystem::path(args.out_dir) / name).string();
  };
  std::string kept_lines, removed_lines, finding_lines;
  for (const auto& record : outcome.kept)
    kept_lines += record.raw.dump() + "\n";
  for (const auto& record : outcome.removed)
    removed_lines += record.raw.dump() + "\n";
  for (const auto& finding : report.findings)
    finding_lines += finding_to_json(finding).dump() + "\n";
  atomic_write_file(out_path("kept.jsonl"), kept_lines);
  atomic_write_file(out_path("removed.jsonl"), removed_lines);
  atomic_write_file(out_path("findings.jsonl"), finding_lines);

  std::string ref = emit_manifest(*rt, flags, hash16(bytes), started,
                                  finished);
  Json skipped = Json::array();
  for (const auto& entry : report.skipped)
    skipped.push_back(
        Json{{"record_id", entry.record_id}, {"error", entry.error}});
  int flagged = 0;
  for (const auto& finding : report.findings) flagged += finding.flagged;
  emit(flags.out, Json{{"kept", outcome.kept.size()},
                       {"removed", outcome.removed.size()},
                       {"flagged", flagged},
                       {"checked", report.findings.size()},
                       {"skipped", skipped},
                       {"files",
                        Json{{"kept", out_path("kept.jsonl")},
                             {"removed", out_path("removed.jsonl")},
                             {"findings", out_path("findings.jsonl")}}},
                       {"manifest", ref},
                       {"version", kVersion}}
                     .dump(2) +
                     "\n");
  return 0;
}

// ---- score ----

struct ScoreArgs {
  std::string claim_file;
  std::string justification_file;
  std::string verdicts_file;
  std::string histogram_dir;
};

int run_score(const CommonFlags& flags, const ScoreArgs& args) {
  if (!args.histogram_dir.empty()) {
    // Density CSV over every score JSON in the directory.
    std::vector<std::filesystem::path> files;
    for (const auto& entry :
         std::filesystem::directory_iterator(args.histogram_dir))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<int> totals;
    for (const auto& file : files) {
      auto content = read_file(file);
      if (!content) continue;
      Json value = Json::parse(*content, nullptr, false);
      if (value.is_discarded())
        throw ParseError(file.string(), 1, "not valid JSON");
      if (value.contains("total"))
        totals.push_back(value.at("total").get<int>());
      else if (value.contains("actionability"))
        totals.push_back(
            value.at("actionability").at("total").get<int>());
    }
    emit(flags.out, histogram_csv(score_histogram(totals)));
    return 0;
  }

  if (args.claim_file.empty() || args.justification_file.empty() ||
      args.verdicts_file.empty())
    throw ConfigError(
        "score needs --claim, --justification and --verdicts (or "
        "--histogram DIR)");

  auto rt = make_runtime(assemble_config(flags), flags.replay);
  const auto& config = rt->config;

  std::string claim = trim(read_required(args.claim_file, "claim file"));
  std::string text =
      trim(read_required(args.justification_file, "justification file"));
  std::string verdict_bytes =
      read_required(args.verdicts_file, "verdicts file");
  Json parsed = Json::parse(verdict_bytes, nullptr, false);
  if (parsed.is_discarded())
    throw ParseError(args.verdicts_file, 1, "not valid JSON");
  Json canonical = validate_schema("verdict_object", parsed);
  std::vector<SubclaimVerdict> verdicts;
  for (const auto& entry : canonical.at("subclaims")) {
    SubclaimVerdict verdict;
    verdict.subclaim_text = entry.at("text").get<std::string>();
    verdict.label =
        verdict_label_from_string(entry.at("label").get<std::string>());
    verdict.justification = entry.value("justification", "");
    verdicts.push_back(std::move(verdict));
  }

  Justification justification;
  justification.text = text;
  justification.cited_urls = extract_urls(text);

  std::string started = now_iso8601_utc();
  auto probes = rt->prober->probe_links(justification.cited_urls);
  ActionabilityScorer scorer(rt->gateway, config.models.at("judge"),
                             config.threshold);
  auto assessment = scorer.score(claim, justification, verdicts, probes);
  std::string finished = now_iso8601_utc();

  std::string ref = emit_manifest(*rt, flags, "", started, finished);
  const auto& score = assessment.score;
  emit(flags.out,
       Json{{"error_detection", score.error_detection},
            {"error_correction", score.error_correction},
            {"link_score", score.link_score},
            {"total", score.total},
            {"pass", score.pass},
            {"threshold", config.threshold},
            {"rationales",
             Json{{"error_detection", assessment.detection_rationale},
                  {"error_correction", assessment.correction_rationale},
                  {"links", assessment.link_rationale}}},
            {"manifest", ref},
            {"version", kVersion}}
               .dump(2) +
           "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chronological, actionable, automated fact-checking"};
  app.require_subcommand(1);

  CommonFlags verify_flags, bench_flags, clean_flags, score_flags;
  VerifyArgs verify_args;
  BenchArgs bench_args;
  CleanArgs clean_args;
  ScoreArgs score_args;

  auto* verify_cmd =
      app.add_subcommand("verify", "fact-check one claim or dialogue");
  add_common(verify_cmd, verify_flags);
  verify_cmd->add_option("claim", verify_args.claim, "claim text");
  verify_cmd->add_option("--input-file", verify_args.input_file,
                         "read the claim or dialogue from a file");
  verify_cmd->add_flag("--dialogue", verify_args.dialogue,
                       "treat the input as a dialogue");
  verify_cmd->add_option("--evidence", verify_args.evidence_file,
                         "evidence narrative file (dataset mode)");
  verify_cmd->add_option("--date", verify_args.date, "claim date YYYY-MM-DD");
  verify_cmd->add_option("--id", verify_args.id, "claim id for the report");

  auto* bench_cmd =
      app.add_subcommand("bench", "run a benchmark dataset and report metrics");
  add_common(bench_cmd, bench_flags);
  bench_cmd->add_option("dataset", bench_args.dataset, "dataset file")
      ->required();
  bench_cmd->add_option("--adapter", bench_args.adapter, "dataset adapter id")
      ->required();
  bench_cmd->add_option("--checkpoint", bench_args.checkpoint,
                        "per-record checkpoint JSONL");

  auto* clean_cmd = app.add_subcommand(
      "clean", "remove records whose evidence contradicts the gold label");
  add_common(clean_cmd, clean_flags);
  clean_cmd->add_option("dataset", clean_args.dataset, "dataset file")
      ->required();
  clean_cmd->add_option("--adapter", clean_args.adapter, "dataset adapter id")
      ->required();
  clean_cmd->add_option("--trio", clean_args.trio,
                        "voting model id (give exactly three)");
  clean_cmd->add_flag("--compare", clean_args.compare,
                      "also vote dataset vs freshly retrieved evidence");
  clean_cmd->add_option("--out-dir", clean_args.out_dir,
                        "directory for kept/removed/findings files");

  auto* score_cmd =
      app.add_subcommand("score", "grade a justification's actionability");
  add_common(score_cmd, score_flags);
  score_cmd->add_option("--claim", score_args.claim_file, "claim text file");
  score_cmd->add_option("--justification", score_args.justification_file,
                        "justification text file");
  score_cmd->add_option("--verdicts", score_args.verdicts_file,
                        "subclaim verdicts JSON file");
  score_cmd->add_option("--histogram", score_args.histogram_dir,
                        "emit a score-density CSV over a directory of score "
                        "JSONs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 10;
  }

  try {
    if (app.got_subcommand(verify_cmd))
      return run_verify(verify_flags, verify_args);
    if (app.got_subcommand(bench_cmd))
      return run_bench_cmd(bench_flags, bench_args);
    if (app.got_subcommand(clean_cmd)) return run_clean(clean_flags, clean_args);
    if (app.got_subcommand(score_cmd)) return run_score(score_flags, score_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 10;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 10;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 11;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 12;
  }
  return 12;
}
