#include "caafc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "caafc/errors.hpp"
#include "caafc/prompts.hpp"
#include "caafc/text.hpp"
#include "caafc/transcript.hpp"

namespace caafc {

// ---- evidence comparison ----

std::string to_string(EvidenceChoice choice) {
  switch (choice) {
    case EvidenceChoice::evidence_1: return "evidence_1";
    case EvidenceChoice::evidence_2: return "evidence_2";
    case EvidenceChoice::tie: return "tie";
  }
  throw InvariantViolation("bad EvidenceChoice");
}

EvidenceChoice evidence_choice_from_string(const std::string& text) {
  std::string t = casefold(trim(text));
  if (t == "evidence_1") return EvidenceChoice::evidence_1;
  if (t == "evidence_2") return EvidenceChoice::evidence_2;
  if (t == "tie") return EvidenceChoice::tie;
  throw InvariantViolation("unknown evidence choice '" + text + "'");
}

std::string to_string(ReasonCategory category) {
  switch (category) {
    case ReasonCategory::more_context: return "more_context";
    case ReasonCategory::more_updated_information:
      return "more_updated_information";
    case ReasonCategory::other: return "other";
  }
  throw InvariantViolation("bad ReasonCategory");
}

ReasonCategory reason_category_from_string(const std::string& text) {
  std::string t = casefold(trim(text));
  if (t == "more_context") return ReasonCategory::more_context;
  if (t == "more_updated_information")
    return ReasonCategory::more_updated_information;
  if (t == "other") return ReasonCategory::other;
  throw InvariantViolation("unknown reason category '" + text + "'");
}

std::string to_string(ComparisonWinner winner) {
  switch (winner) {
    case ComparisonWinner::evidence_1: return "evidence_1";
    case ComparisonWinner::evidence_2: return "evidence_2";
    case ComparisonWinner::tie: return "tie";
    case ComparisonWinner::unresolved: return "unresolved";
  }
  throw InvariantViolation("bad ComparisonWinner");
}

ComparisonWinner majority_winner(const std::vector<EvidenceChoice>& votes) {
  int counts[3] = {0, 0, 0};
  for (auto vote : votes) ++counts[static_cast<int>(vote)];
  for (int i = 0; i < 3; ++i)
    if (counts[i] >= 2) return static_cast<ComparisonWinner>(i);
  return ComparisonWinner::unresolved;
}

ComparisonOutcome compare_evidence(Gateway& gateway, const std::string& claim,
                                   const std::string& evidence_a,
                                   const std::string& evidence_b,
                                   const std::array<std::string, 3>& model_ids,
                                   int repair_budget, RunBudget* budget) {
  if (trim(evidence_a).empty() || trim(evidence_b).empty())
    throw InvariantViolation("evidence comparison needs two non-empty texts");

  GenerationRequest request;
  request.user_text = render(prompts::comparison(), {{"claim", claim},
                                                     {"evidence1", evidence_a},
                                                     {"evidence2", evidence_b}});
  request.tags = {"comparison"};

  ComparisonOutcome outcome;
  for (const auto& model_id : model_ids) {
    request.model_id = model_id;
    try {
      Json value = gateway.complete_structured(request, "comparison_object",
                                               repair_budget, budget);
      ComparisonVote vote;
      vote.model_id = model_id;
      vote.better_evidence = evidence_choice_from_string(
          value.at("better_evidence").get<std::string>());
      vote.reason_category = reason_category_from_string(
          value.at("reason_category").get<std::string>());
      vote.reason = value.value("reason", "");
      outcome.votes.push_back(std::move(vote));
    } catch (const StructuredOutputFailure&) {
      outcome.failed_models.push_back(model_id);
    }
  }
  std::vector<EvidenceChoice> choices;
  choices.reserve(outcome.votes.size());
  for (const auto& vote : outcome.votes) choices.push_back(vote.better_evidence);
  outcome.winner = majority_winner(choices);
  return outcome;
}

// ---- mismatch detection ----

Json finding_to_json(const MismatchFinding& finding) {
  Json verdicts = Json::object();
  for (const auto& [model, label] : finding.model_verdicts)
    verdicts[model] = to_string(label);
  Json votes = Json::array();
  for (const auto& vote : finding.comparison_votes)
    votes.push_back(Json{{"model_id", vote.model_id},
                         {"better_evidence", to_string(vote.better_evidence)},
                         {"reason_category", to_string(vote.reason_category)},
                         {"reason", vote.reason}});
  Json out{{"record_id", finding.record_id},
           {"model_verdicts", verdicts},
           {"gold_label", to_string(finding.gold_label)},
           {"flagged", finding.flagged},
           {"comparison_votes", votes}};
  out["consensus"] =
      finding.consensus ? Json(to_string(*finding.consensus)) : Json(nullptr);
  return out;
}

namespace {

// Runs fn(i) for i in [0, n) across `width` workers, preserving nothing but
// index identity; fn must handle its own synchronization.
void parallel_for(size_t n, int width, const std::function<void(size_t)>& fn) {
  int workers = std::max(1, std::min<int>(width, static_cast<int>(n)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

MismatchReport detect_mismatches(const std::vector<DatasetRecord>& records,
                                 const std::array<std::string, 3>& model_ids,
                                 const Pipeline& pipeline) {
  {
    std::set<std::string> unique(model_ids.begin(), model_ids.end());
    if (unique.size() != 3)
      throw InvariantViolation("mismatch detection needs 3 distinct models");
  }

  struct Slot {
    std::optional<MismatchFinding> finding;
    std::optional<SkipEntry> skip;
  };
  std::vector<Slot> slots(records.size());

  parallel_for(records.size(), pipeline.config().parallelism, [&](size_t i) {
    const auto& record = records[i];
    if (!record.evidence_text || trim(*record.evidence_text).empty()) {
      slots[i].skip = SkipEntry{record.id, "record lacks evidence text"};
      return;
    }
    MismatchFinding finding;
    finding.record_id = record.id;
    finding.gold_label = record.gold_label;
    try {
      for (const auto& model_id : model_ids) {
        auto outcome = pipeline.verify(record.input, EvidenceMode::dataset,
                                       *record.evidence_text, model_id);
        finding.model_verdicts[model_id] = outcome.verdict.label;
      }
    } catch (const Error& e) {
      slots[i].skip = SkipEntry{record.id, e.what()};
      return;
    }
    auto first = finding.model_verdicts.begin()->second;
    bool unanimous = std::all_of(
        finding.model_verdicts.begin(), finding.model_verdicts.end(),
        [first](const auto& entry) { return entry.second == first; });
    if (unanimous) finding.consensus = first;
    finding.flagged = unanimous && first != record.gold_label;
    slots[i].finding = std::move(finding);
  });

  MismatchReport report;
  for (auto& slot : slots) {
    if (slot.finding) report.findings.push_back(std::move(*slot.finding));
    if (slot.skip) report.skipped.push_back(std::move(*slot.skip));
  }
  return report;
}

CleanOutcome clean(const std::vector<DatasetRecord>& records,
                   const std::vector<MismatchFinding>& findings) {
  std::map<std::string, const MismatchFinding*> flagged;
  for (const auto& finding : findings)
    if (finding.flagged) flagged[finding.record_id] = &finding;

  CleanOutcome outcome;
  for (const auto& record : records) {
    auto it = flagged.find(record.id);
    if (it == flagged.end()) {
      outcome.kept.push_back(record);
      continue;
    }
    DatasetRecord removed = record;
    const auto* finding = it->second;
    std::string consensus =
        finding->consensus ? to_string(*finding->consensus) : "?";
    removed.raw["caafc_removed_reason"] =
        "unanimous model verdict '" + consensus + "' contradicts gold label '" +
        to_string(finding->gold_label) + "'";
    outcome.removed.push_back(std::move(removed));
  }
  return outcome;
}

// ---- benchmark runs ----

namespace {

Json bench_record_to_json(const BenchRecordResult& result) {
  Json out{{"kind", "record"},
           {"record_id", result.record_id},
           {"gold", result.gold}};
  if (result.predicted) out["predicted"] = *result.predicted;
  if (!result.error.empty()) out["error"] = result.error;
  return out;
}

BenchRecordResult bench_record_from_json(const Json& entry) {
  BenchRecordResult result;
  result.record_id = entry.at("record_id").get<std::string>();
  result.gold = entry.at("gold").get<std::string>();
  if (entry.contains("predicted"))
    result.predicted = entry.at("predicted").get<std::string>();
  result.error = entry.value("error", "");
  return result;
}

}  // namespace

BenchResult run_bench(const std::vector<DatasetRecord>& records,
                      const Pipeline& pipeline, const BenchOptions& options) {
  std::map<std::string, BenchRecordResult> done;
  if (options.resume && !options.checkpoint_path.empty() &&
      std::filesystem::exists(options.checkpoint_path)) {
    for (const auto& entry : read_transcript(options.checkpoint_path))
      if (entry.value("kind", "") == "record") {
        auto result = bench_record_from_json(entry);
        done[result.record_id] = std::move(result);
      }
  }

  std::unique_ptr<TranscriptWriter> checkpoint;
  if (!options.checkpoint_path.empty())
    checkpoint = std::make_unique<TranscriptWriter>(options.checkpoint_path,
                                                    options.resume);

  std::vector<BenchRecordResult> results(records.size());
  std::mutex sink_mu;
  parallel_for(records.size(), pipeline.config().parallelism, [&](size_t i) {
    const auto& record = records[i];
    if (auto it = done.find(record.id); it != done.end()) {
      results[i] = it->second;
      return;
    }
    BenchRecordResult result;
    result.record_id = record.id;
    result.gold = to_string(record.gold_label);
    try {
      std::string evidence;
      if (options.mode == EvidenceMode::dataset) {
        if (!record.evidence_text || trim(*record.evidence_text).empty())
          throw EmptyNarrative("record lacks evidence text");
        evidence = *record.evidence_text;
      }
      auto outcome = pipeline.verify(record.input, options.mode, evidence);
      result.predicted = to_string(outcome.verdict.label);
    } catch (const Error& e) {
      result.error = e.what();
    }
    {
      std::lock_guard<std::mutex> lock(sink_mu);
      if (checkpoint) checkpoint->write(bench_record_to_json(result));
    }
    results[i] = std::move(result);
  });

  BenchResult bench;
  bench.records = std::move(results);

  std::vector<std::string> gold, predicted;
  for (const auto& result : bench.records) {
    if (!result.predicted) {
      bench.skipped.push_back(SkipEntry{result.record_id, result.error});
      continue;
    }
    std::string g = result.gold;
    std::string p = *result.predicted;
    if (options.binary_map) {
      auto bg = to_binary(verdict_label_from_string(g), *options.binary_map);
      auto bp = to_binary(verdict_label_from_string(p), *options.binary_map);
      if (!bg || !bp) {
        ++bench.abstained;
        continue;
      }
      g = to_string(*bg);
      p = to_string(*bp);
    }
    gold.push_back(std::move(g));
    predicted.push_back(std::move(p));
  }

  std::vector<std::string> classes =
      options.binary_map ? std::vector<std::string>{"true", "false"}
                         : std::vector<std::string>{"true", "false",
                                                    "unverifiable"};
  if (!gold.empty())
    bench.report = classification_report(gold, predicted, classes);
  else
    bench.report.classes = classes;
  return bench;
}

Json bench_to_json(const BenchResult& bench) {
  Json skipped = Json::array();
  for (const auto& entry : bench.skipped)
    skipped.push_back(
        Json{{"record_id", entry.record_id}, {"error", entry.error}});
  Json records = Json::array();
  for (const auto& result : bench.records) {
    Json row{{"record_id", result.record_id}, {"gold", result.gold}};
    row["predicted"] = result.predicted ? Json(*result.predicted) : Json(nullptr);
    if (!result.error.empty()) row["error"] = result.error;
    records.push_back(std::move(row));
  }
  return Json{{"metrics", report_to_json(bench.report)},
              {"records", records},
              {"skipped", skipped},
              {"abstained", bench.abstained},
              {"version", kVersion}};
}

}  // namespace caafc
