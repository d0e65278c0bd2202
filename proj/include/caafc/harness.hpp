#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "caafc/datasets.hpp"
#include "caafc/metrics.hpp"
#include "caafc/pipeline.hpp"

namespace caafc {

// ---- evidence comparison (majority vote over three models) ----

enum class EvidenceChoice { evidence_1, evidence_2, tie };

std::string to_string(EvidenceChoice choice);
// Accepts the canonical strings; throws InvariantViolation.
EvidenceChoice evidence_choice_from_string(const std::string& text);

enum class ReasonCategory { more_context, more_updated_information, other };

std::string to_string(ReasonCategory category);
ReasonCategory reason_category_from_string(const std::string& text);

struct ComparisonVote {
  std::string model_id;
  EvidenceChoice better_evidence = EvidenceChoice::tie;
  ReasonCategory reason_category = ReasonCategory::other;
  std::string reason;
};

enum class ComparisonWinner { evidence_1, evidence_2, tie, unresolved };

std::string to_string(ComparisonWinner winner);

struct ComparisonOutcome {
  ComparisonWinner winner = ComparisonWinner::unresolved;
  std::vector<ComparisonVote> votes;
  std::vector<std::string> failed_models;  // structured output never parsed
};

// Pure majority rule: the choice backed by ≥2 of the cast votes wins;
// anything else (three-way splits, too few votes) is unresolved.
ComparisonWinner majority_winner(const std::vector<EvidenceChoice>& votes);

// Asks each of the three models which evidence serves the claim better and
// applies majority_winner over the votes that parsed.
ComparisonOutcome compare_evidence(Gateway& gateway, const std::string& claim,
                                   const std::string& evidence_a,
                                   const std::string& evidence_b,
                                   const std::array<std::string, 3>& model_ids,
                                   int repair_budget = 1,
                                   RunBudget* budget = nullptr);

// ---- unanimous-contradiction mismatch detection ----

struct MismatchFinding {
  std::string record_id;
  std::map<std::string, VerdictLabel> model_verdicts;  // exactly 3 entries
  std::optional<VerdictLabel> consensus;  // set only on 3-way agreement
  VerdictLabel gold_label = VerdictLabel::Unverifiable;
  bool flagged = false;  // consensus present and ≠ gold_label
  std::vector<ComparisonVote> comparison_votes;
};

Json finding_to_json(const MismatchFinding& finding);

struct SkipEntry {
  std::string record_id;
  std::string error;
};

struct MismatchReport {
  std::vector<MismatchFinding> findings;  // one per checked record, in order
  std::vector<SkipEntry> skipped;         // never silently dropped
};

// Votes each record's dataset evidence past three independently assigned
// models (full verdict pipeline per model); flags records where all three
// agree on a label that contradicts gold. Records that error are skipped
// with a log entry. Record-level parallelism follows the pipeline config.
MismatchReport detect_mismatches(const std::vector<DatasetRecord>& records,
                                 const std::array<std::string, 3>& model_ids,
                                 const Pipeline& pipeline);

struct CleanOutcome {
  std::vector<DatasetRecord> kept;
  std::vector<DatasetRecord> removed;  // raw gains "caafc_removed_reason"
};

// Splits records into kept/removed on the flagged findings. The partitions
// are disjoint and exhaustive over the input.
CleanOutcome clean(const std::vector<DatasetRecord>& records,
                   const std::vector<MismatchFinding>& findings);

// ---- benchmark runs ----

struct BenchOptions {
  EvidenceMode mode = EvidenceMode::dataset;
  std::optional<BinaryMap> binary_map;     // set → two-class scoring
  std::filesystem::path checkpoint_path;   // per-record JSONL; empty → none
  bool resume = false;                     // reuse checkpointed records
};

struct BenchRecordResult {
  std::string record_id;
  std::string gold;                   // canonical label string
  std::optional<std::string> predicted;  // empty on error
  std::string error;
};

struct BenchResult {
  ClassificationReport report;
  std::vector<BenchRecordResult> records;  // dataset order
  std::vector<SkipEntry> skipped;
  int abstained = 0;  // records dropped by the abstain binary map
};

// Verifies every record, checkpointing each outcome as it lands; computes
// the classification report over the successful ones. With resume set,
// records already present in the checkpoint are not re-verified, so an
// interrupted run finishes to the same report.
BenchResult run_bench(const std::vector<DatasetRecord>& records,
                      const Pipeline& pipeline, const BenchOptions& options);

Json bench_to_json(const BenchResult& bench);

}  // namespace caafc
