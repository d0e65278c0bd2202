#pragma once

#include <optional>
#include <string>
#include <vector>

#include "caafc/actionability.hpp"
#include "caafc/config.hpp"
#include "caafc/justify.hpp"
#include "caafc/retrieval.hpp"
#include "caafc/segmenter.hpp"
#include "caafc/verdicts.hpp"

namespace caafc {

// Where the evidence narrative comes from: live retrieval or the text
// shipped with a dataset record.
enum class EvidenceMode { retrieved, dataset };

std::string to_string(EvidenceMode mode);
// Accepts "retrieved" / "dataset"; throws ConfigError.
EvidenceMode evidence_mode_from_string(const std::string& text);

// Verdict-level result: segmentation → evidence → per-subclaim checking →
// aggregation, no justification yet.
struct VerifyOutcome {
  std::vector<AtomicClaim> atomic_claims;
  EvidenceBundle bundle;
  FinalVerdict verdict;
  int model_calls = 0;  // physical completions spent on this record
};

// Verdict plus the refined justification and its score.
struct PipelineResult {
  ClaimInput input;
  VerifyOutcome checked;
  RefineOutcome refinement;
};

// The assembled fact-checking pipeline. Stateless across calls; concurrent
// use on distinct inputs is safe. Every stage failure is rethrown as
// StageError naming the stage.
class Pipeline {
 public:
  // retriever may be null when only dataset mode will be used; probe may be
  // empty when only verify() will be used.
  Pipeline(Gateway& gateway, RunConfig config, Retriever* retriever = nullptr,
           LinkProbeFn probe = {}, TranscriptWriter* transcript = nullptr);

  // Segment → evidence → check_subclaims → aggregate. dataset mode takes
  // the record's own narrative; model_override, when non-empty, reassigns
  // every model-bearing stage (the mismatch protocol votes per model).
  VerifyOutcome verify(const ClaimInput& input, EvidenceMode mode,
                       const std::string& dataset_evidence = "",
                       const std::string& model_override = "") const;

  // verify + refine_loop: the full actionable-justification pipeline.
  PipelineResult run(const ClaimInput& input, EvidenceMode mode,
                     const std::string& dataset_evidence = "") const;

  const RunConfig& config() const noexcept { return config_; }

 private:
  EvidenceBundle gather_evidence(const std::string& claim_text,
                                 const std::vector<AtomicClaim>& claims,
                                 const std::optional<Date>& claim_date,
                                 EvidenceMode mode,
                                 const std::string& dataset_evidence,
                                 const std::string& model_id,
                                 RunBudget* budget) const;

  Gateway* gateway_;
  RunConfig config_;
  Retriever* retriever_;
  LinkProbeFn probe_;
  TranscriptWriter* transcript_;
};

// Deterministic single-record report: no timestamps, no durations (those
// live in the run manifest). The evidence bundle is referenced by query,
// backend and narrative hash rather than inlined.
Json report_to_json(const PipelineResult& result, int threshold,
                    const std::string& manifest_ref = "");

}  // namespace caafc
