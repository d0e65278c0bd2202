#include "caafc/pipeline.hpp"

#include <memory>

#include "caafc/errors.hpp"
#include "caafc/text.hpp"

namespace caafc {

std::string to_string(EvidenceMode mode) {
  return mode == EvidenceMode::retrieved ? "retrieved" : "dataset";
}

EvidenceMode evidence_mode_from_string(const std::string& text) {
  std::string t = casefold(trim(text));
  if (t == "retrieved") return EvidenceMode::retrieved;
  if (t == "dataset") return EvidenceMode::dataset;
  throw ConfigError("mode must be 'retrieved' or 'dataset', got '" + text +
                    "'");
}

Pipeline::Pipeline(Gateway& gateway, RunConfig config, Retriever* retriever,
                   LinkProbeFn probe, TranscriptWriter* transcript)
    : gateway_(&gateway),
      config_(std::move(config)),
      retriever_(retriever),
      probe_(std::move(probe)),
      transcript_(transcript) {
  validate_config(config_);
}

namespace {

// Rethrows the in-flight exception wrapped with the stage that raised it.
[[noreturn]] void stage_fail(const std::string& stage) {
  try {
    throw;
  } catch (const StageError&) {
    throw;  // already tagged by an inner stage
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

EvidenceBundle Pipeline::gather_evidence(
    const std::string& claim_text, const std::vector<AtomicClaim>& claims,
    const std::optional<Date>& claim_date, EvidenceMode mode,
    const std::string& dataset_evidence, const std::string& model_id,
    RunBudget* budget) const {
  if (mode == EvidenceMode::dataset) return dataset_bundle(dataset_evidence);
  if (!retriever_)
    throw ConfigError("retrieved mode needs a retrieval backend");
  SourceSelector selector(*gateway_, model_id);
  auto sources = selector.select(claim_text, budget);
  std::string query = build_query(claims, claim_date, sources);
  return canonicalize(retriever_->retrieve(query, config_.retrieval_backend));
}

VerifyOutcome Pipeline::verify(const ClaimInput& input, EvidenceMode mode,
                               const std::string& dataset_evidence,
                               const std::string& model_override) const {
  auto model = [&](const std::string& stage) {
    return model_override.empty() ? config_.models.at(stage) : model_override;
  };
  std::unique_ptr<RunBudget> budget;
  if (config_.call_budget > 0)
    budget = std::make_unique<RunBudget>(config_.call_budget);

  VerifyOutcome outcome;
  try {
    Segmenter segmenter(*gateway_, model("segmenter"));
    outcome.atomic_claims = segmenter.segment(input, budget.get());
  } catch (...) {
    stage_fail("segmenter");
  }
  try {
    outcome.bundle = gather_evidence(input.text, outcome.atomic_claims,
                                     input.claim_date, mode, dataset_evidence,
                                     model("segmenter"), budget.get());
  } catch (...) {
    stage_fail("evidence");
  }
  try {
    FactChecker checker(*gateway_, model("fact_checker"));
    outcome.verdict.subclaims =
        checker.check_subclaims(outcome.atomic_claims, outcome.bundle,
                                budget.get());
    std::vector<VerdictLabel> labels;
    labels.reserve(outcome.verdict.subclaims.size());
    for (const auto& v : outcome.verdict.subclaims) labels.push_back(v.label);
    outcome.verdict.label = aggregate(labels);
  } catch (...) {
    stage_fail("fact_checker");
  }
  outcome.model_calls = budget ? budget->used() : 0;
  return outcome;
}

PipelineResult Pipeline::run(const ClaimInput& input, EvidenceMode mode,
                             const std::string& dataset_evidence) const {
  PipelineResult result;
  result.input = input;
  result.checked = verify(input, mode, dataset_evidence);
  std::unique_ptr<RunBudget> budget;
  if (config_.call_budget > 0) {
    budget = std::make_unique<RunBudget>(config_.call_budget);
    // Spend against one per-record cap; the verdict stages already used part.
    for (int i = 0; i < result.checked.model_calls; ++i) budget->consume();
  }
  try {
    JustificationEngine engine(*gateway_, config_.models.at("justifier"),
                               config_.models.at("revisory"));
    ActionabilityScorer scorer(*gateway_, config_.models.at("judge"),
                               config_.threshold);
    result.refinement = refine_loop(
        engine, scorer, probe_, input.text, result.checked.bundle,
        result.checked.verdict.subclaims, result.checked.verdict,
        config_.max_revisions, budget.get(), transcript_);
  } catch (...) {
    stage_fail("refinement");
  }
  result.checked.model_calls = budget ? budget->used()
                                      : result.checked.model_calls;
  return result;
}

Json report_to_json(const PipelineResult& result, int threshold,
                    const std::string& manifest_ref) {
  Json atomic = Json::array();
  for (const auto& claim : result.checked.atomic_claims)
    atomic.push_back(claim.text);

  Json verdicts = Json::array();
  for (const auto& v : result.checked.verdict.subclaims)
    verdicts.push_back(Json{{"subclaim", v.subclaim_text},
                            {"label", to_string(v.label)},
                            {"justification", v.justification}});

  const auto& bundle = result.checked.bundle;
  Json evidence{{"query", bundle.query},
                {"backend_id", bundle.backend_id},
                {"narrative_hash", hash16(bundle.narrative)},
                {"item_count", bundle.items.size()}};

  const auto& refined = result.refinement;
  Json cited = Json::array();
  for (const auto& url : refined.justification.cited_urls) cited.push_back(url);
  Json justification{{"text", refined.justification.text},
                     {"cited_urls", cited},
                     {"revision", refined.justification.revision}};
  justification["corrected_claim"] =
      refined.justification.corrected_claim
          ? Json(*refined.justification.corrected_claim)
          : Json(nullptr);

  Json actionability{{"error_detection", refined.score.error_detection},
                     {"error_correction", refined.score.error_correction},
                     {"link_score", refined.score.link_score},
                     {"total", refined.score.total},
                     {"pass", refined.score.pass},
                     {"threshold", threshold},
                     {"below_threshold", refined.below_threshold},
                     {"revisions", refined.revisions}};

  return Json{{"version", kVersion},
              {"manifest", manifest_ref},
              {"claim_id", result.input.id},
              {"input_kind",
               result.input.kind == InputKind::dialogue ? "dialogue" : "claim"},
              {"claim_text", result.input.text},
              {"atomic_claims", atomic},
              {"evidence", evidence},
              {"subclaim_verdicts", verdicts},
              {"final_label", to_string(result.checked.verdict.label)},
              {"justification", justification},
              {"actionability", actionability},
              {"model_calls", result.checked.model_calls}};
}

}  // namespace caafc
