#include "caafc/justify.hpp"

#include <set>

#include "caafc/errors.hpp"
#include "caafc/prompt.hpp"
#include "caafc/prompts.hpp"
#include "caafc/schemas.hpp"
#include "caafc/text.hpp"

namespace caafc {

std::vector<std::string> cited_urls(const std::string& text,
                                    const EvidenceBundle& bundle) {
  std::vector<std::string> urls = extract_urls(text);
  std::set<std::string> seen(urls.begin(), urls.end());
  for (const auto& item : bundle.items) {
    if (item.source_url.empty() || seen.count(item.source_url)) continue;
    std::string bare = item.source_url;
    for (const char* prefix : {"https://", "http://"}) {
      if (bare.rfind(prefix, 0) == 0) {
        bare = bare.substr(std::string(prefix).size());
        break;
      }
    }
    if (!bare.empty() && text.find(bare) != std::string::npos) {
      urls.push_back(item.source_url);
      seen.insert(item.source_url);
    }
  }
  return urls;
}

std::string format_feedback(const RevisionFeedback& feedback) {
  std::string out;
  if (!trim(feedback.missing_errors).empty())
    out += "- Undetected or understated errors: " + feedback.missing_errors +
           "\n";
  if (!trim(feedback.missing_corrections).empty())
    out += "- Missing corrections: " + feedback.missing_corrections + "\n";
  if (!trim(feedback.link_issues).empty())
    out += "- Link problems: " + feedback.link_issues + "\n";
  if (out.empty()) return "(no specific feedback)";
  out.pop_back();  // no trailing newline inside the prompt
  return out;
}

JustificationEngine::JustificationEngine(Gateway& gateway,
                                         std::string justifier_model_id,
                                         std::string revisory_model_id,
                                         int repair_budget)
    : gateway_(&gateway),
      justifier_model_id_(std::move(justifier_model_id)),
      revisory_model_id_(std::move(revisory_model_id)),
      repair_budget_(repair_budget) {}

namespace {

Json verdicts_to_json(const std::vector<SubclaimVerdict>& verdicts) {
  Json arr = Json::array();
  for (const auto& verdict : verdicts)
    arr.push_back(Json{{"text", verdict.subclaim_text},
                       {"label", to_string(verdict.label)},
                       {"justification", verdict.justification}});
  return Json{{"subclaims", std::move(arr)}};
}

}  // namespace

Justification JustificationEngine::justify(
    const std::string& claim_text, const EvidenceBundle& bundle,
    const std::vector<SubclaimVerdict>& verdicts, RunBudget* budget) const {
  if (verdicts.empty())
    throw InvariantViolation("justify requires at least one subclaim verdict");

  GenerationRequest request;
  request.model_id = justifier_model_id_;
  request.user_text =
      render(prompts::justifier(),
             {{"claim", claim_text},
              {"evidence", bundle.narrative},
              {"json_object", verdicts_to_json(verdicts).dump()}});
  request.max_output = 4096;
  request.tags = {"justifier"};

  Json value = gateway_->complete_structured(request, "justification_object",
                                             repair_budget_, budget);
  Justification justification;
  justification.text = value.at("justification").get<std::string>();
  if (value.contains("corrected_claim"))
    justification.corrected_claim =
        value["corrected_claim"].get<std::string>();
  justification.cited_urls = cited_urls(justification.text, bundle);
  justification.revision = 0;
  return justification;
}

Justification JustificationEngine::revise(const Justification& justification,
                                          const RevisionFeedback& feedback,
                                          RunBudget* budget,
                                          const EvidenceBundle* bundle) const {
  GenerationRequest request;
  request.model_id = revisory_model_id_;
  request.user_text = render(prompts::revisory(),
                             {{"justification", justification.text},
                              {"feedback", format_feedback(feedback)}});
  request.max_output = 4096;
  request.tags = {"revisory"};

  Json value = gateway_->complete_structured(request, "justification_object",
                                             repair_budget_, budget);
  Justification revised;
  revised.text = value.at("justification").get<std::string>();
  if (value.contains("corrected_claim"))
    revised.corrected_claim = value["corrected_claim"].get<std::string>();
  else
    revised.corrected_claim = justification.corrected_claim;
  if (bundle)
    revised.cited_urls = cited_urls(revised.text, *bundle);
  else
    revised.cited_urls = extract_urls(revised.text);
  revised.revision = justification.revision + 1;
  return revised;
}

namespace {

Json score_to_json(const ActionabilityScore& score) {
  return Json{{"error_detection", score.error_detection},
              {"error_correction", score.error_correction},
              {"link_score", score.link_score},
              {"total", score.total},
              {"pass", score.pass}};
}

void log_iteration(TranscriptWriter* transcript,
                   const Justification& justification,
                   const JudgeAssessment& assessment,
                   const RevisionFeedback* feedback) {
  if (!transcript) return;
  Json entry{{"kind", "refine_iteration"},
             {"revision", justification.revision},
             {"text", justification.text},
             {"cited_urls", justification.cited_urls},
             {"score", score_to_json(assessment.score)}};
  if (justification.corrected_claim)
    entry["corrected_claim"] = *justification.corrected_claim;
  if (feedback)
    entry["feedback"] = Json{{"missing_errors", feedback->missing_errors},
                             {"missing_corrections",
                              feedback->missing_corrections},
                             {"link_issues", feedback->link_issues}};
  transcript->write(entry);
}

}  // namespace

RefineOutcome refine_loop(const JustificationEngine& engine,
                          const ActionabilityScorer& scorer,
                          const LinkProbeFn& probe,
                          const std::string& claim_text,
                          const EvidenceBundle& bundle,
                          const std::vector<SubclaimVerdict>& verdicts,
                          const FinalVerdict& final_verdict,
                          int max_iterations, RunBudget* budget,
                          TranscriptWriter* transcript) {
  if (max_iterations < 0)
    throw InvariantViolation("refine_loop max_iterations must be ≥ 0");

  Justification current =
      engine.justify(claim_text, bundle, verdicts, budget);
  JudgeAssessment assessment = scorer.score(
      claim_text, current, verdicts, probe(current.cited_urls), budget);
  log_iteration(transcript, current, assessment, nullptr);

  // True claims are outside the actionability gate: nothing to correct, so
  // low rubric scores are expected and not revised away.
  if (final_verdict.label == VerdictLabel::True)
    return {current, assessment.score, false, 0};

  Justification best = current;
  ActionabilityScore best_score = assessment.score;
  int revisions = 0;
  while (assessment.score.total < scorer.threshold() &&
         revisions < max_iterations) {
    RevisionFeedback feedback = synthesize_feedback(assessment);
    current = engine.revise(current, feedback, budget, &bundle);
    ++revisions;
    assessment = scorer.score(claim_text, current, verdicts,
                              probe(current.cited_urls), budget);
    log_iteration(transcript, current, assessment, &feedback);
    if (assessment.score.total > best_score.total) {  // strict: earliest wins ties
      best = current;
      best_score = assessment.score;
    }
  }

  RefineOutcome outcome;
  outcome.justification = std::move(best);
  outcome.score = best_score;
  outcome.below_threshold = best_score.total < scorer.threshold();
  outcome.revisions = revisions;
  return outcome;
}

}  // namespace caafc
