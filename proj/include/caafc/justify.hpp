#pragma once

#include <optional>
#include <string>
#include <vector>

#include "caafc/actionability.hpp"
#include "caafc/gateway.hpp"
#include "caafc/retrieval.hpp"
#include "caafc/transcript.hpp"
#include "caafc/verdicts.hpp"

namespace caafc {

inline constexpr int kDefaultMaxRevisions = 3;

// A claim-level justification; revision 0 is the justifier's first output,
// each revisory pass adds one.
struct Justification {
  std::string text;
  std::optional<std::string> corrected_claim;
  std::vector<std::string> cited_urls;
  int revision = 0;
};

// URLs the justification actually cites: explicit http(s) mentions plus
// evidence-bundle URLs referenced without their scheme.
std::vector<std::string> cited_urls(const std::string& text,
                                    const EvidenceBundle& bundle);

// Renders a RevisionFeedback into the block the revisory prompt consumes.
std::string format_feedback(const RevisionFeedback& feedback);

class JustificationEngine {
 public:
  JustificationEngine(Gateway& gateway, std::string justifier_model_id,
                      std::string revisory_model_id, int repair_budget = 1);

  // Combines subclaim verdicts into one actionable justification.
  Justification justify(const std::string& claim_text,
                        const EvidenceBundle& bundle,
                        const std::vector<SubclaimVerdict>& verdicts,
                        RunBudget* budget = nullptr) const;

  // One revisory pass. The bundle, when given, lets scheme-less source
  // references resolve back to full URLs.
  Justification revise(const Justification& justification,
                       const RevisionFeedback& feedback,
                       RunBudget* budget = nullptr,
                       const EvidenceBundle* bundle = nullptr) const;

 private:
  Gateway* gateway_;
  std::string justifier_model_id_;
  std::string revisory_model_id_;
  int repair_budget_;
};

struct RefineOutcome {
  Justification justification;
  ActionabilityScore score;
  bool below_threshold = false;
  int revisions = 0;  // revise calls actually made
};

// justify → score, then revise/score while the total sits under the
// scorer's threshold and iterations remain. A true final verdict returns
// after the first scoring pass (true claims are not actionable, so their
// low scores are by design, not a defect). Keeps the best-scoring
// justification seen; below_threshold marks a best that never reached the
// bar. Every iteration (justification, score, feedback) is appended to the
// transcript when one is given.
RefineOutcome refine_loop(const JustificationEngine& engine,
                          const ActionabilityScorer& scorer,
                          const LinkProbeFn& probe,
                          const std::string& claim_text,
                          const EvidenceBundle& bundle,
                          const std::vector<SubclaimVerdict>& verdicts,
                          const FinalVerdict& final_verdict,
                          int max_iterations = kDefaultMaxRevisions,
                          RunBudget* budget = nullptr,
                          TranscriptWriter* transcript = nullptr);

}  // namespace caafc
