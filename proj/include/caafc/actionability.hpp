#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "caafc/gateway.hpp"
#include "caafc/text.hpp"
#include "caafc/verdicts.hpp"

namespace caafc {

struct Justification;  // justify.hpp

inline constexpr int kDefaultThreshold = 4;

// Actionability rubric score: error detection 0-2, error correction 0-2,
// links 0-3; a justification is actionable at total ≥ threshold.
struct ActionabilityScore {
  int error_detection = 0;
  int error_correction = 0;
  int link_score = 0;
  int total = 0;
  bool pass = false;
};

// Validates ranges and derives total/pass. Throws InvariantViolation.
ActionabilityScore make_score(int error_detection, int error_correction,
                              int link_score,
                              int threshold = kDefaultThreshold);

// Any link credit requires at least one probed-functional cited link.
// Throws InvariantViolation on an impossible combination.
void check_link_consistency(const ActionabilityScore& score,
                            int functional_links);

struct LinkProbeResult {
  std::string url;
  bool functional = false;
  int status = 0;  // final HTTP status; 0 when no response arrived
  bool timed_out = false;
  std::string probed_at;
};

using LinkProbeFn =
    std::function<std::vector<LinkProbeResult>(const std::vector<std::string>&)>;

struct LinkProbeConfig {
  std::filesystem::path cache_dir;  // empty → no caching
  int timeout_seconds = 10;
  int max_redirects = 5;
  int concurrency = 8;
  std::function<std::string()> today = today_utc;
  std::function<std::string()> now = now_iso8601_utc;
};

// Checks whether cited links answer at all: HEAD (GET on 405), up to
// max_redirects followed manually, functional ⇔ final status in [200, 399].
// Failures never throw — they come back functional=false. Results are
// cached per (url, calendar day).
class LinkProber {
 public:
  explicit LinkProber(LinkProbeConfig config = {});

  std::vector<LinkProbeResult> probe_links(const std::vector<std::string>& urls);
  LinkProbeResult probe_one(const std::string& url);

  std::filesystem::path cache_path(const std::string& url,
                                   const std::string& day) const;

  // Adapter so a prober can stand in anywhere a LinkProbeFn is wanted.
  LinkProbeFn as_fn();

 private:
  LinkProbeConfig config_;
};

// What the judge model said about one justification.
struct JudgeAssessment {
  ActionabilityScore score;
  std::string detection_rationale;
  std::string correction_rationale;
  std::string link_rationale;
};

// Input to the revisory pass: what is still missing, per criterion.
struct RevisionFeedback {
  std::string missing_errors;
  std::string missing_corrections;
  std::string link_issues;
  ActionabilityScore source_score;
};

// Builds feedback from a failing assessment; throws InvariantViolation when
// the score already passes. Deficient criteria copy the judge's rationale
// (with a generic fallback when the judge gave none).
RevisionFeedback synthesize_feedback(const JudgeAssessment& assessment);

// Scores a justification: detection/correction come from a judge model and
// the link level from probe results gated by the judge's relevance and
// supportiveness calls.
class ActionabilityScorer {
 public:
  ActionabilityScorer(Gateway& gateway, std::string judge_model_id,
                      int threshold = kDefaultThreshold,
                      int repair_budget = 1);

  // probes must cover every cited URL of the justification.
  JudgeAssessment score(const std::string& claim_text,
                        const Justification& justification,
                        const std::vector<SubclaimVerdict>& verdicts,
                        const std::vector<LinkProbeResult>& probes,
                        RunBudget* budget = nullptr) const;

  int threshold() const noexcept { return threshold_; }

 private:
  Gateway* gateway_;
  std::string judge_model_id_;
  int threshold_;
  int repair_budget_;
};

}  // namespace caafc
