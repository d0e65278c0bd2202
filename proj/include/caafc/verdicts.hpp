#pragma once

#include <string>
#include <vector>

#include "caafc/gateway.hpp"
#include "caafc/retrieval.hpp"
#include "caafc/segmenter.hpp"

namespace caafc {

enum class VerdictLabel { True, False, Unverifiable };

std::string to_string(VerdictLabel label);
// Accepts "true"/"false"/"unverifiable" (any case); throws InvariantViolation.
VerdictLabel verdict_label_from_string(const std::string& text);

struct SubclaimVerdict {
  std::string subclaim_text;
  VerdictLabel label = VerdictLabel::Unverifiable;
  std::string justification;
};

struct FinalVerdict {
  VerdictLabel label = VerdictLabel::Unverifiable;
  std::vector<SubclaimVerdict> subclaims;
};

// Claim-level aggregation: any false → false; else any unverifiable →
// unverifiable; else true. Throws EmptyInput on an empty list.
VerdictLabel aggregate(const std::vector<VerdictLabel>& labels);

// Per-subclaim fact-checking against an evidence narrative.
class FactChecker {
 public:
  FactChecker(Gateway& gateway, std::string model_id, int repair_budget = 1);

  // Returns one verdict per atomic claim, aligned by normalized text with a
  // positional fallback. A count mismatch triggers exactly one targeted
  // re-prompt; a second mismatch throws VerdictCountMismatch.
  std::vector<SubclaimVerdict> check_subclaims(
      const std::vector<AtomicClaim>& claims, const EvidenceBundle& evidence,
      RunBudget* budget = nullptr) const;

 private:
  Gateway* gateway_;
  std::string model_id_;
  int repair_budget_;
};

}  // namespace caafc
