#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caafc/date.hpp"
#include "caafc/gateway.hpp"

namespace caafc {

enum class InputKind { claim, dialogue };

// Pipeline entry point: a claim, or a dialogue already joined into
// speaker-tagged lines ("[A1]: ...").
struct ClaimInput {
  std::string id;
  InputKind kind = InputKind::claim;
  std::string text;
  std::optional<Date> claim_date;
  std::map<std::string, std::string> metadata;  // source, author, ...
};

struct DialogueTurn {
  std::string speaker;
  std::string utterance;
};

// A unit claim produced by segmentation; indices are contiguous from 0.
struct AtomicClaim {
  int index = 0;
  std::string text;
};

// Enforces the ClaimInput invariants (non-empty text; dialogues carry at
// least two speaker-tagged turns). Throws InvariantViolation.
void validate_claim_input(const ClaimInput& input);

// Joins turns into "[<speaker><per-speaker turn number>]: <utterance>" lines
// ([A1], [B1], [A2], ...). Throws EmptyDialogue for no turns.
ClaimInput normalize_dialogue(const std::vector<DialogueTurn>& turns);

// Counts "[<speaker><n>]:" tags in a dialogue text.
int count_speaker_tags(std::string_view text);

// Cleans one model-reported subclaim: trims, strips list markers
// (-, *, 1., 2)), speaker tags, and full-span wrapping quotes.
std::string strip_claim_markup(std::string_view raw);

// The Extractor-Segmentor: prompts the model to decompose the input into
// atomic sub-claims (exhaustive, not only check-worthy ones).
class Segmenter {
 public:
  Segmenter(Gateway& gateway, std::string model_id, int repair_budget = 1);

  // Returns ≥1 cleaned, de-duplicated atomic claims. Throws EmptyExtraction
  // when the model yields none; propagates StructuredOutputFailure.
  std::vector<AtomicClaim> segment(const ClaimInput& input,
                                   RunBudget* budget = nullptr) const;

 private:
  Gateway* gateway_;
  std::string model_id_;
  int repair_budget_;
};

}  // namespace caafc
