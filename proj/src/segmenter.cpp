#include "caafc/segmenter.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "caafc/errors.hpp"
#include "caafc/prompt.hpp"
#include "caafc/prompts.hpp"
#include "caafc/schemas.hpp"
#include "caafc/text.hpp"

namespace caafc {

int count_speaker_tags(std::string_view text) {
  // Matches "[<letters><digits>]:" — e.g. "[A1]:", "[Bob2]:".
  int count = 0;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '[') {
      ++i;
      continue;
    }
    size_t j = i + 1;
    size_t letters = 0;
    while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) {
      ++j;
      ++letters;
    }
    size_t digits = 0;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      ++j;
      ++digits;
    }
    if (letters > 0 && digits > 0 && j + 1 < text.size() && text[j] == ']' &&
        text[j + 1] == ':') {
      ++count;
      i = j + 2;
    } else {
      ++i;
    }
  }
  return count;
}

void validate_claim_input(const ClaimInput& input) {
  if (trim(input.id).empty())
    throw InvariantViolation("ClaimInput.id must be non-empty");
  if (trim(input.text).empty())
    throw InvariantViolation("ClaimInput.text must be non-empty (id '" +
                             input.id + "')");
  if (input.kind == InputKind::dialogue && count_speaker_tags(input.text) < 2)
    throw InvariantViolation(
        "dialogue input '" + input.id +
        "' must contain at least two speaker-tagged turns like [A1]:");
}

ClaimInput normalize_dialogue(const std::vector<DialogueTurn>& turns) {
  if (turns.empty()) throw EmptyDialogue("normalize_dialogue: no turns given");
  std::map<std::string, int> per_speaker;
  std::string text;
  for (const auto& turn : turns) {
    if (trim(turn.speaker).empty())
      throw EmptyDialogue("normalize_dialogue: turn with empty speaker");
    int n = ++per_speaker[turn.speaker];
    if (!text.empty()) text += '\n';
    text += "[" + turn.speaker + std::to_string(n) + "]: " + turn.utterance;
  }
  ClaimInput out;
  out.kind = InputKind::dialogue;
  out.text = std::move(text);
  return out;
}

namespace {

// Strips one leading list marker or speaker tag; returns true if changed.
bool strip_leading_marker(std::string& s) {
  if (s.empty()) return false;
  // Bullets: "- ", "* ", "+ " (or a bare marker with nothing after it).
  if ((s[0] == '-' || s[0] == '*' || s[0] == '+') &&
      (s.size() == 1 || s[1] == ' ')) {
    s.erase(0, std::min<size_t>(2, s.size()));
    return true;
  }
  // Numbering: "1.", "12)", "(3)" followed by space or end of marker.
  size_t i = 0;
  bool paren = false;
  if (s[0] == '(') {
    paren = true;
    i = 1;
  }
  size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ++i;
    ++digits;
  }
  if (digits > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) {
    size_t end = i + 1;
    if (end == s.size() || s[end] == ' ') {
      s.erase(0, end);
      return true;
    }
  }
  (void)paren;
  // Speaker tags: "[A1]:"
  if (s[0] == '[') {
    size_t j = 1;
    while (j < s.size() && s[j] != ']') ++j;
    if (j + 1 < s.size() && s[j + 1] == ':' && count_speaker_tags(s) >= 1 &&
        s.find("]:") == j) {
      s.erase(0, j + 2);
      return true;
    }
  }
  return false;
}

}  // namespace

std::string strip_claim_markup(std::string_view raw) {
  std::string s = trim(raw);
  while (strip_leading_marker(s)) s = trim(s);
  // Full-span wrapping quotes only.
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') &&
      s.back() == s.front()) {
    std::string inner = s.substr(1, s.size() - 2);
    if (inner.find(s.front()) == std::string::npos) s = trim(inner);
  }
  return s;
}

Segmenter::Segmenter(Gateway& gateway, std::string model_id, int repair_budget)
    : gateway_(&gateway),
      model_id_(std::move(model_id)),
      repair_budget_(repair_budget) {}

std::vector<AtomicClaim> Segmenter::segment(const ClaimInput& input,
                                            RunBudget* budget) const {
  validate_claim_input(input);

  GenerationRequest request;
  request.model_id = model_id_;
  request.user_text =
      render(prompts::segmentation(), {{"text", input.text}});
  request.tags = {"segmenter", input.id};

  Json value = gateway_->complete_structured(request, "subclaim_list",
                                             repair_budget_, budget);

  std::vector<AtomicClaim> claims;
  std::set<std::string> seen;
  for (const auto& entry : value.at("subclaims")) {
    std::string text = strip_claim_markup(entry.get<std::string>());
    if (text.empty()) continue;
    if (!seen.insert(normalize_match(text)).second) continue;  // dedupe
    claims.push_back({static_cast<int>(claims.size()), std::move(text)});
  }
  if (claims.empty())
    throw EmptyExtraction("segmenter produced no usable subclaims for input '" +
                          input.id + "'");
  return claims;
}

}  // namespace caafc
