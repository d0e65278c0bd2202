#include "caafc/verdicts.hpp"

#include <optional>
#include <set>

#include "caafc/errors.hpp"
#include "caafc/prompt.hpp"
#include "caafc/prompts.hpp"
#include "caafc/schemas.hpp"
#include "caafc/text.hpp"

namespace caafc {

std::string to_string(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::True:
      return "true";
    case VerdictLabel::False:
      return "false";
    case VerdictLabel::Unverifiable:
      return "unverifiable";
  }
  throw InvariantViolation("unknown VerdictLabel value");
}

VerdictLabel verdict_label_from_string(const std::string& text) {
  std::string t = casefold(trim(text));
  if (t == "true") return VerdictLabel::True;
  if (t == "false") return VerdictLabel::False;
  if (t == "unverifiable") return VerdictLabel::Unverifiable;
  throw InvariantViolation("not a verdict label: '" + text + "'");
}

VerdictLabel aggregate(const std::vector<VerdictLabel>& labels) {
  if (labels.empty())
    throw EmptyInput("aggregate requires at least one subclaim label");
  bool any_unverifiable = false;
  for (VerdictLabel label : labels) {
    if (label == VerdictLabel::False) return VerdictLabel::False;
    if (label == VerdictLabel::Unverifiable) any_unverifiable = true;
  }
  return any_unverifiable ? VerdictLabel::Unverifiable : VerdictLabel::True;
}

FactChecker::FactChecker(Gateway& gateway, std::string model_id,
                         int repair_budget)
    : gateway_(&gateway),
      model_id_(std::move(model_id)),
      repair_budget_(repair_budget) {}

namespace {

struct RawEntry {
  std::string text;
  VerdictLabel label;
  std::string justification;
};

std::vector<RawEntry> parse_entries(const Json& value) {
  std::vector<RawEntry> entries;
  for (const auto& j : value.at("subclaims")) {
    RawEntry entry;
    entry.text = j.at("text").get<std::string>();
    entry.label = verdict_label_from_string(j.at("label").get<std::string>());
    entry.justification = j.value("justification", std::string());
    entries.push_back(std::move(entry));
  }
  return entries;
}

// Pair claims with entries: normalized-text match first, positional fill for
// the rest. The stored subclaim_text is always the atomic claim's own text.
std::vector<SubclaimVerdict> align(const std::vector<AtomicClaim>& claims,
                                   std::vector<RawEntry> entries) {
  std::vector<std::optional<size_t>> chosen(claims.size());
  std::vector<bool> used(entries.size(), false);
  for (size_t i = 0; i < claims.size(); ++i) {
    std::string key = normalize_match(claims[i].text);
    for (size_t k = 0; k < entries.size(); ++k) {
      if (!used[k] && normalize_match(entries[k].text) == key) {
        chosen[i] = k;
        used[k] = true;
        break;
      }
    }
  }
  size_t next_unused = 0;
  std::vector<SubclaimVerdict> verdicts;
  verdicts.reserve(claims.size());
  for (size_t i = 0; i < claims.size(); ++i) {
    size_t k;
    if (chosen[i]) {
      k = *chosen[i];
    } else {
      while (next_unused < entries.size() && used[next_unused]) ++next_unused;
      k = next_unused;
      used[k] = true;
    }
    SubclaimVerdict verdict;
    verdict.subclaim_text = claims[i].text;
    verdict.label = entries[k].label;
    verdict.justification = trim(entries[k].justification).empty()
                                ? "(no justification given)"
                                : entries[k].justification;
    verdicts.push_back(std::move(verdict));
  }
  return verdicts;
}

std::string describe_mismatch(const std::vector<AtomicClaim>& claims,
                              const std::vector<RawEntry>& entries) {
  std::set<std::string> entry_keys;
  for (const auto& entry : entries) entry_keys.insert(normalize_match(entry.text));
  std::set<std::string> claim_keys;
  std::vector<std::string> missing;
  for (const auto& claim : claims) {
    claim_keys.insert(normalize_match(claim.text));
    if (!entry_keys.count(normalize_match(claim.text)))
      missing.push_back(claim.text);
  }
  std::vector<std::string> extra;
  for (const auto& entry : entries)
    if (!claim_keys.count(normalize_match(entry.text))) extra.push_back(entry.text);

  std::string note = "Your previous answer contained " +
                     std::to_string(entries.size()) + " entries but there are " +
                     std::to_string(claims.size()) + " sub-claims.";
  if (!missing.empty()) note += " Missing sub-claims: " + quoted_list(missing) + ".";
  if (!extra.empty()) note += " Unexpected entries: " + quoted_list(extra) + ".";
  note +=
      " Answer again with exactly one entry per sub-claim, in the order "
      "given, using the same JSON format.";
  return note;
}

}  // namespace

std::vector<SubclaimVerdict> FactChecker::check_subclaims(
    const std::vector<AtomicClaim>& claims, const EvidenceBundle& evidence,
    RunBudget* budget) const {
  if (claims.empty())
    throw InvariantViolation("check_subclaims requires at least one subclaim");
  if (trim(evidence.narrative).empty())
    throw InvariantViolation(
        "check_subclaims requires a non-empty evidence narrative");

  std::vector<std::string> texts;
  texts.reserve(claims.size());
  for (const auto& claim : claims) texts.push_back(claim.text);

  GenerationRequest request;
  request.model_id = model_id_;
  request.user_text = render(prompts::fact_check(),
                             {{"claim", quoted_list(texts)},
                              {"evidence", evidence.narrative}});
  request.max_output = 4096;
  request.tags = {"fact_checker"};

  Json value = gateway_->complete_structured(request, "verdict_object",
                                             repair_budget_, budget);
  auto entries = parse_entries(value);
  if (entries.size() != claims.size()) {
    // One targeted correction round, then give up.
    GenerationRequest retry = request;
    retry.user_text += "\n\n" + describe_mismatch(claims, entries);
    Json again = gateway_->complete_structured(retry, "verdict_object",
                                               repair_budget_, budget);
    entries = parse_entries(again);
    if (entries.size() != claims.size())
      throw VerdictCountMismatch(claims.size(), entries.size());
  }
  return align(claims, std::move(entries));
}

}  // namespace caafc
