#include "caafc/schemas.hpp"

#include <algorithm>
#include <optional>

#include "caafc/errors.hpp"
#include "caafc/text.hpp"

namespace caafc {

namespace {

const char* kSchemas[] = {"subclaim_list",  "verdict_object",
                          "justification_object", "comparison_object",
                          "source_list",    "judge_object"};

[[noreturn]] void fail(const std::string& schema, const std::string& field,
                       const std::string& detail) {
  throw SchemaViolation(schema, field, detail);
}

std::string want_string(const std::string& schema, const std::string& field,
                        const Json& v) {
  if (!v.is_string()) fail(schema, field, "expected a string");
  return v.get<std::string>();
}

// ---- subclaim_list ----
// Accepts ["a","b"] or {"subclaims": ["a","b"]} (also "sub_claims").
Json check_subclaim_list(const Json& value) {
  const char* schema = "subclaim_list";
  const Json* arr = nullptr;
  if (value.is_array()) {
    arr = &value;
  } else if (value.is_object()) {
    for (const char* key : {"subclaims", "sub_claims", "Sub_Claims"}) {
      if (value.contains(key)) {
        arr = &value.at(key);
        break;
      }
    }
    if (!arr) fail(schema, "subclaims", "missing key");
  } else {
    fail(schema, "(root)", "expected an array or object");
  }
  if (!arr->is_array()) fail(schema, "subclaims", "expected an array");
  Json out_list = Json::array();
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const Json& item = (*arr)[i];
    std::string field = "subclaims[" + std::to_string(i) + "]";
    if (item.is_string()) {
      out_list.push_back(item.get<std::string>());
    } else if (item.is_object() && item.contains("text")) {
      out_list.push_back(want_string(schema, field + ".text", item.at("text")));
    } else {
      fail(schema, field, "expected a string");
    }
  }
  return Json{{"subclaims", out_list}};
}

// ---- verdict_object ----
// {"subclaims": [{"text","label","justification"}...]}; bare entry arrays
// also accepted. Labels case-normalized to true|false|unverifiable.
Json check_verdict_object(const Json& value) {
  const char* schema = "verdict_object";
  const Json* arr = nullptr;
  if (value.is_array())
    arr = &value;
  else if (value.is_object() && value.contains("subclaims"))
    arr = &value.at("subclaims");
  else
    fail(schema, "subclaims", "missing key");
  if (!arr->is_array()) fail(schema, "subclaims", "expected an array");
  Json out_list = Json::array();
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const Json& item = (*arr)[i];
    std::string field = "subclaims[" + std::to_string(i) + "]";
    if (!item.is_object()) fail(schema, field, "expected an object");
    if (!item.contains("text")) fail(schema, field + ".text", "missing");
    if (!item.contains("label")) fail(schema, field + ".label", "missing");
    std::string text = want_string(schema, field + ".text", item.at("text"));
    std::string label = casefold(
        trim(want_string(schema, field + ".label", item.at("label"))));
    if (label != "true" && label != "false" && label != "unverifiable")
      fail(schema, field + ".label",
           "expected true | false | unverifiable, got '" + label + "'");
    std::string justification;
    if (item.contains("justification"))
      justification = want_string(schema, field + ".justification",
                                  item.at("justification"));
    out_list.push_back(Json{{"text", text},
                            {"label", label},
                            {"justification", justification}});
  }
  return Json{{"subclaims", out_list}};
}

// ---- justification_object ----
Json check_justification_object(const Json& value) {
  const char* schema = "justification_object";
  if (!value.is_object()) fail(schema, "(root)", "expected an object");
  if (!value.contains("justification"))
    fail(schema, "justification", "missing key");
  std::string text =
      want_string(schema, "justification", value.at("justification"));
  if (trim(text).empty()) fail(schema, "justification", "empty");
  Json out = Json{{"justification", text}};
  if (value.contains("corrected_claim"))
    out["corrected_claim"] =
        want_string(schema, "corrected_claim", value.at("corrected_claim"));
  return out;
}

// ---- comparison_object ----
Json check_comparison_object(const Json& value) {
  const char* schema = "comparison_object";
  if (!value.is_object()) fail(schema, "(root)", "expected an object");
  if (!value.contains("better_evidence"))
    fail(schema, "better_evidence", "missing key");
  std::string better = casefold(
      trim(want_string(schema, "better_evidence", value.at("better_evidence"))));
  if (better != "evidence_1" && better != "evidence_2" && better != "tie")
    fail(schema, "better_evidence",
         "expected evidence_1 | evidence_2 | tie, got '" + better + "'");
  std::string category = "other";
  if (value.contains("reason_category")) {
    category = casefold(trim(
        want_string(schema, "reason_category", value.at("reason_category"))));
    if (category != "more_context" && category != "more_updated_information" &&
        category != "other")
      fail(schema, "reason_category",
           "expected more_context | more_updated_information | other, got '" +
               category + "'");
  }
  std::string reason;
  if (value.contains("reason"))
    reason = want_string(schema, "reason", value.at("reason"));
  return Json{{"better_evidence", better},
              {"reason_category", category},
              {"reason", reason}};
}

// ---- source_list ----
// The primary-sources prompt leaves the format open, so this accepts string
// lists, object lists, or a wrapper object, and canonicalizes to
// {"sources": [{"descriptor","url","justification"}...]}.
Json check_source_list(const Json& value) {
  const char* schema = "source_list";
  const Json* arr = nullptr;
  if (value.is_array()) {
    arr = &value;
  } else if (value.is_object()) {
    for (const char* key : {"sources", "primary_sources"}) {
      if (value.contains(key)) {
        arr = &value.at(key);
        break;
      }
    }
    if (!arr) fail(schema, "sources", "missing key");
  } else {
    fail(schema, "(root)", "expected an array or object");
  }
  if (!arr->is_array()) fail(schema, "sources", "expected an array");
  Json out_list = Json::array();
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const Json& item = (*arr)[i];
    std::string field = "sources[" + std::to_string(i) + "]";
    std::string descriptor, url, justification;
    if (item.is_string()) {
      descriptor = item.get<std::string>();
    } else if (item.is_object()) {
      for (const char* key : {"descriptor", "source", "name"}) {
        if (item.contains(key)) {
          descriptor = want_string(schema, field, item.at(key));
          break;
        }
      }
      if (item.contains("url"))
        url = want_string(schema, field + ".url", item.at("url"));
      if (item.contains("justification"))
        justification = want_string(schema, field + ".justification",
                                    item.at("justification"));
      if (descriptor.empty() && !url.empty()) descriptor = url;
    }
    if (trim(descriptor).empty())
      fail(schema, field, "source entry has no descriptor");
    out_list.push_back(Json{{"descriptor", descriptor},
                            {"url", url},
                            {"justification", justification}});
  }
  return Json{{"sources", out_list}};
}

// ---- judge_object ----
int want_score(const std::string& schema, const std::string& field,
               const Json& v, int lo, int hi) {
  int score = 0;
  if (v.is_number_integer())
    score = v.get<int>();
  else if (v.is_string()) {
    try {
      score = std::stoi(v.get<std::string>());
    } catch (...) {
      fail(schema, field, "expected an integer");
    }
  } else {
    fail(schema, field, "expected an integer");
  }
  if (score < lo || score > hi)
    fail(schema, field,
         "expected " + std::to_string(lo) + ".." + std::to_string(hi) +
             ", got " + std::to_string(score));
  return score;
}

bool want_bool(const std::string& schema, const std::string& field,
               const Json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    std::string s = casefold(trim(v.get<std::string>()));
    if (s == "true" || s == "yes") return true;
    if (s == "false" || s == "no") return false;
  }
  fail(schema, field, "expected a boolean");
}

Json check_judge_object(const Json& value) {
  const char* schema = "judge_object";
  if (!value.is_object()) fail(schema, "(root)", "expected an object");
  Json out = Json::object();
  for (const char* key : {"error_detection", "error_correction"}) {
    if (!value.contains(key)) fail(schema, key, "missing key");
    const Json& crit = value.at(key);
    int score = 0;
    std::string rationale;
    if (crit.is_object()) {
      if (!crit.contains("score"))
        fail(schema, std::string(key) + ".score", "missing");
      score = want_score(schema, std::string(key) + ".score", crit.at("score"),
                         0, 2);
      if (crit.contains("rationale"))
        rationale = want_string(schema, std::string(key) + ".rationale",
                                crit.at("rationale"));
    } else {
      score = want_score(schema, key, crit, 0, 2);
    }
    out[key] = Json{{"score", score}, {"rationale", rationale}};
  }
  if (!value.contains("links")) fail(schema, "links", "missing key");
  const Json& links = value.at("links");
  if (!links.is_object()) fail(schema, "links", "expected an object");
  bool relevant = links.contains("relevant")
                      ? want_bool(schema, "links.relevant", links.at("relevant"))
                      : false;
  bool supportive =
      links.contains("supportive")
          ? want_bool(schema, "links.supportive", links.at("supportive"))
          : false;
  std::string rationale;
  if (links.contains("rationale"))
    rationale = want_string(schema, "links.rationale", links.at("rationale"));
  out["links"] = Json{{"relevant", relevant},
                      {"supportive", supportive},
                      {"rationale", rationale}};
  return out;
}

}  // namespace

const std::vector<std::string>& registered_schemas() {
  static const std::vector<std::string> names(std::begin(kSchemas),
                                              std::end(kSchemas));
  return names;
}

Json validate_schema(const std::string& schema_name, const Json& value) {
  if (schema_name == "subclaim_list") return check_subclaim_list(value);
  if (schema_name == "verdict_object") return check_verdict_object(value);
  if (schema_name == "justification_object")
    return check_justification_object(value);
  if (schema_name == "comparison_object") return check_comparison_object(value);
  if (schema_name == "source_list") return check_source_list(value);
  if (schema_name == "judge_object") return check_judge_object(value);
  throw InvariantViolation("unregistered schema: " + schema_name);
}

namespace {

// End index (inclusive) of the balanced JSON container starting at `start`,
// honoring string literals and escapes; nullopt when unbalanced.
std::optional<std::size_t> balanced_end(const std::string& s,
                                        std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (escaped)
        escaped = false;
      else if (c == '\\')
        escaped = true;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      --depth;
      if (depth == 0) return i;
      if (depth < 0) return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

Json extract_json(const std::string& raw_text, const std::string& schema_name) {
  for (std::size_t i = 0; i < raw_text.size(); ++i) {
    if (raw_text[i] != '{' && raw_text[i] != '[') continue;
    auto end = balanced_end(raw_text, i);
    if (!end) continue;
    std::string candidate = raw_text.substr(i, *end - i + 1);
    Json parsed = Json::parse(candidate, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) continue;
    return validate_schema(schema_name, parsed);
  }
  throw NoJsonFound("no JSON value found in model output");
}

}  // namespace caafc
