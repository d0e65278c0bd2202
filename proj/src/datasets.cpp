#include "caafc/datasets.hpp"

#include <map>

#include "caafc/errors.hpp"
#include "caafc/text.hpp"

namespace caafc {

namespace {

struct Adapter {
  InputKind kind;
  std::map<std::string, VerdictLabel> label_map;  // keys casefolded
};

const std::map<std::string, Adapter>& adapters() {
  using V = VerdictLabel;
  static const std::map<std::string, Adapter> table = {
      {"averitec",
       {InputKind::claim,
        {{"supported", V::True},
         {"refuted", V::False},
         {"not enough evidence", V::Unverifiable},
         {"conflicting evidence/cherrypicking", V::Unverifiable}}}},
      {"factors",
       {InputKind::claim,
        {{"true", V::True},
         {"false", V::False},
         {"misleading", V::False},
         {"partially true", V::False},
         {"unverifiable", V::Unverifiable}}}},
      {"coverbench",
       {InputKind::claim, {{"true", V::True}, {"false", V::False}}}},
      {"dialogue_generic",
       {InputKind::dialogue,
        {{"factual", V::True}, {"hallucination", V::False}}}},
      {"claim_generic",
       {InputKind::claim,
        {{"true", V::True},
         {"false", V::False},
         {"unverifiable", V::Unverifiable}}}},
  };
  return table;
}

const Adapter& find_adapter(const std::string& adapter_id) {
  auto it = adapters().find(adapter_id);
  if (it == adapters().end())
    throw ConfigError("unknown dataset adapter '" + adapter_id + "'");
  return it->second;
}

std::string string_field(const Json& record, const char* key) {
  if (record.contains(key) && record[key].is_string())
    return record[key].get<std::string>();
  return {};
}

DatasetRecord record_from_json(const Json& value, const Adapter& adapter,
                               const std::string& adapter_id, size_t line) {
  if (!value.is_object())
    throw ParseError("dataset", static_cast<int>(line),
                     "record is not a JSON object");

  DatasetRecord record;
  record.raw = value;
  record.id = string_field(value, "id");
  if (record.id.empty())
    record.id = adapter_id + "-" + std::to_string(line);
  record.split = string_field(value, "split");

  record.input.id = record.id;
  record.input.kind = adapter.kind;
  if (adapter.kind == InputKind::dialogue) {
    if (value.contains("turns") && value["turns"].is_array()) {
      std::vector<DialogueTurn> turns;
      for (const auto& turn : value["turns"])
        turns.push_back({string_field(turn, "speaker"),
                         string_field(turn, "utterance")});
      if (turns.empty())
        throw ParseError("dataset", static_cast<int>(line),
                         "record '" + record.id + "' has an empty turn list");
      auto normalized = normalize_dialogue(turns);
      record.input.text = normalized.text;
    } else {
      record.input.text = string_field(value, "dialogue");
    }
  } else {
    record.input.text = string_field(value, "claim");
  }
  if (trim(record.input.text).empty())
    throw ParseError("dataset", static_cast<int>(line),
                     "record '" + record.id + "' carries no input text");

  for (const char* key : {"date", "claim_date"}) {
    auto text = string_field(value, key);
    if (text.empty()) continue;
    record.input.claim_date = parse_date(text);
    if (!record.input.claim_date) record.input.claim_date = find_date(text);
    break;
  }

  record.gold_label_raw = string_field(value, "label");
  if (record.gold_label_raw.empty())
    throw ParseError("dataset", static_cast<int>(line),
                     "record '" + record.id + "' has no label");
  record.gold_label =
      map_raw_label(adapter_id, record.id, record.gold_label_raw);

  for (const char* key : {"evidence", "evidence_text"}) {
    if (value.contains(key) && value[key].is_string()) {
      record.evidence_text = value[key].get<std::string>();
      break;
    }
  }
  return record;
}

}  // namespace

std::vector<std::string> registered_adapters() {
  std::vector<std::string> ids;
  for (const auto& [id, adapter] : adapters()) {
    ids.push_back(id);
    (void)adapter;
  }
  return ids;
}

bool has_adapter(const std::string& adapter_id) {
  return adapters().count(adapter_id) > 0;
}

VerdictLabel map_raw_label(const std::string& adapter_id,
                           const std::string& record_id,
                           const std::string& raw) {
  const Adapter& adapter = find_adapter(adapter_id);
  auto it = adapter.label_map.find(casefold(trim(raw)));
  if (it == adapter.label_map.end())
    throw UnknownRawLabel(record_id, raw);
  return it->second;
}

std::vector<DatasetRecord> parse_dataset(const std::string& content,
                                         const std::string& adapter_id) {
  const Adapter& adapter = find_adapter(adapter_id);
  std::vector<DatasetRecord> records;

  // A file whose first non-space character is '[' is one JSON array.
  size_t first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '[') {
    Json array = Json::parse(content, nullptr, /*allow_exceptions=*/false);
    if (array.is_discarded() || !array.is_array())
      throw ParseError("dataset", 1, "malformed JSON array");
    size_t index = 0;
    for (const auto& value : array)
      records.push_back(
          record_from_json(value, adapter, adapter_id, ++index));
    return records;
  }

  size_t line_number = 0;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(pos, end - pos);
    ++line_number;
    pos = end + 1;
    if (trim(line).empty()) {
      if (end == content.size()) break;
      continue;
    }
    Json value = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded())
      throw ParseError("dataset", static_cast<int>(line_number),
                       "malformed JSON line");
    records.push_back(
        record_from_json(value, adapter, adapter_id, line_number));
    if (end == content.size()) break;
  }
  return records;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path,
                                        const std::string& adapter_id) {
  auto content = read_file(path);
  if (!content)
    throw ParseError(path.string(), 0, "cannot read dataset file");
  return parse_dataset(*content, adapter_id);
}

std::optional<VerdictLabel> to_binary(VerdictLabel label, BinaryMap mapping) {
  if (label != VerdictLabel::Unverifiable) return label;
  if (mapping == BinaryMap::unverifiable_as_false) return VerdictLabel::False;
  return std::nullopt;  // abstain
}

}  // namespace caafc
