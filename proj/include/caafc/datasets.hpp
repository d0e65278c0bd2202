#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "caafc/schemas.hpp"
#include "caafc/segmenter.hpp"
#include "caafc/verdicts.hpp"

namespace caafc {

// One benchmark instance after adapter normalization. `raw` keeps the
// original JSON so cleaned partitions can be written back unchanged.
struct DatasetRecord {
  std::string id;
  ClaimInput input;
  std::string gold_label_raw;
  VerdictLabel gold_label = VerdictLabel::Unverifiable;
  std::optional<std::string> evidence_text;
  std::string split;
  Json raw;
};

// Registered adapter ids: averitec, coverbench, factors, dialogue_generic,
// claim_generic.
std::vector<std::string> registered_adapters();
bool has_adapter(const std::string& adapter_id);

// Raw benchmark label → canonical verdict, per adapter (case-insensitive).
// Throws UnknownRawLabel; unknown adapter throws ConfigError.
VerdictLabel map_raw_label(const std::string& adapter_id,
                           const std::string& record_id,
                           const std::string& raw);

// Parses JSONL (one object per line) or a single JSON array. Throws
// ParseError with a 1-based line number, UnknownRawLabel, ConfigError.
std::vector<DatasetRecord> parse_dataset(const std::string& content,
                                         const std::string& adapter_id);

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path,
                                        const std::string& adapter_id);

// Binary benchmarks score unverifiable either as false (the default
// penalty) or as an abstention excluded from the lists.
enum class BinaryMap { unverifiable_as_false, abstain };

std::optional<VerdictLabel> to_binary(VerdictLabel label, BinaryMap mapping);

}  // namespace caafc
