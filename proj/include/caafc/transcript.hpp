#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "caafc/schemas.hpp"

namespace caafc {

// Append-only JSONL log shared by concurrent pipeline workers. One JSON
// object per line; every write is flushed so a crashed run keeps its tail.
class TranscriptWriter {
 public:
  explicit TranscriptWriter(std::filesystem::path path, bool append = true);

  void write(const Json& entry);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mu_;
  std::ofstream out_;
};

// Parses a JSONL transcript; throws ParseError with the 1-based line number
// of the first malformed line. Blank lines are skipped.
std::vector<Json> read_transcript(const std::filesystem::path& path);

// Replay key for a model call: model_id + "\n" + hash16(user prompt).
std::string replay_key(const std::string& model_id,
                       const std::string& user_text);

// Collects {replay_key → response} from gateway call entries
// (kind == "call"). Later entries win, matching re-run semantics.
std::map<std::string, std::string> build_replay_map(
    const std::vector<Json>& entries);

}  // namespace caafc
