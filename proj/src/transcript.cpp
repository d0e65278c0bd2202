#include "caafc/transcript.hpp"

#include "caafc/errors.hpp"
#include "caafc/text.hpp"

namespace caafc {

TranscriptWriter::TranscriptWriter(std::filesystem::path path, bool append)
    : path_(std::move(path)) {
  namespace fs = std::filesystem;
  if (!path_.parent_path().empty()) fs::create_directories(path_.parent_path());
  out_.open(path_, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out_) throw Error("cannot open transcript " + path_.string());
}

void TranscriptWriter::write(const Json& entry) {
  std::string line = entry.dump();
  std::lock_guard<std::mutex> lock(mu_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw Error("transcript write failed: " + path_.string());
}

std::vector<Json> read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open transcript " + path.string());
  std::vector<Json> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    Json value = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded())
      throw ParseError(path.string(), line_no, "malformed JSON line");
    out.push_back(std::move(value));
  }
  return out;
}

std::string replay_key(const std::string& model_id,
                       const std::string& user_text) {
  return model_id + "\n" + hash16(user_text);
}

std::map<std::string, std::string> build_replay_map(
    const std::vector<Json>& entries) {
  std::map<std::string, std::string> out;
  for (const Json& e : entries) {
    if (!e.is_object() || e.value("kind", "") != "call") continue;
    if (!e.contains("model_id") || !e.contains("prompt") ||
        !e.contains("response"))
      continue;
    out[replay_key(e.at("model_id").get<std::string>(),
                   e.at("prompt").get<std::string>())] =
        e.at("response").get<std::string>();
  }
  return out;
}

}  // namespace caafc
