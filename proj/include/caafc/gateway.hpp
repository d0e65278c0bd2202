#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include "caafc/schemas.hpp"

namespace caafc {

class TranscriptWriter;

struct GenerationRequest {
  std::string model_id;
  std::string system_text;  // empty = no system message
  std::string user_text;
  double temperature = 0.0;  // pipeline contract: exactly 0.0, always
  int max_output = 2048;
  std::vector<std::string> tags;  // pipeline stage labels for logging
};

struct GenerationResponse {
  std::string raw_text;
  std::string model_id;
  std::chrono::milliseconds latency{0};
  int attempt = 1;  // 1 = first try; ≤ max_retries + 1
};

// One text-generation backend. generate() performs a single attempt and
// throws TransportError for failures worth retrying; anything else aborts
// the call immediately.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string generate(const GenerationRequest& request) = 0;
  // Max concurrent in-flight calls the gateway lets through to this backend.
  virtual int max_in_flight() const { return 4; }
};

// Per-run cap on physical backend calls (retries and repair re-prompts all
// count). Shared across worker threads.
class RunBudget {
 public:
  explicit RunBudget(int cap) : cap_(cap) {}
  // Registers one call; throws BudgetExceeded past the cap.
  void consume();
  int used() const noexcept { return used_.load(); }
  int cap() const noexcept { return cap_; }

 private:
  std::atomic<int> used_{0};
  int cap_;
};

inline constexpr int kDefaultCallBudget = 64;

// Fixed suffix appended once to the original prompt for repair re-prompts.
inline constexpr const char* kRepairSuffix =
    "Return only the JSON object, nothing else.";

struct GatewayConfig {
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{50};  // doubled per retry
  bool sleep_on_retry = true;                  // tests turn this off
};

// The single doorway to models: registry, retry/backoff, per-backend
// concurrency limits, run budgets, transcript logging, structured-output
// extraction with repair. Shareable across concurrent pipeline executions.
class Gateway {
 public:
  explicit Gateway(GatewayConfig config = {});

  void register_backend(const std::string& model_id,
                        std::shared_ptr<Backend> backend);
  bool has_backend(const std::string& model_id) const;
  // Registered ids, sorted.
  std::vector<std::string> backend_ids() const;

  void set_transcript(std::shared_ptr<TranscriptWriter> transcript);

  // One logical completion: retries transport failures up to
  // config.max_retries with exponential backoff, enforces the backend's
  // in-flight limit, consumes budget per physical call, logs the successful
  // call. The request is never mutated.
  GenerationResponse complete(const GenerationRequest& request,
                              RunBudget* budget = nullptr);

  // complete + extract_json; on extraction failure re-prompts with the
  // original prompt plus kRepairSuffix, up to repair_budget extra calls.
  // Throws StructuredOutputFailure carrying all raw attempts.
  Json complete_structured(const GenerationRequest& request,
                           const std::string& schema_name, int repair_budget,
                           RunBudget* budget = nullptr);

  const GatewayConfig& config() const noexcept { return config_; }

  // Successful completions per leading stage tag since construction.
  std::map<std::string, int> calls_by_tag() const;

 private:
  struct Entry {
    std::shared_ptr<Backend> backend;
    std::unique_ptr<std::counting_semaphore<4096>> slots;
  };
  Entry* find(const std::string& model_id);

  GatewayConfig config_;
  mutable std::mutex mu_;
  std::map<std::string, Entry> backends_;
  std::map<std::string, int> calls_by_tag_;
  std::shared_ptr<TranscriptWriter> transcript_;
};

// ---- stock backends ----

// Reads responses from <dir>/<hash16(user_text)>.txt. The canonical
// hermetic test double; a missing fixture aborts immediately with
// BackendUnavailable naming the hash.
class FixtureBackend : public Backend {
 public:
  explicit FixtureBackend(std::filesystem::path dir, int max_in_flight = 8);
  std::string generate(const GenerationRequest& request) override;
  int max_in_flight() const override { return max_in_flight_; }
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  int max_in_flight_;
};

// Writes a fixture file for `user_text` under `dir` (the inverse of
// FixtureBackend; used by tooling and tests to author fixtures).
std::filesystem::path write_fixture(const std::filesystem::path& dir,
                                    const std::string& user_text,
                                    const std::string& response);

// HTTP JSON chat-completion backend. POSTs
//   {"model", "messages":[{role,content}...], "temperature", "max_tokens"}
// and reads choices[0].message.content. Connection errors, non-2xx statuses
// and malformed payloads are TransportError (retryable).
struct HttpBackendConfig {
  std::string base_url;                      // e.g. "http://localhost:8089"
  std::string path = "/v1/chat/completions";
  std::string model_name;                    // wire-level model identifier
  std::string auth_header;                   // e.g. "Authorization"; empty = none
  std::string auth_value;                    // e.g. "Bearer sk-..."
  int timeout_seconds = 60;
  int max_in_flight = 4;
};

class HttpChatBackend : public Backend {
 public:
  explicit HttpChatBackend(HttpBackendConfig config);
  std::string generate(const GenerationRequest& request) override;
  int max_in_flight() const override { return config_.max_in_flight; }

 private:
  HttpBackendConfig config_;
};

// Serves responses recorded in a transcript, keyed by replay_key(). Misses
// throw BackendUnavailable: a replay run makes zero live calls by
// construction.
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(std::map<std::string, std::string> responses);
  std::string generate(const GenerationRequest& request) override;
  int max_in_flight() const override { return 64; }

 private:
  std::map<std::string, std::string> responses_;
};

}  // namespace caafc
