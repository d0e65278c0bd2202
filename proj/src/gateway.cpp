#include "caafc/gateway.hpp"

#include <httplib.h>

#include <thread>

#include "caafc/errors.hpp"
#include "caafc/text.hpp"
#include "caafc/transcript.hpp"

namespace caafc {

void RunBudget::consume() {
  int attempted = used_.fetch_add(1) + 1;
  if (attempted > cap_) throw BudgetExceeded(cap_, attempted);
}

Gateway::Gateway(GatewayConfig config) : config_(std::move(config)) {}

void Gateway::register_backend(const std::string& model_id,
                               std::shared_ptr<Backend> backend) {
  if (!backend) throw InvariantViolation("null backend for " + model_id);
  int slots = std::max(1, std::min(backend->max_in_flight(), 4096));
  std::lock_guard<std::mutex> lock(mu_);
  backends_[model_id] =
      Entry{std::move(backend),
            std::make_unique<std::counting_semaphore<4096>>(slots)};
}

bool Gateway::has_backend(const std::string& model_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return backends_.count(model_id) > 0;
}

std::vector<std::string> Gateway::backend_ids() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, entry] : backends_) {
    (void)entry;
    out.push_back(id);
  }
  return out;
}

void Gateway::set_transcript(std::shared_ptr<TranscriptWriter> transcript) {
  std::lock_guard<std::mutex> lock(mu_);
  transcript_ = std::move(transcript);
}

Gateway::Entry* Gateway::find(const std::string& model_id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = backends_.find(model_id);
  return it == backends_.end() ? nullptr : &it->second;
}

std::map<std::string, int> Gateway::calls_by_tag() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_by_tag_;
}

GenerationResponse Gateway::complete(const GenerationRequest& request,
                                     RunBudget* budget) {
  if (request.temperature != 0.0)
    throw InvariantViolation("generation must run at temperature 0.0");
  if (request.user_text.empty())
    throw InvariantViolation("user_text must be non-empty");
  Entry* entry = find(request.model_id);
  if (!entry)
    throw BackendUnavailable("no backend registered for model '" +
                             request.model_id + "'");

  entry->slots->acquire();
  struct SlotRelease {
    std::counting_semaphore<4096>* slots;
    ~SlotRelease() { slots->release(); }
  } release{entry->slots.get()};

  std::string last_failure;
  for (int attempt = 1; attempt <= config_.max_retries + 1; ++attempt) {
    if (budget) budget->consume();
    auto start = std::chrono::steady_clock::now();
    try {
      std::string raw = entry->backend->generate(request);
      auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - start);
      GenerationResponse response{std::move(raw), request.model_id, latency,
                                  attempt};
      std::shared_ptr<TranscriptWriter> transcript;
      {
        std::lock_guard<std::mutex> lock(mu_);
        transcript = transcript_;
        ++calls_by_tag_[request.tags.empty() ? "" : request.tags.front()];
      }
      if (transcript) {
        transcript->write(Json{
            {"kind", "call"},
            {"stage", request.tags.empty() ? "" : request.tags.front()},
            {"tags", request.tags},
            {"model_id", request.model_id},
            {"system", request.system_text},
            {"prompt", request.user_text},
            {"response", response.raw_text},
            {"latency_ms", static_cast<long long>(latency.count())},
            {"attempt", attempt},
        });
      }
      return response;
    } catch (const TransportError& e) {
      last_failure = e.what();
      if (attempt <= config_.max_retries && config_.sleep_on_retry) {
        auto delay = config_.backoff_base * (1LL << (attempt - 1));
        std::this_thread::sleep_for(delay);
      }
    }
  }
  throw BackendUnavailable("model '" + request.model_id + "' unavailable after " +
                           std::to_string(config_.max_retries + 1) +
                           " attempt(s): " + last_failure);
}

Json Gateway::complete_structured(const GenerationRequest& request,
                                  const std::string& schema_name,
                                  int repair_budget, RunBudget* budget) {
  if (repair_budget < 0)
    throw InvariantViolation("repair_budget must be >= 0");
  std::vector<std::string> attempts;
  GenerationRequest repaired = request;
  for (int round = 0; round <= repair_budget; ++round) {
    if (round == 1)
      repaired.user_text = request.user_text + "\n\n" + kRepairSuffix;
    const GenerationRequest& current = round == 0 ? request : repaired;
    GenerationResponse response = complete(current, budget);
    attempts.push_back(response.raw_text);
    try {
      return extract_json(response.raw_text, schema_name);
    } catch (const NoJsonFound&) {
    } catch (const SchemaViolation&) {
    }
  }
  throw StructuredOutputFailure(std::move(attempts));
}

// ---- FixtureBackend ----

FixtureBackend::FixtureBackend(std::filesystem::path dir, int max_in_flight)
    : dir_(std::move(dir)), max_in_flight_(max_in_flight) {}

std::string FixtureBackend::generate(const GenerationRequest& request) {
  std::filesystem::path file = dir_ / (hash16(request.user_text) + ".txt");
  auto content = read_file(file);
  if (!content)
    throw BackendUnavailable("missing fixture " + file.string() +
                             " for model '" + request.model_id + "'");
  return *content;
}

std::filesystem::path write_fixture(const std::filesystem::path& dir,
                                    const std::string& user_text,
                                    const std::string& response) {
  std::filesystem::path file = dir / (hash16(user_text) + ".txt");
  atomic_write_file(file, response);
  return file;
}

// ---- HttpChatBackend ----

HttpChatBackend::HttpChatBackend(HttpBackendConfig config)
    : config_(std::move(config)) {
  if (config_.base_url.empty())
    throw ConfigError("http backend requires a base_url");
}

std::string HttpChatBackend::generate(const GenerationRequest& request) {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);

  Json messages = Json::array();
  if (!request.system_text.empty())
    messages.push_back(Json{{"role", "system"}, {"content", request.system_text}});
  messages.push_back(Json{{"role", "user"}, {"content", request.user_text}});
  Json body{
      {"model",
       config_.model_name.empty() ? request.model_id : config_.model_name},
      {"messages", messages},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output},
  };

  httplib::Headers headers;
  if (!config_.auth_header.empty())
    headers.emplace(config_.auth_header, config_.auth_value);

  auto result =
      client.Post(config_.path, headers, body.dump(), "application/json");
  if (!result)
    throw TransportError("POST " + config_.base_url + config_.path + ": " +
                         httplib::to_string(result.error()));
  if (result->status < 200 || result->status >= 300)
    throw TransportError("POST " + config_.path + ": HTTP " +
                         std::to_string(result->status));
  Json payload = Json::parse(result->body, nullptr, /*allow_exceptions=*/false);
  if (payload.is_discarded())
    throw TransportError("chat-completion payload is not JSON");
  try {
    return payload.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const Json::exception&) {
    throw TransportError("chat-completion payload missing choices[0].message.content");
  }
}

// ---- ReplayBackend ----

ReplayBackend::ReplayBackend(std::map<std::string, std::string> responses)
    : responses_(std::move(responses)) {}

std::string ReplayBackend::generate(const GenerationRequest& request) {
  auto it = responses_.find(replay_key(request.model_id, request.user_text));
  if (it == responses_.end())
    throw BackendUnavailable("replay transcript has no entry for model '" +
                             request.model_id + "', prompt hash " +
                             hash16(request.user_text));
  return it->second;
}

}  // namespace caafc
