#pragma once

#include <unistd.h>

#include <atomic>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "caafc/errors.hpp"
#include "caafc/gateway.hpp"

namespace caafc::test {

// Self-cleaning unique directory under the system temp root.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    auto base = std::filesystem::temp_directory_path();
    path_ = base / ("caafc_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// Backend driven by a function; records every request it sees.
class CallbackBackend : public Backend {
 public:
  using Fn = std::function<std::string(const GenerationRequest&)>;
  explicit CallbackBackend(Fn fn, int max_in_flight = 8)
      : fn_(std::move(fn)), max_in_flight_(max_in_flight) {}

  std::string generate(const GenerationRequest& request) override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      requests_.push_back(request);
    }
    calls_.fetch_add(1);
    return fn_(request);
  }
  int max_in_flight() const override { return max_in_flight_; }

  int calls() const { return calls_.load(); }
  std::vector<GenerationRequest> requests() const {
    std::lock_guard<std::mutex> lock(mu_);
    return requests_;
  }

 private:
  Fn fn_;
  int max_in_flight_;
  std::atomic<int> calls_{0};
  mutable std::mutex mu_;
  std::vector<GenerationRequest> requests_;
};

// Plays a fixed script: each step either returns text or throws
// TransportError. Over-running the script is a test bug and fails loudly.
class ScriptedBackend : public Backend {
 public:
  struct Step {
    bool fail = false;
    std::string text;
  };
  static Step ok(std::string text) { return Step{false, std::move(text)}; }
  static Step transport_failure() { return Step{true, {}}; }

  explicit ScriptedBackend(std::vector<Step> steps)
      : steps_(steps.begin(), steps.end()) {}

  std::string generate(const GenerationRequest& request) override {
    std::lock_guard<std::mutex> lock(mu_);
    prompts_.push_back(request.user_text);
    if (steps_.empty()) throw std::logic_error("ScriptedBackend over-run");
    Step step = steps_.front();
    steps_.pop_front();
    if (step.fail) throw TransportError("scripted transport failure");
    return step.text;
  }

  std::vector<std::string> prompts() const {
    std::lock_guard<std::mutex> lock(mu_);
    return prompts_;
  }
  std::size_t remaining() const {
    std::lock_guard<std::mutex> lock(mu_);
    return steps_.size();
  }

 private:
  mutable std::mutex mu_;
  std::deque<Step> steps_;
  std::vector<std::string> prompts_;
};

// Gateway config tuned for tests: no real sleeping between retries.
inline GatewayConfig fast_gateway_config(int max_retries = 3) {
  GatewayConfig config;
  config.max_retries = max_retries;
  config.sleep_on_retry = false;
  return config;
}

}  // namespace caafc::test
