#include <doctest.h>

#include <thread>

#include "caafc/errors.hpp"
#include "caafc/gateway.hpp"
#include "caafc/text.hpp"
#include "caafc/transcript.hpp"
#include "support.hpp"

using namespace caafc;
using test::CallbackBackend;
using test::ScriptedBackend;

namespace {

GenerationRequest req(std::string model, std::string text,
                      std::vector<std::string> tags = {}) {
  GenerationRequest r;
  r.model_id = std::move(model);
  r.user_text = std::move(text);
  r.tags = std::move(tags);
  return r;
}

}  // namespace

TEST_CASE("echo backend completes on first attempt") {
  Gateway gw(test::fast_gateway_config());
  gw.register_backend("m", std::make_shared<CallbackBackend>(
                               [](const GenerationRequest&) { return "OK"; }));
  auto resp = gw.complete(req("m", "hello"));
  CHECK(resp.raw_text == "OK");
  CHECK(resp.attempt == 1);
  CHECK(resp.model_id == "m");
}

TEST_CASE("unregistered model is BackendUnavailable") {
  Gateway gw(test::fast_gateway_config());
  CHECK_THROWS_AS(gw.complete(req("ghost", "hello")), BackendUnavailable);
}

TEST_CASE("transport failures are retried with attempt counting") {
  auto scripted = std::make_shared<ScriptedBackend>(std::vector{
      ScriptedBackend::transport_failure(),
      ScriptedBackend::transport_failure(),
      ScriptedBackend::ok("third time"),
  });
  Gateway gw(test::fast_gateway_config(/*max_retries=*/3));
  gw.register_backend("m", scripted);
  auto resp = gw.complete(req("m", "go"));
  CHECK(resp.raw_text == "third time");
  CHECK(resp.attempt == 3);
  CHECK(resp.attempt <= gw.config().max_retries + 1);
}

TEST_CASE("retries exhaust into BackendUnavailable") {
  auto scripted = std::make_shared<ScriptedBackend>(std::vector{
      ScriptedBackend::transport_failure(),
      ScriptedBackend::transport_failure(),
      ScriptedBackend::transport_failure(),
  });
  Gateway gw(test::fast_gateway_config(/*max_retries=*/2));
  gw.register_backend("m", scripted);
  CHECK_THROWS_AS(gw.complete(req("m", "go")), BackendUnavailable);
  CHECK(scripted->remaining() == 0);  // exactly max_retries + 1 attempts
}

TEST_CASE("gateway enforces the zero-temperature and non-empty contract") {
  Gateway gw(test::fast_gateway_config());
  gw.register_backend("m", std::make_shared<CallbackBackend>(
                               [](const GenerationRequest&) { return "x"; }));
  auto r = req("m", "hello");
  r.temperature = 0.7;
  CHECK_THROWS_AS(gw.complete(r), InvariantViolation);
  CHECK_THROWS_AS(gw.complete(req("m", "")), InvariantViolation);
}

TEST_CASE("the run budget counts physical calls including retries") {
  auto scripted = std::make_shared<ScriptedBackend>(std::vector{
      ScriptedBackend::transport_failure(),
      ScriptedBackend::transport_failure(),
      ScriptedBackend::ok("late"),
  });
  Gateway gw(test::fast_gateway_config(/*max_retries=*/3));
  gw.register_backend("m", scripted);
  RunBudget budget(2);
  CHECK_THROWS_AS(gw.complete(req("m", "go"), &budget), BudgetExceeded);
  CHECK(budget.used() == 3);  // the third consume() tripped the cap

  RunBudget roomy(8);
  auto scripted2 = std::make_shared<ScriptedBackend>(
      std::vector{ScriptedBackend::ok("fine")});
  gw.register_backend("m2", scripted2);
  auto resp = gw.complete(req("m2", "go"), &roomy);
  CHECK(resp.raw_text == "fine");
  CHECK(roomy.used() == 1);
}

TEST_CASE("complete never mutates the request") {
  Gateway gw(test::fast_gateway_config());
  gw.register_backend("m", std::make_shared<CallbackBackend>(
                               [](const GenerationRequest&) { return "x"; }));
  auto r = req("m", "original", {"stage"});
  r.system_text = "sys";
  gw.complete(r);
  CHECK(r.user_text == "original");
  CHECK(r.system_text == "sys");
  CHECK(r.tags == std::vector<std::string>{"stage"});
  CHECK(r.temperature == 0.0);
}

TEST_CASE("complete_structured returns on the first valid output") {
  auto backend = std::make_shared<CallbackBackend>(
      [](const GenerationRequest&) { return "{\"subclaims\": [\"a\"]}"; });
  Gateway gw(test::fast_gateway_config());
  gw.register_backend("m", backend);
  Json v = gw.complete_structured(req("m", "p"), "subclaim_list", 2);
  CHECK(v["subclaims"][0] == "a");
  CHECK(backend->calls() == 1);
}

TEST_CASE("complete_structured repairs with the fixed suffix") {
  auto scripted = std::make_shared<ScriptedBackend>(std::vector{
      ScriptedBackend::ok("happy to help!"),
      ScriptedBackend::ok("{\"subclaims\": [\"a\"]}"),
  });
  Gateway gw(test::fast_gateway_config());
  gw.register_backend("m", scripted);
  Json v = gw.complete_structured(req("m", "prompt body"), "subclaim_list", 1);
  CHECK(v["subclaims"].size() == 1);
  auto prompts = scripted->prompts();
  REQUIRE(prompts.size() == 2);
  CHECK(prompts[0] == "prompt body");
  CHECK(prompts[1] == std::string("prompt body") + "\n\n" + kRepairSuffix);
}

TEST_CASE("complete_structured exhausts its repair budget") {
  auto scripted = std::make_shared<ScriptedBackend>(std::vector{
      ScriptedBackend::ok("nope"),
  });
  Gateway gw(test::fast_gateway_config());
  gw.register_backend("m", scripted);
  try {
    gw.complete_structured(req("m", "p"), "subclaim_list", 0);
    FAIL("expected StructuredOutputFailure");
  } catch (const StructuredOutputFailure& e) {
    REQUIRE(e.attempts().size() == 1);
    CHECK(e.attempts()[0] == "nope");
  }

  auto scripted2 = std::make_shared<ScriptedBackend>(std::vector{
      ScriptedBackend::ok("first junk"),
      ScriptedBackend::ok("second junk"),
      ScriptedBackend::ok("third junk"),
  });
  gw.register_backend("m2", scripted2);
  try {
    gw.complete_structured(req("m2", "p"), "subclaim_list", 2);
    FAIL("expected StructuredOutputFailure");
  } catch (const StructuredOutputFailure& e) {
    CHECK(e.attempts() ==
          std::vector<std::string>{"first junk", "second junk", "third junk"});
  }
}

TEST_CASE("schema violations also trigger repairs") {
  auto scripted = std::make_shared<ScriptedBackend>(std::vector{
      ScriptedBackend::ok("[{\"text\":\"a\",\"label\":\"perhaps\"}]"),
      ScriptedBackend::ok("[{\"text\":\"a\",\"label\":\"true\"}]"),
  });
  Gateway gw(test::fast_gateway_config());
  gw.register_backend("m", scripted);
  Json v = gw.complete_structured(req("m", "p"), "verdict_object", 1);
  CHECK(v["subclaims"][0]["label"] == "true");
}

TEST_CASE("negative repair budget is rejected") {
  Gateway gw(test::fast_gateway_config());
  gw.register_backend("m", std::make_shared<CallbackBackend>(
                               [](const GenerationRequest&) { return "x"; }));
  CHECK_THROWS_AS(gw.complete_structured(req("m", "p"), "subclaim_list", -1),
                  InvariantViolation);
}

TEST_CASE("fixture backend round-trips through hashed files") {
  test::TempDir dir;
  std::string prompt = "what is the capital of France?";
  auto file = write_fixture(dir.path(), prompt, "Paris.");
  CHECK(file.filename().string() == hash16(prompt) + ".txt");

  FixtureBackend backend(dir.path());
  CHECK(backend.generate(req("m", prompt)) == "Paris.");

  CHECK_THROWS_AS(backend.generate(req("m", "unseen prompt")),
                  BackendUnavailable);
  try {
    backend.generate(req("m", "unseen prompt"));
  } catch (const BackendUnavailable& e) {
    CHECK(std::string(e.what()).find(hash16("unseen prompt")) !=
          std::string::npos);
  }
}

TEST_CASE("fixture-backed gateway runs are deterministic") {
  test::TempDir dir;
  write_fixture(dir.path(), "p", "resp");
  Gateway gw(test::fast_gateway_config());
  gw.register_backend("m", std::make_shared<FixtureBackend>(dir.path()));
  auto a = gw.complete(req("m", "p"));
  auto b = gw.complete(req("m", "p"));
  CHECK(a.raw_text == b.raw_text);
}

TEST_CASE("transcript logs calls and replays them") {
  test::TempDir dir;
  auto path = dir / "run.jsonl";
  {
    Gateway gw(test::fast_gateway_config());
    gw.set_transcript(std::make_shared<TranscriptWriter>(path));
    gw.register_backend(
        "m", std::make_shared<CallbackBackend>([](const GenerationRequest& r) {
          return "echo:" + r.user_text;
        }));
    gw.complete(req("m", "one", {"segmenter"}));
    gw.complete(req("m", "two", {"fact_checker"}));
  }
  auto entries = read_transcript(path);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0]["stage"] == "segmenter");
  CHECK(entries[0]["prompt"] == "one");
  CHECK(entries[0]["response"] == "echo:one");
  CHECK(entries[1]["attempt"] == 1);

  // Replay: same prompts answered with zero live calls.
  ReplayBackend replay(build_replay_map(entries));
  CHECK(replay.generate(req("m", "one")) == "echo:one");
  CHECK(replay.generate(req("m", "two")) == "echo:two");
  CHECK_THROWS_AS(replay.generate(req("m", "three")), BackendUnavailable);
  CHECK_THROWS_AS(replay.generate(req("other", "one")), BackendUnavailable);
}

TEST_CASE("malformed transcript lines carry their line number") {
  test::TempDir dir;
  auto path = dir / "bad.jsonl";
  atomic_write_file(path, "{\"kind\":\"call\"}\nnot json\n");
  try {
    read_transcript(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("failed attempts are not logged, successes are") {
  test::TempDir dir;
  auto path = dir / "run.jsonl";
  auto scripted = std::make_shared<ScriptedBackend>(std::vector{
      ScriptedBackend::transport_failure(),
      ScriptedBackend::ok("ok"),
  });
  {
    Gateway gw(test::fast_gateway_config());
    gw.set_transcript(std::make_shared<TranscriptWriter>(path));
    gw.register_backend("m", scripted);
    auto resp = gw.complete(req("m", "p"));
    CHECK(resp.attempt == 2);
  }
  auto entries = read_transcript(path);
  REQUIRE(entries.size() == 1);
  CHECK(entries[0]["attempt"] == 2);
}

TEST_CASE("per-backend in-flight limit is enforced") {
  std::atomic<int> in_flight{0};
  std::atomic<int> max_seen{0};
  auto backend = std::make_shared<CallbackBackend>(
      [&](const GenerationRequest&) {
        int now = in_flight.fetch_add(1) + 1;
        int seen = max_seen.load();
        while (now > seen && !max_seen.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        in_flight.fetch_sub(1);
        return std::string("done");
      },
      /*max_in_flight=*/1);
  Gateway gw(test::fast_gateway_config());
  gw.register_backend("m", backend);

  std::vector<std::thread> workers;
  for (int i = 0; i < 4; ++i)
    workers.emplace_back([&gw, i] {
      auto r = gw.complete(
          GenerationRequest{"m", "", "prompt " + std::to_string(i), 0.0, 128,
                            {}});
      CHECK(r.raw_text == "done");
    });
  for (auto& w : workers) w.join();
  CHECK(max_seen.load() == 1);
  CHECK(backend->calls() == 4);
}
