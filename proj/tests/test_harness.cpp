#include <doctest.h>

#include <map>
#include <memory>
#include <set>

#include "caafc/errors.hpp"
#include "caafc/harness.hpp"
#include "caafc/text.hpp"
#include "support.hpp"

using namespace caafc;
using namespace caafc::test;

namespace {

// record key → model id → verdict label ("garbage" = unparseable output).
using VerdictTable = std::map<std::string, std::map<std::string, std::string>>;

// Serves segmentation and fact-check prompts for fixture records whose
// claim text embeds its own key ("claim number 03" etc.).
CallbackBackend::Fn table_dispatch(std::shared_ptr<VerdictTable> table) {
  return [table](const GenerationRequest& request) -> std::string {
    const std::string& p = request.user_text;
    std::string key;
    for (const auto& [record_key, verdicts] : *table) {
      (void)verdicts;
      if (p.find(record_key) != std::string::npos) {
        key = record_key;
        break;
      }
    }
    if (key.empty()) return "no fixture for this prompt";
    if (p.find("We have a transcript that has many claims.") !=
        std::string::npos)
      return Json{{"subclaims", Json::array({key})}}.dump();
    std::string label = table->at(key).at(request.model_id);
    if (label == "garbage") return "no json in this reply";
    return Json{{"subclaims",
                 Json::array({Json{{"text", key},
                                   {"label", label},
                                   {"justification", "per fixture"}}})}}
        .dump();
  };
}

DatasetRecord make_record(const std::string& id, const std::string& claim,
                          VerdictLabel gold, bool with_evidence = true) {
  DatasetRecord record;
  record.id = id;
  record.input.id = id;
  record.input.text = claim;
  record.gold_label = gold;
  record.gold_label_raw = to_string(gold);
  if (with_evidence) record.evidence_text = "reference text about " + claim;
  record.raw = Json{{"id", id}, {"claim", claim}, {"label", to_string(gold)}};
  return record;
}

}  // namespace

TEST_CASE("majority_winner matches the brute-force oracle on all 27 triples") {
  const EvidenceChoice choices[3] = {EvidenceChoice::evidence_1,
                                     EvidenceChoice::evidence_2,
                                     EvidenceChoice::tie};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        std::vector<EvidenceChoice> votes{choices[a], choices[b], choices[c]};
        // Oracle: tally each option independently, demand a 2-of-3 majority.
        ComparisonWinner expected = ComparisonWinner::unresolved;
        for (int option = 0; option < 3; ++option) {
          int count = (a == option) + (b == option) + (c == option);
          if (count >= 2) expected = static_cast<ComparisonWinner>(option);
        }
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(c);
        CHECK(majority_winner(votes) == expected);
      }
}

TEST_CASE("majority_winner over partial votes") {
  using C = EvidenceChoice;
  CHECK(majority_winner({}) == ComparisonWinner::unresolved);
  CHECK(majority_winner({C::evidence_1}) == ComparisonWinner::unresolved);
  CHECK(majority_winner({C::evidence_1, C::evidence_1}) ==
        ComparisonWinner::evidence_1);
  CHECK(majority_winner({C::evidence_1, C::tie}) ==
        ComparisonWinner::unresolved);
  CHECK(majority_winner({C::tie, C::tie}) == ComparisonWinner::tie);
}

TEST_CASE("compare_evidence majority vote") {
  Gateway gateway(fast_gateway_config());
  auto vote_backend = [](const std::string& choice) {
    return std::make_shared<CallbackBackend>(
        [choice](const GenerationRequest&) {
          return Json{{"better_evidence", choice},
                      {"reason_category", "more_updated_information"},
                      {"reason", "newer numbers"}}
              .dump();
        });
  };
  auto first = vote_backend("evidence_1");
  gateway.register_backend("m1", first);
  gateway.register_backend("m2", vote_backend("evidence_1"));
  gateway.register_backend("m3", vote_backend("evidence_2"));

  auto outcome = compare_evidence(gateway, "GDP grew 3% in 2024.",
                                  "old townhall report", "fresh census table",
                                  {"m1", "m2", "m3"});
  CHECK(outcome.winner == ComparisonWinner::evidence_1);
  REQUIRE(outcome.votes.size() == 3);
  CHECK(outcome.votes[0].model_id == "m1");
  CHECK(outcome.votes[2].better_evidence == EvidenceChoice::evidence_2);
  CHECK(outcome.votes[1].reason_category ==
        ReasonCategory::more_updated_information);
  CHECK(outcome.failed_models.empty());

  // Every model saw the claim and both evidence texts.
  const auto requests = first->requests();
  REQUIRE(requests.size() == 1);
  CHECK(requests[0].user_text.find("GDP grew 3% in 2024.") !=
        std::string::npos);
  CHECK(requests[0].user_text.find("old townhall report") !=
        std::string::npos);
  CHECK(requests[0].user_text.find("fresh census table") !=
        std::string::npos);
  CHECK(requests[0].tags == std::vector<std::string>{"comparison"});
}

TEST_CASE("compare_evidence records parse failures and votes with the rest") {
  Gateway gateway(fast_gateway_config());
  auto scripted = [&gateway](const std::string& id, const std::string& body) {
    gateway.register_backend(
        id, std::make_shared<CallbackBackend>(
                [body](const GenerationRequest&) { return body; }));
  };
  scripted("m1", Json{{"better_evidence", "evidence_1"}}.dump());
  scripted("m2", "not json at all");  // fails original + repair attempt
  scripted("m3", Json{{"better_evidence", "evidence_2"}}.dump());

  auto outcome = compare_evidence(gateway, "c", "aaa", "bbb",
                                  {"m1", "m2", "m3"});
  CHECK(outcome.failed_models == std::vector<std::string>{"m2"});
  CHECK(outcome.votes.size() == 2);
  CHECK(outcome.winner == ComparisonWinner::unresolved);

  // With the two survivors agreeing, the majority still forms.
  Gateway gateway2(fast_gateway_config());
  auto scripted2 = [&gateway2](const std::string& id, const std::string& body) {
    gateway2.register_backend(
        id, std::make_shared<CallbackBackend>(
                [body](const GenerationRequest&) { return body; }));
  };
  scripted2("m1", Json{{"better_evidence", "tie"}}.dump());
  scripted2("m2", "still not json");
  scripted2("m3", Json{{"better_evidence", "tie"}}.dump());
  auto outcome2 = compare_evidence(gateway2, "c", "aaa", "bbb",
                                   {"m1", "m2", "m3"});
  CHECK(outcome2.winner == ComparisonWinner::tie);

  CHECK_THROWS_AS(compare_evidence(gateway, "c", " ", "bbb",
                                   {"m1", "m2", "m3"}),
                  InvariantViolation);
}

TEST_CASE("detect_mismatches flags exactly the unanimous contradictions") {
  auto table = std::make_shared<VerdictTable>();
  auto set = [&table](const std::string& key, const std::string& a,
                      const std::string& b, const std::string& c) {
    (*table)[key] = {{"m1", a}, {"m2", b}, {"m3", c}};
  };
  set("claim number 01", "false", "false", "false");  // gold true  → flag
  set("claim number 02", "true", "true", "true");     // gold true
  set("claim number 03", "false", "false", "unverifiable");  // gold true
  set("claim number 04", "unverifiable", "unverifiable",
      "unverifiable");                                 // gold false → flag
  set("claim number 05", "false", "false", "false");   // gold false
  set("claim number 06", "true", "true", "true");      // no evidence → skip
  set("claim number 07", "true", "garbage", "true");   // m2 breaks → skip
  set("claim number 08", "true", "true", "true");      // gold false → flag
  set("claim number 09", "true", "false", "unverifiable");  // gold true
  set("claim number 10", "unverifiable", "unverifiable",
      "unverifiable");  // gold unverifiable: consensus equals gold

  std::vector<DatasetRecord> records{
      make_record("r01", "claim number 01", VerdictLabel::True),
      make_record("r02", "claim number 02", VerdictLabel::True),
      make_record("r03", "claim number 03", VerdictLabel::True),
      make_record("r04", "claim number 04", VerdictLabel::False),
      make_record("r05", "claim number 05", VerdictLabel::False),
      make_record("r06", "claim number 06", VerdictLabel::True, false),
      make_record("r07", "claim number 07", VerdictLabel::True),
      make_record("r08", "claim number 08", VerdictLabel::False),
      make_record("r09", "claim number 09", VerdictLabel::True),
      make_record("r10", "claim number 10", VerdictLabel::Unverifiable),
  };

  Gateway gateway(fast_gateway_config());
  auto backend = std::make_shared<CallbackBackend>(table_dispatch(table));
  for (const char* id : {"m1", "m2", "m3"}) gateway.register_backend(id, backend);
  auto config = default_config();
  config.parallelism = 3;
  Pipeline pipeline(gateway, config);

  auto report = detect_mismatches(records, {"m1", "m2", "m3"}, pipeline);

  REQUIRE(report.findings.size() == 8);
  std::vector<std::string> flagged;
  for (const auto& finding : report.findings) {
    CHECK(finding.model_verdicts.size() == 3);
    if (finding.flagged) flagged.push_back(finding.record_id);
    // Brute-force re-check from the stored verdicts.
    auto first = finding.model_verdicts.begin()->second;
    bool unanimous = true;
    for (const auto& [model, verdict] : finding.model_verdicts)
      unanimous = unanimous && verdict == first;
    CHECK(finding.consensus.has_value() == unanimous);
    CHECK(finding.flagged ==
          (unanimous && first != finding.gold_label));
  }
  CHECK(flagged == std::vector<std::string>{"r01", "r04", "r08"});

  REQUIRE(report.skipped.size() == 2);
  CHECK(report.skipped[0].record_id == "r06");
  CHECK(report.skipped[0].error.find("evidence") != std::string::npos);
  CHECK(report.skipped[1].record_id == "r07");
  CHECK_FALSE(report.skipped[1].error.empty());

  // Consensus equal to gold never flags (r10).
  for (const auto& finding : report.findings)
    if (finding.record_id == "r10") {
      CHECK(finding.consensus == VerdictLabel::Unverifiable);
      CHECK_FALSE(finding.flagged);
    }

  SUBCASE("clean removes exactly the flagged records") {
    auto outcome = clean(records, report.findings);
    CHECK(outcome.kept.size() == 7);
    CHECK(outcome.removed.size() == 3);
    std::vector<std::string> removed_ids;
    for (const auto& record : outcome.removed) {
      removed_ids.push_back(record.id);
      std::string reason = record.raw.at("caafc_removed_reason");
      CHECK(reason.find("contradicts gold label") != std::string::npos);
      CHECK(reason.find(to_string(record.gold_label)) != std::string::npos);
    }
    CHECK(removed_ids == std::vector<std::string>{"r01", "r04", "r08"});
    // Disjoint and exhaustive.
    std::set<std::string> all;
    for (const auto& record : outcome.kept) all.insert(record.id);
    for (const auto& record : outcome.removed) {
      CHECK(all.count(record.id) == 0);
      all.insert(record.id);
    }
    CHECK(all.size() == records.size());
    // Kept records stay unmodified.
    for (const auto& record : outcome.kept)
      CHECK_FALSE(record.raw.contains("caafc_removed_reason"));
  }

  SUBCASE("no findings keeps everything") {
    auto outcome = clean(records, {});
    CHECK(outcome.kept.size() == records.size());
    CHECK(outcome.removed.empty());
  }

  SUBCASE("finding serialization") {
    const auto& finding = report.findings[0];
    auto value = finding_to_json(finding);
    CHECK(value.at("record_id") == "r01");
    CHECK(value.at("flagged") == true);
    CHECK(value.at("consensus") == "false");
    CHECK(value.at("gold_label") == "true");
    CHECK(value.at("model_verdicts").at("m2") == "false");
  }
}

TEST_CASE("detect_mismatches needs three distinct models") {
  Gateway gateway(fast_gateway_config());
  auto config = default_config();
  Pipeline pipeline(gateway, config);
  CHECK_THROWS_AS(detect_mismatches({}, {"m1", "m1", "m2"}, pipeline),
                  InvariantViolation);
}

namespace {

// Six-record fixture whose hand-computed report is asserted literally:
// gold (t,t,f,f,u,u), predicted (t,f,f,f,u,f).
std::vector<DatasetRecord> bench_records() {
  return {make_record("b1", "claim number 21", VerdictLabel::True),
          make_record("b2", "claim number 22", VerdictLabel::True),
          make_record("b3", "claim number 23", VerdictLabel::False),
          make_record("b4", "claim number 24", VerdictLabel::False),
          make_record("b5", "claim number 25", VerdictLabel::Unverifiable),
          make_record("b6", "claim number 26", VerdictLabel::Unverifiable)};
}

std::shared_ptr<VerdictTable> bench_table() {
  auto table = std::make_shared<VerdictTable>();
  (*table)["claim number 21"] = {{"m", "true"}};
  (*table)["claim number 22"] = {{"m", "false"}};
  (*table)["claim number 23"] = {{"m", "false"}};
  (*table)["claim number 24"] = {{"m", "false"}};
  (*table)["claim number 25"] = {{"m", "unverifiable"}};
  (*table)["claim number 26"] = {{"m", "false"}};
  return table;
}

}  // namespace

TEST_CASE("run_bench reproduces the hand-computed report") {
  Gateway gateway(fast_gateway_config());
  auto backend =
      std::make_shared<CallbackBackend>(table_dispatch(bench_table()));
  gateway.register_backend("m", backend);
  auto config = default_config();
  for (auto& [stage, model] : config.models) model = "m";
  Pipeline pipeline(gateway, config);

  auto bench = run_bench(bench_records(), pipeline, {});
  const auto& report = bench.report;
  CHECK(report.total == 6);
  CHECK(report.accuracy == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
  CHECK(report.per_class.at("true").precision == doctest::Approx(1.0));
  CHECK(report.per_class.at("true").recall == doctest::Approx(0.5));
  CHECK(report.per_class.at("true").f1 ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(report.per_class.at("false").precision ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.per_class.at("false").recall == doctest::Approx(1.0));
  CHECK(report.per_class.at("unverifiable").recall == doctest::Approx(0.5));
  CHECK(report.macro_precision ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(report.macro_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(report.weighted_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  REQUIRE(bench.records.size() == 6);
  CHECK(bench.records[0].record_id == "b1");
  CHECK(bench.records[1].predicted == "false");
  CHECK(bench.skipped.empty());
  CHECK(bench.abstained == 0);

  auto out = bench_to_json(bench);
  CHECK(out.at("metrics").at("accuracy") ==
        doctest::Approx(4.0 / 6.0).epsilon(1e-12));
  CHECK(out.at("records").size() == 6);
}

TEST_CASE("records without evidence land in the skip section") {
  auto records = bench_records();
  records.push_back(
      make_record("b7", "claim number 27", VerdictLabel::True, false));
  Gateway gateway(fast_gateway_config());
  gateway.register_backend(
      "m", std::make_shared<CallbackBackend>(table_dispatch(bench_table())));
  auto config = default_config();
  for (auto& [stage, model] : config.models) model = "m";
  Pipeline pipeline(gateway, config);

  auto bench = run_bench(records, pipeline, {});
  CHECK(bench.report.total == 6);  // b7 excluded from metrics
  REQUIRE(bench.skipped.size() == 1);
  CHECK(bench.skipped[0].record_id == "b7");
  CHECK_FALSE(bench.skipped[0].error.empty());
}

TEST_CASE("binary maps fold or drop unverifiable") {
  Gateway gateway(fast_gateway_config());
  gateway.register_backend(
      "m", std::make_shared<CallbackBackend>(table_dispatch(bench_table())));
  auto config = default_config();
  for (auto& [stage, model] : config.models) model = "m";
  Pipeline pipeline(gateway, config);

  SUBCASE("unverifiable_as_false") {
    BenchOptions options;
    options.binary_map = BinaryMap::unverifiable_as_false;
    auto bench = run_bench(bench_records(), pipeline, options);
    // gold (t,t,f,f,f,f), predicted (t,f,f,f,f,f): 5 of 6 right.
    CHECK(bench.report.total == 6);
    CHECK(bench.report.classes ==
          std::vector<std::string>{"true", "false"});
    CHECK(bench.report.accuracy ==
          doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(bench.abstained == 0);
  }

  SUBCASE("abstain") {
    BenchOptions options;
    options.binary_map = BinaryMap::abstain;
    auto bench = run_bench(bench_records(), pipeline, options);
    // b5 (both unverifiable) and b6 (gold unverifiable) drop out.
    CHECK(bench.abstained == 2);
    CHECK(bench.report.total == 4);
    // gold (t,t,f,f), predicted (t,f,f,f): 3 of 4.
    CHECK(bench.report.accuracy == doctest::Approx(0.75).epsilon(1e-12));
  }
}

TEST_CASE("checkpointed bench resumes to the identical report") {
  TempDir dir;
  auto checkpoint = dir / "bench.jsonl";
  auto records = bench_records();
  auto config = default_config();
  for (auto& [stage, model] : config.models) model = "m";

  // Uninterrupted run, checkpointing as it goes.
  Gateway gateway1(fast_gateway_config());
  auto backend1 =
      std::make_shared<CallbackBackend>(table_dispatch(bench_table()));
  gateway1.register_backend("m", backend1);
  Pipeline pipeline1(gateway1, config);
  BenchOptions options;
  options.checkpoint_path = checkpoint;
  auto full = run_bench(records, pipeline1, options);
  CHECK(backend1->calls() == 12);  // 6 records × (segment + fact-check)

  // Resume over the complete checkpoint: no model calls at all.
  Gateway gateway2(fast_gateway_config());
  auto backend2 =
      std::make_shared<CallbackBackend>(table_dispatch(bench_table()));
  gateway2.register_backend("m", backend2);
  Pipeline pipeline2(gateway2, config);
  BenchOptions resume_options;
  resume_options.checkpoint_path = checkpoint;
  resume_options.resume = true;
  auto resumed = run_bench(records, pipeline2, resume_options);
  CHECK(backend2->calls() == 0);
  CHECK(bench_to_json(resumed).dump(2) == bench_to_json(full).dump(2));

  // Interrupted halfway: only the remaining records cost calls, and the
  // final report still matches the uninterrupted one.
  auto checkpoint2 = dir / "bench2.jsonl";
  Gateway gateway3(fast_gateway_config());
  auto backend3 =
      std::make_shared<CallbackBackend>(table_dispatch(bench_table()));
  gateway3.register_backend("m", backend3);
  Pipeline pipeline3(gateway3, config);
  std::vector<DatasetRecord> first_half(records.begin(), records.begin() + 3);
  BenchOptions half_options;
  half_options.checkpoint_path = checkpoint2;
  run_bench(first_half, pipeline3, half_options);
  CHECK(backend3->calls() == 6);

  Gateway gateway4(fast_gateway_config());
  auto backend4 =
      std::make_shared<CallbackBackend>(table_dispatch(bench_table()));
  gateway4.register_backend("m", backend4);
  Pipeline pipeline4(gateway4, config);
  BenchOptions finish_options;
  finish_options.checkpoint_path = checkpoint2;
  finish_options.resume = true;
  auto finished = run_bench(records, pipeline4, finish_options);
  CHECK(backend4->calls() == 6);  // only the second half
  CHECK(bench_to_json(finished).dump(2) == bench_to_json(full).dump(2));
}
