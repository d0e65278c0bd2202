#include <doctest.h>

#include "caafc/errors.hpp"
#include "caafc/schemas.hpp"

using namespace caafc;

TEST_CASE("extract_json reads fenced minimal subclaim object") {
  Json v = extract_json("```json\n{\"subclaims\":[]}\n```", "subclaim_list");
  CHECK(v.at("subclaims").is_array());
  CHECK(v.at("subclaims").empty());
}

TEST_CASE("extract_json parses the worked fact-check output") {
  // Exactly the example output the fact-check prompt shows.
  std::string raw =
      "{\"subclaims\": [{\"text\": \"Paris is the capital of Germany.\","
      "\"label\": \"false\",\"justification\": \"The evidence states Paris is "
      "the capital of France, not Germany.\"}, {\"text\": \"Paris has the "
      "Eiffel Tower.\",\"label\": \"true\",\"justification\": \"The evidence "
      "confirms the Eiffel Tower is located in Paris.\"}]}";
  Json v = extract_json(raw, "verdict_object");
  REQUIRE(v.at("subclaims").size() == 2);
  CHECK(v["subclaims"][0]["label"] == "false");
  CHECK(v["subclaims"][1]["label"] == "true");
  CHECK(v["subclaims"][0]["text"] == "Paris is the capital of Germany.");
}

TEST_CASE("extract_json with prose only") {
  CHECK_THROWS_AS(extract_json("sure, here it is", "subclaim_list"),
                  NoJsonFound);
  CHECK_THROWS_AS(extract_json("", "subclaim_list"), NoJsonFound);
}

TEST_CASE("extract_json skips unparseable candidates") {
  Json v = extract_json("{oops not json} then {\"subclaims\": [\"a\"]}",
                        "subclaim_list");
  REQUIRE(v.at("subclaims").size() == 1);
  CHECK(v["subclaims"][0] == "a");
}

TEST_CASE("extract_json embedded value round-trips structurally") {
  for (const char* dumped : {
           "{\"subclaims\":[\"x\",\"y {braces} z\",\"\\\"quoted\\\"\"]}",
           "{\"subclaims\":[]}",
           "[\"one\",\"two\"]",
       }) {
    Json original = Json::parse(dumped);
    std::string raw = "Sure! Here you go:\n```\n" + std::string(dumped) +
                      "\n```\nLet me know if that helps.";
    Json extracted = extract_json(raw, "subclaim_list");
    Json expected = validate_schema("subclaim_list", original);
    CHECK(extracted == expected);
  }
}

TEST_CASE("verdict labels are case-normalized and validated") {
  Json v = extract_json(
      "[{\"text\":\"a\",\"label\":\" True \"},"
      "{\"text\":\"b\",\"label\":\"FALSE\",\"justification\":\"j\"}]",
      "verdict_object");
  CHECK(v["subclaims"][0]["label"] == "true");
  CHECK(v["subclaims"][0]["justification"] == "");
  CHECK(v["subclaims"][1]["label"] == "false");

  CHECK_THROWS_AS(
      extract_json("[{\"text\":\"a\",\"label\":\"maybe\"}]", "verdict_object"),
      SchemaViolation);
  try {
    extract_json("[{\"text\":\"a\",\"label\":\"maybe\"}]", "verdict_object");
  } catch (const SchemaViolation& e) {
    CHECK(e.field() == "subclaims[0].label");
  }
}

TEST_CASE("verdict entries must carry text and label") {
  CHECK_THROWS_AS(extract_json("[{\"label\":\"true\"}]", "verdict_object"),
                  SchemaViolation);
  CHECK_THROWS_AS(extract_json("[{\"text\":\"a\"}]", "verdict_object"),
                  SchemaViolation);
  CHECK_THROWS_AS(extract_json("[\"bare string\"]", "verdict_object"),
                  SchemaViolation);
}

TEST_CASE("justification_object") {
  Json v = extract_json(
      "{\"justification\": \"the claim has a factual error\", "
      "\"corrected_claim\": \"Paris is the capital of France and it has the "
      "Eiffel Tower.\"}",
      "justification_object");
  CHECK(v["justification"] == "the claim has a factual error");
  CHECK(v["corrected_claim"] ==
        "Paris is the capital of France and it has the Eiffel Tower.");

  Json no_corr =
      extract_json("{\"justification\": \"fine\"}", "justification_object");
  CHECK_FALSE(no_corr.contains("corrected_claim"));

  CHECK_THROWS_AS(extract_json("{\"other\": 1}", "justification_object"),
                  SchemaViolation);
  CHECK_THROWS_AS(
      extract_json("{\"justification\": \"  \"}", "justification_object"),
      SchemaViolation);
}

TEST_CASE("comparison_object enums") {
  Json v = extract_json(
      "{\"better_evidence\": \"Evidence_2\", \"reason_category\": "
      "\"more_updated_information\", \"reason\": \"newer\"}",
      "comparison_object");
  CHECK(v["better_evidence"] == "evidence_2");
  CHECK(v["reason_category"] == "more_updated_information");

  Json defaulted =
      extract_json("{\"better_evidence\": \"tie\"}", "comparison_object");
  CHECK(defaulted["reason_category"] == "other");
  CHECK(defaulted["reason"] == "");

  CHECK_THROWS_AS(
      extract_json("{\"better_evidence\": \"evidence_3\"}", "comparison_object"),
      SchemaViolation);
  CHECK_THROWS_AS(extract_json("{\"better_evidence\": \"tie\", "
                               "\"reason_category\": \"vibes\"}",
                               "comparison_object"),
                  SchemaViolation);
  CHECK_THROWS_AS(extract_json("{\"reason\": \"no pick\"}", "comparison_object"),
                  SchemaViolation);
}

TEST_CASE("source_list accepts strings, objects and wrappers") {
  Json strings = extract_json("[\"WHO\", \"FDA\"]", "source_list");
  REQUIRE(strings["sources"].size() == 2);
  CHECK(strings["sources"][0]["descriptor"] == "WHO");
  CHECK(strings["sources"][0]["url"] == "");

  Json objects = extract_json(
      "{\"sources\": [{\"source\": \"WHO\", \"url\": \"https://who.int\", "
      "\"justification\": \"health authority\"}]}",
      "source_list");
  CHECK(objects["sources"][0]["descriptor"] == "WHO");
  CHECK(objects["sources"][0]["url"] == "https://who.int");

  Json url_only =
      extract_json("[{\"url\": \"https://who.int\"}]", "source_list");
  CHECK(url_only["sources"][0]["descriptor"] == "https://who.int");

  CHECK_THROWS_AS(extract_json("[{\"justification\": \"no name\"}]",
                               "source_list"),
                  SchemaViolation);
}

TEST_CASE("judge_object shapes") {
  Json full = extract_json(
      "{\"error_detection\": {\"score\": 2, \"rationale\": \"all found\"},"
      " \"error_correction\": {\"score\": 1, \"rationale\": \"partial\"},"
      " \"links\": {\"relevant\": true, \"supportive\": false, "
      "\"rationale\": \"on-topic\"}}",
      "judge_object");
  CHECK(full["error_detection"]["score"] == 2);
  CHECK(full["error_correction"]["score"] == 1);
  CHECK(full["links"]["relevant"] == true);
  CHECK(full["links"]["supportive"] == false);

  Json bare = extract_json(
      "{\"error_detection\": 0, \"error_correction\": \"2\", "
      "\"links\": {\"relevant\": \"yes\"}}",
      "judge_object");
  CHECK(bare["error_detection"]["score"] == 0);
  CHECK(bare["error_correction"]["score"] == 2);
  CHECK(bare["links"]["relevant"] == true);
  CHECK(bare["links"]["supportive"] == false);

  CHECK_THROWS_AS(
      extract_json("{\"error_detection\": 3, \"error_correction\": 0, "
                   "\"links\": {}}",
                   "judge_object"),
      SchemaViolation);
  CHECK_THROWS_AS(
      extract_json("{\"error_detection\": 1, \"error_correction\": 0}",
                   "judge_object"),
      SchemaViolation);
}

TEST_CASE("unregistered schema is an invariant violation") {
  CHECK_THROWS_AS(validate_schema("bogus", Json::object()),
                  InvariantViolation);
  auto names = registered_schemas();
  CHECK(names.size() == 6);
}

TEST_CASE("an invalid outer object can surface an inner fragment") {
  // Model output echoing the prompt's format block (whose second entry has a
  // broken key) parses only at the first inner object, which then fails the
  // schema — the pipeline treats that as extraction failure and repairs.
  std::string broken =
      "{\"subclaims\": [{\"text\": \"First.\",\"label\": \"true\"}, "
      "{\"text\": \"Second.\",label\": \"false\"}]}";
  CHECK_THROWS_AS(extract_json(broken, "verdict_object"), SchemaViolation);
}
