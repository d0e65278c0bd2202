#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "caafc/date.hpp"
#include "caafc/gateway.hpp"
#include "caafc/schemas.hpp"
#include "caafc/segmenter.hpp"
#include "caafc/text.hpp"

namespace caafc {

// A source the model nominated before retrieval (e.g. "CDC", "WHO").
struct PrimarySource {
  std::string descriptor;
  std::string rationale;
};

struct EvidenceItem {
  std::string excerpt;
  std::string source_url;
  std::optional<Date> source_date;
};

// Everything one retrieval produced. `narrative` is the raw text handed to
// the fact-checker; `items` is the structured view used for ordering.
struct EvidenceBundle {
  std::string query;
  std::string retrieved_at;  // ISO-8601 UTC; empty for dataset evidence
  std::string narrative;
  std::vector<EvidenceItem> items;
  std::string backend_id;
};

Json bundle_to_json(const EvidenceBundle& bundle);
EvidenceBundle bundle_from_json(const Json& value);  // throws ParseError

// Asks the model which primary sources to consult for a claim.
class SourceSelector {
 public:
  SourceSelector(Gateway& gateway, std::string model_id,
                 int repair_budget = 1);
  // May legitimately return an empty list.
  std::vector<PrimarySource> select(const std::string& claim_text,
                                    RunBudget* budget = nullptr) const;

 private:
  Gateway* gateway_;
  std::string model_id_;
  int repair_budget_;
};

// Deterministic search-query construction. Throws InvariantViolation on an
// empty claim list; a missing date renders as "unknown"; the sources clause
// is omitted entirely when no sources are given.
std::string build_query(const std::vector<AtomicClaim>& claims,
                        const std::optional<Date>& claim_date,
                        const std::vector<PrimarySource>& sources);

// Pulls (excerpt, url, date) triples out of a narrative. "SOURCE: <url>"
// markers take precedence; bare URLs elsewhere are picked up afterwards.
// URLs are de-duplicated exactly, keeping first appearance.
std::vector<EvidenceItem> extract_evidence_items(const std::string& narrative);

// Stable-sorts items by source_date ascending; undated items keep their
// relative order after all dated ones. Idempotent.
EvidenceBundle canonicalize(EvidenceBundle bundle);

// Produces text evidence for a query. Implementations throw
// RetrievalUnavailable when they cannot serve.
class RetrievalBackend {
 public:
  virtual ~RetrievalBackend() = default;
  virtual std::string fetch(const std::string& query) = 0;
};

// Reads <hash16(query)>.txt from a directory. Hermetic tests and replays.
class FixtureRetrievalBackend : public RetrievalBackend {
 public:
  explicit FixtureRetrievalBackend(std::filesystem::path dir);
  std::string fetch(const std::string& query) override;

 private:
  std::filesystem::path dir_;
};

// Writes the fixture file fetch() would read. Returns the path.
std::filesystem::path write_retrieval_fixture(
    const std::filesystem::path& dir, const std::string& query,
    const std::string& narrative);

struct HttpRetrievalConfig {
  std::string base_url;          // e.g. "http://localhost:8089"
  std::string path = "/retrieve";
  std::string auth_header;       // optional, e.g. "Authorization"
  std::string auth_value;
  int timeout_seconds = 30;
};

// POSTs {"query": ...} and expects {"narrative": ...} (or a raw text body).
class HttpRetrievalBackend : public RetrievalBackend {
 public:
  explicit HttpRetrievalBackend(HttpRetrievalConfig config);
  std::string fetch(const std::string& query) override;

 private:
  HttpRetrievalConfig config_;
};

// Wraps evidence that arrived with a dataset record instead of a live
// search. Throws EmptyNarrative on blank text.
EvidenceBundle dataset_bundle(const std::string& evidence_text);

struct RetrieverConfig {
  std::filesystem::path cache_dir;  // empty → caching disabled
  std::function<std::string()> today = today_utc;          // cache-key day
  std::function<std::string()> now = now_iso8601_utc;      // retrieved_at
};

// Front door for retrieval: backend registry + one-calendar-day disk cache
// keyed on (query hash, day). A cache hit makes zero backend calls.
class Retriever {
 public:
  explicit Retriever(RetrieverConfig config);

  void register_backend(const std::string& id,
                        std::shared_ptr<RetrievalBackend> backend);
  bool has_backend(const std::string& id) const;

  EvidenceBundle retrieve(const std::string& query,
                          const std::string& backend_id);

  std::filesystem::path cache_path(const std::string& query,
                                   const std::string& day) const;

 private:
  RetrieverConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<RetrievalBackend>> backends_;
};

}  // namespace caafc
