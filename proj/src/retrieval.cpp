#include "caafc/retrieval.hpp"

#include <algorithm>
#include <set>

#include <httplib.h>

#include "caafc/errors.hpp"
#include "caafc/prompt.hpp"
#include "caafc/prompts.hpp"
#include "caafc/text.hpp"

namespace caafc {

Json bundle_to_json(const EvidenceBundle& bundle) {
  Json items = Json::array();
  for (const auto& item : bundle.items) {
    Json j{{"excerpt", item.excerpt}, {"source_url", item.source_url}};
    if (item.source_date)
      j["source_date"] = item.source_date->to_string();
    else
      j["source_date"] = nullptr;
    items.push_back(std::move(j));
  }
  return Json{{"query", bundle.query},
              {"retrieved_at", bundle.retrieved_at},
              {"narrative", bundle.narrative},
              {"backend_id", bundle.backend_id},
              {"items", std::move(items)}};
}

EvidenceBundle bundle_from_json(const Json& value) {
  auto need_string = [&](const char* key) -> std::string {
    if (!value.contains(key) || !value[key].is_string())
      throw ParseError("evidence bundle", 0,
                       std::string("missing or non-string field '") + key +
                           "'");
    return value[key].get<std::string>();
  };
  EvidenceBundle bundle;
  bundle.query = need_string("query");
  bundle.retrieved_at = need_string("retrieved_at");
  bundle.narrative = need_string("narrative");
  bundle.backend_id = need_string("backend_id");
  if (!value.contains("items") || !value["items"].is_array())
    throw ParseError("evidence bundle", 0, "missing or non-array 'items'");
  for (const auto& j : value["items"]) {
    EvidenceItem item;
    item.excerpt = j.value("excerpt", std::string());
    item.source_url = j.value("source_url", std::string());
    if (j.contains("source_date") && j["source_date"].is_string()) {
      item.source_date = parse_date(j["source_date"].get<std::string>());
      if (!item.source_date)
        throw ParseError("evidence bundle", 0,
                         "bad source_date '" +
                             j["source_date"].get<std::string>() + "'");
    }
    bundle.items.push_back(std::move(item));
  }
  return bundle;
}

SourceSelector::SourceSelector(Gateway& gateway, std::string model_id,
                               int repair_budget)
    : gateway_(&gateway),
      model_id_(std::move(model_id)),
      repair_budget_(repair_budget) {}

std::vector<PrimarySource> SourceSelector::select(const std::string& claim_text,
                                                  RunBudget* budget) const {
  if (trim(claim_text).empty())
    throw InvariantViolation("SourceSelector::select requires claim text");

  GenerationRequest request;
  request.model_id = model_id_;
  request.user_text =
      render(prompts::primary_sources(), {{"claim", claim_text}});
  request.tags = {"primary_sources"};

  Json value = gateway_->complete_structured(request, "source_list",
                                             repair_budget_, budget);
  std::vector<PrimarySource> sources;
  for (const auto& entry : value.at("sources")) {
    PrimarySource source;
    source.descriptor = trim(entry.value("descriptor", std::string()));
    source.rationale = trim(entry.value("justification", std::string()));
    if (source.descriptor.empty() && !entry.value("url", std::string()).empty())
      source.descriptor = trim(entry.value("url", std::string()));
    if (!source.descriptor.empty()) sources.push_back(std::move(source));
  }
  return sources;
}

std::string build_query(const std::vector<AtomicClaim>& claims,
                        const std::optional<Date>& claim_date,
                        const std::vector<PrimarySource>& sources) {
  if (claims.empty())
    throw InvariantViolation("build_query requires at least one atomic claim");
  std::vector<std::string> texts;
  texts.reserve(claims.size());
  for (const auto& claim : claims) texts.push_back(claim.text);

  std::string query =
      "I need timestamped information about the following list of claims " +
      quoted_list(texts) + " on the following date " +
      (claim_date ? claim_date->to_string() : std::string("unknown")) + ".";
  if (!sources.empty()) {
    std::vector<std::string> descriptors;
    descriptors.reserve(sources.size());
    for (const auto& source : sources) descriptors.push_back(source.descriptor);
    query += " Start by checking the following sources: " +
             join(descriptors, ", ");
  }
  return query;
}

namespace {

constexpr const char* kSourceMarker = "SOURCE:";

// First URL starting at or after `pos`, if it begins within `limit`.
std::optional<std::pair<size_t, std::string>> url_at_or_after(
    const std::string& text, size_t pos, size_t limit) {
  auto http = text.find("http://", pos);
  auto https = text.find("https://", pos);
  size_t start = std::min(http, https);
  if (start == std::string::npos || start > limit) return std::nullopt;
  auto urls = extract_urls(text.substr(start));
  if (urls.empty()) return std::nullopt;
  return std::make_pair(start, urls.front());
}

}  // namespace

std::vector<EvidenceItem> extract_evidence_items(const std::string& narrative) {
  std::vector<EvidenceItem> items;
  std::set<std::string> seen;

  // Pass 1: explicit "SOURCE: <url>" markers. The excerpt for a marker is
  // the text between the previous marker's line end and this marker.
  size_t segment_start = 0;
  size_t pos = 0;
  while ((pos = narrative.find(kSourceMarker, pos)) != std::string::npos) {
    size_t after = pos + std::string(kSourceMarker).size();
    while (after < narrative.size() && narrative[after] == ' ') ++after;
    auto found = url_at_or_after(narrative, after, after);
    if (!found) {
      pos = after;
      continue;
    }
    EvidenceItem item;
    item.source_url = found->second;
    item.excerpt = trim(narrative.substr(segment_start, pos - segment_start));
    item.source_date = find_date(item.source_url);
    if (!item.source_date) item.source_date = find_date(item.excerpt);
    if (seen.insert(item.source_url).second) items.push_back(std::move(item));
    // Next excerpt starts after this marker's line.
    size_t line_end = narrative.find('\n', found->first);
    segment_start =
        line_end == std::string::npos ? narrative.size() : line_end + 1;
    pos = found->first + found->second.size();
  }

  // Pass 2: bare URLs not already captured, in order of appearance. The
  // excerpt is the URL's own line with the URL removed.
  for (const auto& url : extract_urls(narrative)) {
    if (!seen.insert(url).second) continue;
    EvidenceItem item;
    item.source_url = url;
    size_t at = narrative.find(url);
    if (at != std::string::npos) {
      size_t line_start = narrative.rfind('\n', at);
      line_start = line_start == std::string::npos ? 0 : line_start + 1;
      size_t line_end = narrative.find('\n', at);
      if (line_end == std::string::npos) line_end = narrative.size();
      std::string line = narrative.substr(line_start, line_end - line_start);
      size_t in_line = line.find(url);
      if (in_line != std::string::npos) line.erase(in_line, url.size());
      item.excerpt = trim(line);
    }
    item.source_date = find_date(url);
    if (!item.source_date) item.source_date = find_date(item.excerpt);
    items.push_back(std::move(item));
  }
  return items;
}

EvidenceBundle canonicalize(EvidenceBundle bundle) {
  std::stable_sort(bundle.items.begin(), bundle.items.end(),
                   [](const EvidenceItem& a, const EvidenceItem& b) {
                     if (a.source_date && b.source_date)
                       return *a.source_date < *b.source_date;
                     return a.source_date.has_value() &&
                            !b.source_date.has_value();
                   });
  return bundle;
}

FixtureRetrievalBackend::FixtureRetrievalBackend(std::filesystem::path dir)
    : dir_(std::move(dir)) {}

std::string FixtureRetrievalBackend::fetch(const std::string& query) {
  auto path = dir_ / (hash16(query) + ".txt");
  auto text = read_file(path);
  if (!text)
    throw RetrievalUnavailable("no retrieval fixture " + path.string() +
                               " for query hash " + hash16(query));
  return *text;
}

std::filesystem::path write_retrieval_fixture(const std::filesystem::path& dir,
                                              const std::string& query,
                                              const std::string& narrative) {
  auto path = dir / (hash16(query) + ".txt");
  atomic_write_file(path, narrative);
  return path;
}

HttpRetrievalBackend::HttpRetrievalBackend(HttpRetrievalConfig config)
    : config_(std::move(config)) {}

std::string HttpRetrievalBackend::fetch(const std::string& query) {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.auth_header.empty())
    headers.emplace(config_.auth_header, config_.auth_value);

  Json payload{{"query", query}};
  auto result = client.Post(config_.path, headers, payload.dump(),
                            "application/json");
  if (!result)
    throw RetrievalUnavailable("retrieval endpoint unreachable: " +
                               config_.base_url + config_.path);
  if (result->status < 200 || result->status >= 300)
    throw RetrievalUnavailable("retrieval endpoint returned HTTP " +
                               std::to_string(result->status));
  Json body = Json::parse(result->body, nullptr, /*allow_exceptions=*/false);
  if (body.is_object() && body.contains("narrative") &&
      body["narrative"].is_string())
    return body["narrative"].get<std::string>();
  return result->body;  // plain-text endpoint
}

EvidenceBundle dataset_bundle(const std::string& evidence_text) {
  if (trim(evidence_text).empty())
    throw EmptyNarrative("dataset record carries no evidence text");
  EvidenceBundle bundle;
  bundle.narrative = evidence_text;
  bundle.items = extract_evidence_items(evidence_text);
  bundle.backend_id = "dataset";
  return canonicalize(std::move(bundle));
}

Retriever::Retriever(RetrieverConfig config) : config_(std::move(config)) {}

void Retriever::register_backend(const std::string& id,
                                 std::shared_ptr<RetrievalBackend> backend) {
  std::lock_guard lock(mutex_);
  backends_[id] = std::move(backend);
}

bool Retriever::has_backend(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return backends_.count(id) > 0;
}

std::filesystem::path Retriever::cache_path(const std::string& query,
                                            const std::string& day) const {
  return config_.cache_dir / (hash16(query) + "_" + day + ".json");
}

EvidenceBundle Retriever::retrieve(const std::string& query,
                                   const std::string& backend_id) {
  if (trim(query).empty())
    throw InvariantViolation("retrieve requires a non-empty query");

  std::shared_ptr<RetrievalBackend> backend;
  {
    std::lock_guard lock(mutex_);
    auto it = backends_.find(backend_id);
    if (it == backends_.end())
      throw RetrievalUnavailable("no retrieval backend registered as '" +
                                 backend_id + "'");
    backend = it->second;
  }

  const bool caching = !config_.cache_dir.empty();
  const std::string day = config_.today();
  if (caching) {
    if (auto cached = read_file(cache_path(query, day))) {
      Json value = Json::parse(*cached, nullptr, /*allow_exceptions=*/false);
      if (!value.is_discarded()) {
        try {
          return bundle_from_json(value);
        } catch (const ParseError&) {
          // Corrupt cache entry: fall through and refetch.
        }
      }
    }
  }

  std::string narrative;
  try {
    narrative = backend->fetch(query);
  } catch (const RetrievalUnavailable&) {
    throw;
  } catch (const std::exception& e) {
    throw RetrievalUnavailable("retrieval backend '" + backend_id +
                               "' failed: " + e.what());
  }
  if (trim(narrative).empty())
    throw EmptyNarrative("retrieval backend '" + backend_id +
                         "' returned an empty narrative");

  EvidenceBundle bundle;
  bundle.query = query;
  bundle.retrieved_at = config_.now();
  bundle.narrative = std::move(narrative);
  bundle.items = extract_evidence_items(bundle.narrative);
  bundle.backend_id = backend_id;
  bundle = canonicalize(std::move(bundle));

  if (caching)
    atomic_write_file(cache_path(query, day), bundle_to_json(bundle).dump(2));
  return bundle;
}

}  // namespace caafc
