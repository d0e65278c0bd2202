#include "caafc/actionability.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>

#include <httplib.h>

#include "caafc/errors.hpp"
#include "caafc/justify.hpp"
#include "caafc/prompt.hpp"
#include "caafc/prompts.hpp"
#include "caafc/schemas.hpp"

namespace caafc {

ActionabilityScore make_score(int error_detection, int error_correction,
                              int link_score, int threshold) {
  if (error_detection < 0 || error_detection > 2)
    throw InvariantViolation("error_detection must be 0..2, got " +
                             std::to_string(error_detection));
  if (error_correction < 0 || error_correction > 2)
    throw InvariantViolation("error_correction must be 0..2, got " +
                             std::to_string(error_correction));
  if (link_score < 0 || link_score > 3)
    throw InvariantViolation("link_score must be 0..3, got " +
                             std::to_string(link_score));
  ActionabilityScore score;
  score.error_detection = error_detection;
  score.error_correction = error_correction;
  score.link_score = link_score;
  score.total = error_detection + error_correction + link_score;
  score.pass = score.total >= threshold;
  return score;
}

void check_link_consistency(const ActionabilityScore& score,
                            int functional_links) {
  if (score.link_score >= 1 && functional_links < 1)
    throw InvariantViolation(
        "link_score " + std::to_string(score.link_score) +
        " is impossible with no functional cited link");
}

namespace {

// "https://host:port/path?q" → ("https://host:port", "/path?q").
bool split_url(const std::string& url, std::string& base, std::string& target) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return false;
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base = url;
    target = "/";
  } else {
    base = url.substr(0, path_start);
    target = url.substr(path_start);
  }
  return !base.empty() && base != url.substr(0, scheme_end) + "://";
}

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 ||
         status == 308;
}

bool looks_like_timeout(httplib::Error error) {
  return error == httplib::Error::ConnectionTimeout ||
         error == httplib::Error::Read || error == httplib::Error::Write;
}

}  // namespace

LinkProber::LinkProber(LinkProbeConfig config) : config_(std::move(config)) {}

std::filesystem::path LinkProber::cache_path(const std::string& url,
                                             const std::string& day) const {
  return config_.cache_dir / (hash16(url) + "_" + day + ".json");
}

LinkProbeResult LinkProber::probe_one(const std::string& url) {
  const bool caching = !config_.cache_dir.empty();
  const std::string day = config_.today();
  if (caching) {
    if (auto cached = read_file(cache_path(url, day))) {
      Json value = Json::parse(*cached, nullptr, /*allow_exceptions=*/false);
      if (value.is_object() && value.value("url", std::string()) == url) {
        LinkProbeResult result;
        result.url = url;
        result.functional = value.value("functional", false);
        result.status = value.value("status", 0);
        result.timed_out = value.value("timed_out", false);
        result.probed_at = value.value("probed_at", std::string());
        return result;
      }
    }
  }

  LinkProbeResult result;
  result.url = url;
  result.probed_at = config_.now();

  std::string current = url;
  for (int hop = 0; hop <= config_.max_redirects; ++hop) {
    std::string base, target;
    if (!split_url(current, base, target)) break;  // unparseable → dead
    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_follow_location(false);  // redirects are counted here

    auto response = client.Head(target);
    if (response && response->status == 405) response = client.Get(target);
    if (!response) {
      result.timed_out = looks_like_timeout(response.error());
      result.status = 0;
      break;
    }
    result.status = response->status;
    if (is_redirect(response->status) && response->has_header("Location") &&
        hop < config_.max_redirects) {
      std::string location = response->get_header_value("Location");
      if (location.rfind("http://", 0) == 0 ||
          location.rfind("https://", 0) == 0)
        current = location;
      else if (!location.empty() && location[0] == '/')
        current = base + location;
      else
        current = base + "/" + location;
      continue;
    }
    break;
  }
  result.functional = result.status >= 200 && result.status <= 399;

  if (caching) {
    Json entry{{"url", result.url},
               {"functional", result.functional},
               {"status", result.status},
               {"timed_out", result.timed_out},
               {"probed_at", result.probed_at}};
    atomic_write_file(cache_path(url, day), entry.dump());
  }
  return result;
}

std::vector<LinkProbeResult> LinkProber::probe_links(
    const std::vector<std::string>& urls) {
  // Probe each distinct URL once, then fan results back out in input order.
  std::vector<std::string> unique;
  std::set<std::string> seen;
  for (const auto& url : urls)
    if (seen.insert(url).second) unique.push_back(url);

  std::vector<LinkProbeResult> probed(unique.size());
  int workers = std::max(1, std::min<int>(config_.concurrency,
                                          static_cast<int>(unique.size())));
  if (workers <= 1) {
    for (size_t i = 0; i < unique.size(); ++i) probed[i] = probe_one(unique[i]);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < unique.size();
             i = next.fetch_add(1))
          probed[i] = probe_one(unique[i]);
      });
    for (auto& t : pool) t.join();
  }

  std::map<std::string, LinkProbeResult> by_url;
  for (auto& result : probed) by_url[result.url] = result;
  std::vector<LinkProbeResult> out;
  out.reserve(urls.size());
  for (const auto& url : urls) out.push_back(by_url[url]);
  return out;
}

LinkProbeFn LinkProber::as_fn() {
  return [this](const std::vector<std::string>& urls) {
    return probe_links(urls);
  };
}

RevisionFeedback synthesize_feedback(const JudgeAssessment& assessment) {
  const ActionabilityScore& score = assessment.score;
  if (score.pass)
    throw InvariantViolation(
        "synthesize_feedback called on a passing score (total " +
        std::to_string(score.total) + ")");
  RevisionFeedback feedback;
  feedback.source_score = score;
  if (score.error_detection < 2)
    feedback.missing_errors =
        !trim(assessment.detection_rationale).empty()
            ? assessment.detection_rationale
            : "Not every factual error in the claim is identified; name each "
              "one explicitly.";
  if (score.error_correction < 2)
    feedback.missing_corrections =
        !trim(assessment.correction_rationale).empty()
            ? assessment.correction_rationale
            : "Not every detected error is corrected; state the corrected "
              "facts explicitly.";
  if (score.link_score < 3)
    feedback.link_issues =
        !trim(assessment.link_rationale).empty()
            ? assessment.link_rationale
            : "Cited links are missing, non-functional, or do not fully "
              "support the justification.";
  return feedback;
}

ActionabilityScorer::ActionabilityScorer(Gateway& gateway,
                                         std::string judge_model_id,
                                         int threshold, int repair_budget)
    : gateway_(&gateway),
      judge_model_id_(std::move(judge_model_id)),
      threshold_(threshold),
      repair_budget_(repair_budget) {
  if (threshold < 0 || threshold > 7)
    throw ConfigError("actionability threshold must be 0..7, got " +
                      std::to_string(threshold));
}

JudgeAssessment ActionabilityScorer::score(
    const std::string& claim_text, const Justification& justification,
    const std::vector<SubclaimVerdict>& verdicts,
    const std::vector<LinkProbeResult>& probes, RunBudget* budget) const {
  std::set<std::string> probed;
  for (const auto& probe : probes) probed.insert(probe.url);
  for (const auto& url : justification.cited_urls)
    if (!probed.count(url))
      throw InvariantViolation("cited URL was never probed: " + url);

  std::set<std::string> cited(justification.cited_urls.begin(),
                              justification.cited_urls.end());
  std::vector<std::string> functional;
  for (const auto& probe : probes)
    if (probe.functional && cited.count(probe.url)) functional.push_back(probe.url);
  std::sort(functional.begin(), functional.end());
  functional.erase(std::unique(functional.begin(), functional.end()),
                   functional.end());

  std::string false_subclaims;
  for (const auto& verdict : verdicts)
    if (verdict.label == VerdictLabel::False)
      false_subclaims += "- " + verdict.subclaim_text + "\n";
  if (false_subclaims.empty()) false_subclaims = "(none)";

  std::string functional_links;
  for (const auto& url : functional) functional_links += "- " + url + "\n";
  if (functional_links.empty()) functional_links = "(none)";

  GenerationRequest request;
  request.model_id = judge_model_id_;
  request.user_text = render(prompts::judge(),
                             {{"claim", claim_text},
                              {"false_subclaims", false_subclaims},
                              {"justification", justification.text},
                              {"functional_links", functional_links}});
  request.tags = {"judge"};

  Json value = gateway_->complete_structured(request, "judge_object",
                                             repair_budget_, budget);

  int detection = value["error_detection"]["score"].get<int>();
  int correction = value["error_correction"]["score"].get<int>();
  bool relevant = value["links"]["relevant"].get<bool>();
  bool supportive = value["links"]["supportive"].get<bool>();

  // Link ladder: functionality is mechanical; relevance and supportiveness
  // only upgrade links that actually answer.
  int link = 0;
  if (!functional.empty()) {
    link = 1;
    if (relevant) {
      link = 2;
      if (supportive) link = 3;
    }
  }

  JudgeAssessment assessment;
  assessment.score = make_score(detection, correction, link, threshold_);
  check_link_consistency(assessment.score,
                         static_cast<int>(functional.size()));
  assessment.detection_rationale =
      value["error_detection"].value("rationale", std::string());
  assessment.correction_rationale =
      value["error_correction"].value("rationale", std::string());
  assessment.link_rationale = value["links"].value("rationale", std::string());
  return assessment;
}

}  // namespace caafc
