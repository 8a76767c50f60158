#include <map>

#include "engage/harvest.hpp"
#include "http.hpp"
#include "jsonio.hpp"

namespace engage {

using detail::json;

namespace {

class FixtureEngagementSource final : public EngagementSource {
 public:
  explicit FixtureEngagementSource(const std::string& path) {
    auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      auto context = path + ":" + std::to_string(i + 1);
      auto obj = detail::parse_json(lines[i], context);
      GraphHit hit;
      hit.object_id = obj.value("object_id", std::string{});
      if (hit.object_id.empty()) throw MalformedInput(context + ": missing object_id");
      hit.counts = {detail::get_count(obj, "shares", context),
                    detail::get_count(obj, "reactions", context),
                    detail::get_count(obj, "comments", context),
                    detail::get_count(obj, "plugin_comments", context)};
      hits_[obj.at("url").get<std::string>()] = std::move(hit);
    }
  }

  Reply<std::optional<GraphHit>> query(const std::string& url) override {
    auto it = hits_.find(url);
    if (it == hits_.end()) return std::optional<GraphHit>{};
    return std::optional<GraphHit>{it->second};
  }

 private:
  std::map<std::string, GraphHit> hits_;
};

// Graph API error codes that signal rate limiting in the body.
bool is_rate_limit_code(int code) { return code == 4 || code == 17 || code == 32 || code == 613; }

class GraphApiSource final : public EngagementSource {
 public:
  GraphApiSource(std::string base_url, std::string token, std::set<int> throttle_codes)
      : base_url_(std::move(base_url)),
        token_(std::move(token)),
        throttle_codes_(std::move(throttle_codes)) {}

  Reply<std::optional<GraphHit>> query(const std::string& url) override {
    using R = std::optional<GraphHit>;
    std::string path = "/?id=" + detail::url_encode(url) + "&fields=engagement";
    if (!token_.empty()) path += "&access_token=" + detail::url_encode(token_);
    auto outcome = detail::http_get(base_url_, path);

    json body;
    if (outcome.response) {
      try {
        body = json::parse(outcome.response->body);
      } catch (const json::exception&) {
        body = json::object();
      }
      if (body.is_object() && body.contains("error") && body["error"].is_object()) {
        int code = body["error"].value("code", 0);
        if (is_rate_limit_code(code)) return Throttled{outcome.response->retry_after};
        if (code == 190 || code == 102) return AuthRejected{"graph error code " + std::to_string(code)};
      }
    }
    if (auto failure = detail::classify_failure<R>(outcome, throttle_codes_)) return *failure;
    if (outcome.response->status == 404 || !body.is_object()) return R{};

    std::string object_id;
    if (body.contains("og_object") && body["og_object"].is_object()) {
      object_id = body["og_object"].value("id", std::string{});
    } else {
      object_id = body.value("id", std::string{});
    }
    if (object_id.empty() || !body.contains("engagement")) return R{};
    const auto& e = body["engagement"];
    try {
      return R{GraphHit{object_id,
                        {detail::get_count_or(e, "share_count", 0),
                         detail::get_count_or(e, "reaction_count", 0),
                         detail::get_count_or(e, "comment_count", 0),
                         detail::get_count_or(e, "comment_plugin_count", 0)}}};
    } catch (const Error& err) {
      return TransientFailure{err.what()};
    }
  }

 private:
  std::string base_url_;
  std::string token_;
  std::set<int> throttle_codes_;
};

class FixtureMentionSource final : public MentionSource {
 public:
  explicit FixtureMentionSource(const std::string& path) {
    auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      auto context = path + ":" + std::to_string(i + 1);
      auto obj = detail::parse_json(lines[i], context);
      auto doi = Doi::parse(obj.at("doi").get<std::string>());
      counts_[doi.str()] = {detail::get_count(obj, "pos", context),
                            detail::get_count(obj, "tw", context)};
    }
  }

  Reply<std::optional<MentionCounts>> query(const Doi& doi) override {
    auto it = counts_.find(doi.str());
    if (it == counts_.end()) return std::optional<MentionCounts>{};
    return std::optional<MentionCounts>{it->second};
  }

 private:
  std::map<std::string, MentionCounts> counts_;
};

class AltmetricApiSource final : public MentionSource {
 public:
  AltmetricApiSource(std::string base_url, std::string key)
      : base_url_(std::move(base_url)), key_(std::move(key)) {}

  Reply<std::optional<MentionCounts>> query(const Doi& doi) override {
    using R = std::optional<MentionCounts>;
    std::string path = "/v1/doi/" + doi.str();
    if (!key_.empty()) path += "?key=" + detail::url_encode(key_);
    auto outcome = detail::http_get(base_url_, path);
    if (auto failure = detail::classify_failure<R>(outcome, {420, 429})) return *failure;
    if (outcome.response->status == 404) return R{};
    try {
      auto body = json::parse(outcome.response->body);
      return R{MentionCounts{detail::get_count_or(body, "cited_by_fbwalls_count", 0),
                             detail::get_count_or(body, "cited_by_tweeters_count", 0)}};
    } catch (const std::exception& e) {
      return TransientFailure{std::string("unparseable mention response: ") + e.what()};
    }
  }

 private:
  std::string base_url_;
  std::string key_;
};

}  // namespace

std::unique_ptr<EngagementSource> open_fixture_engagement_source(const std::string& path) {
  return std::make_unique<FixtureEngagementSource>(path);
}

std::unique_ptr<EngagementSource> make_graph_api_source(std::string base_url, std::string token,
                                                        std::set<int> throttle_codes) {
  return std::make_unique<GraphApiSource>(std::move(base_url), std::move(token),
                                          std::move(throttle_codes));
}

std::unique_ptr<MentionSource> open_fixture_mention_source(const std::string& path) {
  return std::make_unique<FixtureMentionSource>(path);
}

std::unique_ptr<MentionSource> make_altmetric_api_source(std::string base_url, std::string key) {
  return std::make_unique<AltmetricApiSource>(std::move(base_url), std::move(key));
}

}  // namespace engage
