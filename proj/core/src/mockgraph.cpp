#include "engage/mockgraph.hpp"

#include <algorithm>
#include <cctype>

#include "jsonio.hpp"

namespace engage {

using detail::json;

namespace {

struct UrlParts {
  std::string scheme;
  std::string host;  // includes port
  std::string path;
  std::string query;     // without '?'
  std::string fragment;  // without '#'
  bool has_query = false;
  bool has_fragment = false;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

UrlParts split_url(std::string_view url) {
  auto sep = url.find("://");
  if (sep == std::string_view::npos || sep == 0) {
    throw MalformedInput("not an absolute URL: " + std::string(url));
  }
  UrlParts p;
  p.scheme = lower(std::string(url.substr(0, sep)));
  auto rest = url.substr(sep + 3);
  if (auto hash = rest.find('#'); hash != std::string_view::npos) {
    p.fragment = std::string(rest.substr(hash + 1));
    p.has_fragment = true;
    rest = rest.substr(0, hash);
  }
  if (auto q = rest.find('?'); q != std::string_view::npos) {
    p.query = std::string(rest.substr(q + 1));
    p.has_query = true;
    rest = rest.substr(0, q);
  }
  auto slash = rest.find('/');
  p.host = lower(std::string(rest.substr(0, slash)));
  if (slash != std::string_view::npos) p.path = std::string(rest.substr(slash));
  if (p.host.empty()) throw MalformedInput("URL without host: " + std::string(url));
  return p;
}

std::string join_url(const UrlParts& p) {
  std::string out = p.scheme + "://" + p.host + p.path;
  if (p.has_query) out += "?" + p.query;
  if (p.has_fragment) out += "#" + p.fragment;
  return out;
}

std::string strip_params(const std::string& query, const std::set<std::string>& names) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= query.size()) {
    auto amp = query.find('&', pos);
    if (amp == std::string::npos) amp = query.size();
    auto pair = query.substr(pos, amp - pos);
    auto key = pair.substr(0, pair.find('='));
    if (!pair.empty() && !names.count(key)) {
      if (!out.empty()) out.push_back('&');
      out += pair;
    }
    pos = amp + 1;
  }
  return out;
}

ScriptedResponse parse_scripted(const std::string& s) {
  if (s == "serve" || s == "ok") return ScriptedResponse::serve;
  if (s == "throttle") return ScriptedResponse::throttle;
  if (s == "error") return ScriptedResponse::error;
  if (s == "auth_error" || s == "auth") return ScriptedResponse::auth_error;
  throw MalformedInput("unknown scripted response: " + s);
}

}  // namespace

std::string fold_url(std::string_view url, const CanonicalRule& rules) {
  auto p = split_url(url);
  if (rules.scheme_fold && p.scheme == "http") p.scheme = "https";
  if (rules.host_fold && p.host.starts_with("www.")) p.host.erase(0, 4);
  if (rules.strip_trailing_slash) {
    while (!p.path.empty() && p.path.back() == '/') p.path.pop_back();
  }
  if (p.has_query && !rules.strip_query_params.empty()) {
    p.query = strip_params(p.query, rules.strip_query_params);
    p.has_query = !p.query.empty();
  }
  return join_url(p);
}

std::string canonicalize(std::string_view url, const CanonicalRule& rules,
                         const FixtureWorld& world) {
  std::string current = fold_url(url, rules);
  std::set<std::string> seen{current};
  for (int depth = 0;; ++depth) {
    auto it = world.redirects.find(current);
    if (it == world.redirects.end()) return current;
    if (depth + 1 > rules.max_redirect_depth) {
      throw RedirectLoop("redirect chain from " + std::string(url) + " exceeds depth " +
                         std::to_string(rules.max_redirect_depth));
    }
    current = fold_url(it->second, rules);
    if (!seen.insert(current).second) {
      throw RedirectLoop("redirect cycle reached from " + std::string(url));
    }
  }
}

GraphObjectResult lookup(std::string_view url, const FixtureWorld& world, Timestamp fetched_at) {
  std::string queried(url);
  auto canon = canonicalize(url, world.rules, world);
  auto it = world.objects.find(canon);
  if (it == world.objects.end()) return {queried, ObjectNotFound{}};
  return {queried, GraphObject{it->second.object_id, queried, it->second.counts, fetched_at}};
}

FixtureWorld FixtureWorld::from_json(std::string_view text) {
  auto doc = detail::parse_json(text, "fixture world");
  FixtureWorld w;
  try {
    if (doc.contains("rules")) {
      const auto& r = doc["rules"];
      w.rules.scheme_fold = r.value("scheme_fold", true);
      w.rules.host_fold = r.value("host_fold", true);
      w.rules.strip_trailing_slash = r.value("strip_trailing_slash", true);
      w.rules.max_redirect_depth = r.value("max_redirect_depth", 5);
      if (r.contains("strip_query_params")) {
        for (const auto& p : r["strip_query_params"]) w.rules.strip_query_params.insert(p.get<std::string>());
      }
    }
    w.token = doc.value("token", std::string{});
    if (doc.contains("objects")) {
      for (const auto& [url, o] : doc["objects"].items()) {
        std::string ctx = "object " + url;
        WorldObject obj{o.at("id").get<std::string>(),
                        {detail::get_count_or(o, "shares", 0), detail::get_count_or(o, "reactions", 0),
                         detail::get_count_or(o, "comments", 0),
                         detail::get_count_or(o, "plugin_comments", 0)}};
        if (obj.object_id.empty()) throw MalformedInput(ctx + ": empty id");
        auto key = fold_url(url, w.rules);
        auto [it, inserted] = w.objects.emplace(key, obj);
        if (!inserted && it->second.object_id != obj.object_id) {
          throw MalformedInput("two object ids for canonical URL " + key);
        }
      }
    }
    if (doc.contains("redirects")) {
      for (const auto& [from, to] : doc["redirects"].items()) {
        w.redirects[fold_url(from, w.rules)] = to.get<std::string>();
      }
    }
    if (doc.contains("throttle_script")) {
      for (const auto& s : doc["throttle_script"]) w.throttle_script.push_back(parse_scripted(s.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("fixture world: ") + e.what());
  }
  w.validate();
  return w;
}

FixtureWorld FixtureWorld::load(const std::string& path) {
  return from_json(detail::read_file(path));
}

void FixtureWorld::validate() const {
  for (const auto& [from, to] : redirects) canonicalize(from, rules, *this);
}

MockGraph::MockGraph(FixtureWorld world) : world_(std::move(world)) {}

Reply<std::optional<GraphHit>> MockGraph::query(const std::string& url) {
  ScriptedResponse scripted = ScriptedResponse::serve;
  {
    std::lock_guard guard(mutex_);
    call_log_.push_back(url);
    if (script_pos_ < world_.throttle_script.size()) scripted = world_.throttle_script[script_pos_++];
  }
  switch (scripted) {
    case ScriptedResponse::throttle: return Throttled{std::chrono::seconds{0}};
    case ScriptedResponse::error: return TransientFailure{"scripted server error"};
    case ScriptedResponse::auth_error: return AuthRejected{"scripted auth failure"};
    case ScriptedResponse::serve: break;
  }
  GraphObjectResult r;
  try {
    r = lookup(url, world_);
  } catch (const RedirectLoop& e) {
    return TransientFailure{e.what()};
  }
  if (const auto* obj = r.found()) return std::optional<GraphHit>{GraphHit{obj->object_id, obj->counts}};
  return std::optional<GraphHit>{};
}

Reply<std::optional<GraphHit>> MockGraph::query_with_token(const std::string& url,
                                                           const std::string& token) {
  if (!world_.token.empty() && token != world_.token) {
    std::lock_guard guard(mutex_);
    call_log_.push_back(url);
    return AuthRejected{"invalid access token"};
  }
  return query(url);
}

std::vector<std::string> MockGraph::call_log() const {
  std::lock_guard guard(mutex_);
  return call_log_;
}

std::size_t MockGraph::calls() const {
  std::lock_guard guard(mutex_);
  return call_log_.size();
}

}  // namespace engage
