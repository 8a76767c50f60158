#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "engage/harvest.hpp"

namespace engage {

/// URL folds applied in this order, then redirects to a fixpoint.
struct CanonicalRule {
  bool scheme_fold = true;           // http -> https
  bool host_fold = true;             // strip leading "www."
  bool strip_trailing_slash = true;
  std::set<std::string> strip_query_params;
  int max_redirect_depth = 5;
};

struct WorldObject {
  std::string object_id;
  EngagementCounts counts;
};

enum class ScriptedResponse { serve, throttle, error, auth_error };

/// Everything the mock knows: objects by canonical URL, declared redirects
/// and an optional script of protocol responses consumed one per request.
struct FixtureWorld {
  CanonicalRule rules;
  std::map<std::string, WorldObject> objects;
  std::map<std::string, std::string> redirects;
  std::vector<ScriptedResponse> throttle_script;
  std::string token;  // empty = no token check

  /// Parses the fixture JSON ("objects", "redirects", "throttle_script",
  /// optional "rules" and "token"). Object and redirect keys are folded.
  static FixtureWorld from_json(std::string_view text);
  static FixtureWorld load(const std::string& path);

  /// Throws MalformedInput on conflicting object ids and RedirectLoop on
  /// cyclic or over-deep redirect chains.
  void validate() const;
};

/// Applies the folds of `rules` only. Throws MalformedInput for a URL
/// without a scheme.
std::string fold_url(std::string_view url, const CanonicalRule& rules);

/// Folds, then follows redirects to a fixpoint. Throws RedirectLoop.
std::string canonicalize(std::string_view url, const CanonicalRule& rules,
                         const FixtureWorld& world);

/// Canonicalize, then exact lookup. Zero-counter objects are returned as
/// Found; filtering them is the resolver's job.
GraphObjectResult lookup(std::string_view url, const FixtureWorld& world,
                         Timestamp fetched_at = Timestamp{});

/// Stateful in-process engagement source over a FixtureWorld. The throttle
/// script advances under one lock; everything else is read-only.
class MockGraph final : public EngagementSource {
 public:
  explicit MockGraph(FixtureWorld world);

  Reply<std::optional<GraphHit>> query(const std::string& url) override;

  /// Same as query() after checking `token` against the world's token.
  Reply<std::optional<GraphHit>> query_with_token(const std::string& url, const std::string& token);

  const FixtureWorld& world() const { return world_; }
  std::vector<std::string> call_log() const;
  std::size_t calls() const;

 private:
  FixtureWorld world_;
  mutable std::mutex mutex_;
  std::size_t script_pos_ = 0;
  std::vector<std::string> call_log_;
};

/// Standalone HTTP front end for a MockGraph:
///   GET /?id=<url-encoded-url> -> {"id": ..., "engagement": {...}} or {}
///   429 with Retry-After on a scripted throttle.
class MockGraphServer {
 public:
  explicit MockGraphServer(std::shared_ptr<MockGraph> graph);
  ~MockGraphServer();

  MockGraphServer(const MockGraphServer&) = delete;
  MockGraphServer& operator=(const MockGraphServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread.
  void serve_forever(const std::string& host, int port);
  void stop();

  int port() const { return port_; }
  std::string base_url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<MockGraph> graph_;
  std::thread thread_;
  int port_ = 0;
  std::string host_;
};

}  // namespace engage
