#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "engage/date.hpp"
#include "engage/ident.hpp"
#include "engage/retry.hpp"

namespace engage {

/// The four counters a graph object carries.
struct EngagementCounts {
  std::uint64_t shares = 0;
  std::uint64_t reactions = 0;
  std::uint64_t comments = 0;
  std::uint64_t plugin_comments = 0;

  std::uint64_t total() const { return shares + reactions + comments + plugin_comments; }
  friend bool operator==(const EngagementCounts&, const EngagementCounts&) = default;
};

struct GraphObject {
  std::string object_id;
  std::string queried_url;
  EngagementCounts counts;
  Timestamp fetched_at;

  friend bool operator==(const GraphObject&, const GraphObject&) = default;
};

struct ObjectNotFound {
  friend bool operator==(const ObjectNotFound&, const ObjectNotFound&) = default;
};

/// Only produced by batch harvesting; single lookups throw instead.
struct LookupFailed {
  std::string reason;
  friend bool operator==(const LookupFailed&, const LookupFailed&) = default;
};

struct GraphObjectResult {
  std::string queried_url;
  std::variant<GraphObject, ObjectNotFound, LookupFailed> outcome;

  const GraphObject* found() const { return std::get_if<GraphObject>(&outcome); }
  bool not_found() const { return std::holds_alternative<ObjectNotFound>(outcome); }
  const LookupFailed* failed() const { return std::get_if<LookupFailed>(&outcome); }

  friend bool operator==(const GraphObjectResult&, const GraphObjectResult&) = default;
};

struct AltmetricRecord {
  Doi doi;
  std::uint64_t pos_mentions = 0;
  std::uint64_t tweets = 0;
  Timestamp fetched_at;

  friend bool operator==(const AltmetricRecord&, const AltmetricRecord&) = default;
};

using Clock = std::function<Timestamp()>;
Clock system_clock_source();
Clock fixed_clock(Timestamp t);

// ---------------------------------------------------------------------------
// Sources

struct GraphHit {
  std::string object_id;
  EngagementCounts counts;
};

/// URL-engagement source (the AES path). nullopt = no object for the URL.
class EngagementSource {
 public:
  virtual ~EngagementSource() = default;
  virtual Reply<std::optional<GraphHit>> query(const std::string& url) = 0;
};

struct MentionCounts {
  std::uint64_t pos_mentions = 0;
  std::uint64_t tweets = 0;
};

/// Per-DOI mention source (the POS and TW path). nullopt = untracked DOI.
class MentionSource {
 public:
  virtual ~MentionSource() = default;
  virtual Reply<std::optional<MentionCounts>> query(const Doi& doi) = 0;
};

/// JSON lines {"url", "object_id", "shares", "reactions", "comments",
/// "plugin_comments"}; exact URL match, no canonicalization.
std::unique_ptr<EngagementSource> open_fixture_engagement_source(const std::string& path);

/// Graph-style HTTP endpoint: GET <base>/?id=<url>&fields=engagement.
/// Works against the mock server as well as a real Graph API base URL.
std::unique_ptr<EngagementSource> make_graph_api_source(std::string base_url, std::string token,
                                                        std::set<int> throttle_codes = {429});

/// JSON lines {"doi", "pos", "tw"}.
std::unique_ptr<MentionSource> open_fixture_mention_source(const std::string& path);

/// Altmetric-style HTTP endpoint: GET <base>/v1/doi/<doi>[?key=].
std::unique_ptr<MentionSource> make_altmetric_api_source(std::string base_url, std::string key);

// ---------------------------------------------------------------------------
// Operations

/// Found or NotFound; throws SourceUnavailable or AuthFailure.
GraphObjectResult fetch_engagement(const std::string& url, EngagementSource& source,
                                   const RetryPolicy& policy,
                                   const Sleeper& sleep = thread_sleeper(),
                                   const Clock& clock = system_clock_source());

std::optional<AltmetricRecord> fetch_altmetric(const Doi& doi, MentionSource& source,
                                               const RetryPolicy& policy,
                                               const Sleeper& sleep = thread_sleeper(),
                                               const Clock& clock = system_clock_source());

/// One result per URL in input order. At most `parallelism` lookups are in
/// flight; per-URL errors become LookupFailed instead of aborting the batch.
std::vector<GraphObjectResult> harvest_batch(const std::vector<std::string>& urls,
                                             EngagementSource& source,
                                             const RetryPolicy& policy, int parallelism,
                                             const Sleeper& sleep = thread_sleeper(),
                                             const Clock& clock = system_clock_source());

struct AltmetricOutcome {
  Doi doi;
  std::variant<AltmetricRecord, ObjectNotFound, LookupFailed> outcome;
};

std::vector<AltmetricOutcome> harvest_altmetric_batch(const std::vector<Doi>& dois,
                                                      MentionSource& source,
                                                      const RetryPolicy& policy, int parallelism,
                                                      const Sleeper& sleep = thread_sleeper(),
                                                      const Clock& clock = system_clock_source());

}  // namespace engage
