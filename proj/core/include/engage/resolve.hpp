#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "engage/harvest.hpp"

namespace engage {

/// Per-article engagement for one snapshot. AES counters are sums over the
/// distinct graph objects in `object_ids`.
struct EngagementRecord {
  Doi doi;
  Date snapshot_date;
  std::optional<Date> publication_date;
  EngagementCounts aes;
  std::optional<std::uint64_t> pos_mentions;
  std::optional<std::uint64_t> tweets;
  std::set<std::string> object_ids;

  friend bool operator==(const EngagementRecord&, const EngagementRecord&) = default;
};

struct AmbiguityFlag {
  std::string object_id;
  std::set<Doi> dois;

  friend bool operator==(const AmbiguityFlag&, const AmbiguityFlag&) = default;
};

struct ArticleResult {
  Doi doi;
  GraphObjectResult result;
};

struct AmbiguityOutcome {
  std::vector<ArticleResult> clean;
  std::vector<AmbiguityFlag> flags;  // ordered by object_id
  std::set<Doi> removed;
};

/// Rewrites Found objects whose four counters are all zero to NotFound.
std::vector<GraphObjectResult> filter_zero_objects(std::vector<GraphObjectResult> results);

/// Flags every object reached from two or more DOIs and drops all rows of
/// every article touching a flagged object.
AmbiguityOutcome detect_ambiguity(std::vector<ArticleResult> mapping);

/// Sums counters over distinct object ids. An object seen with different
/// readings contributes the largest one, so the result does not depend on
/// the order of `results`. Zero-counter objects are skipped.
EngagementRecord aggregate_article(const Doi& doi, std::span<const GraphObjectResult> results,
                                   const std::optional<AltmetricRecord>& altmetric,
                                   const Date& snapshot_date);

enum class CoverageRule { shares_only, any_counter };

struct CoverageFlags {
  bool aes = false;
  bool pos = false;
  bool tw = false;

  friend bool operator==(const CoverageFlags&, const CoverageFlags&) = default;
};

CoverageFlags coverage_flags(const EngagementRecord& record,
                             CoverageRule rule = CoverageRule::shares_only);

struct ResolvedSnapshot {
  std::vector<EngagementRecord> records;  // ordered by doi
  std::vector<AmbiguityFlag> flags;
};

/// Full resolution pass over one snapshot: zero filter, ambiguity removal
/// and per-article aggregation. Every bundle not removed yields a record.
ResolvedSnapshot resolve_snapshot(const std::vector<IdBundle>& bundles,
                                  const std::vector<ArticleResult>& graph_results,
                                  const std::map<Doi, AltmetricRecord>& altmetric,
                                  const Date& snapshot_date);

}  // namespace engage
