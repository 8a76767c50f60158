#include "engage/resolve.hpp"

#include <algorithm>
#include <tuple>

namespace engage {

std::vector<GraphObjectResult> filter_zero_objects(std::vector<GraphObjectResult> results) {
  for (auto& r : results) {
    if (auto* obj = r.found(); obj && obj->counts.total() == 0) r.outcome = ObjectNotFound{};
  }
  return results;
}

AmbiguityOutcome detect_ambiguity(std::vector<ArticleResult> mapping) {
  std::map<std::string, std::set<Doi>> reached;
  for (const auto& row : mapping) {
    if (const auto* obj = row.result.found()) reached[obj->object_id].insert(row.doi);
  }

  AmbiguityOutcome out;
  for (auto& [object_id, dois] : reached) {
    if (dois.size() < 2) continue;
    out.removed.insert(dois.begin(), dois.end());
    out.flags.push_back({object_id, dois});
  }
  for (auto& row : mapping) {
    if (!out.removed.count(row.doi)) out.clean.push_back(std::move(row));
  }
  return out;
}

EngagementRecord aggregate_article(const Doi& doi, std::span<const GraphObjectResult> results,
                                   const std::optional<AltmetricRecord>& altmetric,
                                   const Date& snapshot_date) {
  auto reading = [](const EngagementCounts& c) {
    return std::make_tuple(c.total(), c.shares, c.reactions, c.comments, c.plugin_comments);
  };
  std::map<std::string, EngagementCounts> distinct;
  for (const auto& r : results) {
    const auto* obj = r.found();
    if (!obj || obj->counts.total() == 0) continue;
    auto [it, inserted] = distinct.emplace(obj->object_id, obj->counts);
    if (!inserted && reading(it->second) < reading(obj->counts)) it->second = obj->counts;
  }

  EngagementRecord rec{doi, snapshot_date, std::nullopt, {}, std::nullopt, std::nullopt, {}};
  for (const auto& [id, c] : distinct) {
    rec.aes.shares += c.shares;
    rec.aes.reactions += c.reactions;
    rec.aes.comments += c.comments;
    rec.aes.plugin_comments += c.plugin_comments;
    rec.object_ids.insert(id);
  }
  if (altmetric) {
    rec.pos_mentions = altmetric->pos_mentions;
    rec.tweets = altmetric->tweets;
  }
  return rec;
}

CoverageFlags coverage_flags(const EngagementRecord& record, CoverageRule rule) {
  CoverageFlags f;
  f.aes = rule == CoverageRule::shares_only ? record.aes.shares >= 1 : record.aes.total() >= 1;
  f.pos = record.pos_mentions.value_or(0) >= 1;
  f.tw = record.tweets.value_or(0) >= 1;
  return f;
}

ResolvedSnapshot resolve_snapshot(const std::vector<IdBundle>& bundles,
                                  const std::vector<ArticleResult>& graph_results,
                                  const std::map<Doi, AltmetricRecord>& altmetric,
                                  const Date& snapshot_date) {
  std::vector<ArticleResult> filtered;
  filtered.reserve(graph_results.size());
  for (const auto& row : graph_results) {
    auto one = filter_zero_objects({row.result});
    filtered.push_back({row.doi, std::move(one.front())});
  }
  auto ambiguity = detect_ambiguity(std::move(filtered));

  std::map<Doi, std::vector<GraphObjectResult>> per_article;
  for (auto& row : ambiguity.clean) per_article[row.doi].push_back(std::move(row.result));

  ResolvedSnapshot out;
  out.flags = std::move(ambiguity.flags);
  std::vector<const IdBundle*> ordered;
  for (const auto& b : bundles) ordered.push_back(&b);
  std::sort(ordered.begin(), ordered.end(),
            [](const IdBundle* a, const IdBundle* b) { return a->doi < b->doi; });
  ordered.erase(std::unique(ordered.begin(), ordered.end(),
                            [](const IdBundle* a, const IdBundle* b) { return a->doi == b->doi; }),
                ordered.end());

  static const std::vector<GraphObjectResult> kNone;
  for (const auto* b : ordered) {
    if (ambiguity.removed.count(b->doi)) continue;
    auto it = per_article.find(b->doi);
    const auto& results = it == per_article.end() ? kNone : it->second;
    auto am = altmetric.find(b->doi);
    auto rec = aggregate_article(
        b->doi, results,
        am == altmetric.end() ? std::nullopt : std::optional<AltmetricRecord>{am->second},
        snapshot_date);
    rec.publication_date = b->publication_date;
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace engage
