#include "engage/harvest.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace engage {

namespace {

// Runs fn(i) for every i in [0, n) on at most `parallelism` threads. Each
// index is claimed exactly once, so callers write to their own slot.
template <class Fn>
void bounded_for_each(std::size_t n, int parallelism, Fn&& fn) {
  if (parallelism < 1) throw MalformedInput("parallelism must be >= 1");
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(parallelism), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
}

}  // namespace

Clock system_clock_source() {
  return [] { return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()); };
}

Clock fixed_clock(Timestamp t) {
  return [t] { return t; };
}

GraphObjectResult fetch_engagement(const std::string& url, EngagementSource& source,
                                   const RetryPolicy& policy, const Sleeper& sleep,
                                   const Clock& clock) {
  auto hit = call_with_retry<std::optional<GraphHit>>(policy, sleep, "engagement " + url,
                                                      [&] { return source.query(url); });
  if (!hit) return {url, ObjectNotFound{}};
  if (hit->object_id.empty()) throw MalformedInput("engagement source returned an empty object id");
  return {url, GraphObject{std::move(hit->object_id), url, hit->counts, clock()}};
}

std::optional<AltmetricRecord> fetch_altmetric(const Doi& doi, MentionSource& source,
                                               const RetryPolicy& policy, const Sleeper& sleep,
                                               const Clock& clock) {
  auto counts = call_with_retry<std::optional<MentionCounts>>(
      policy, sleep, "mentions " + doi.str(), [&] { return source.query(doi); });
  if (!counts) return std::nullopt;
  return AltmetricRecord{doi, counts->pos_mentions, counts->tweets, clock()};
}

std::vector<GraphObjectResult> harvest_batch(const std::vector<std::string>& urls,
                                             EngagementSource& source,
                                             const RetryPolicy& policy, int parallelism,
                                             const Sleeper& sleep, const Clock& clock) {
  std::vector<GraphObjectResult> results(urls.size());
  bounded_for_each(urls.size(), parallelism, [&](std::size_t i) {
    try {
      results[i] = fetch_engagement(urls[i], source, policy, sleep, clock);
    } catch (const std::exception& e) {
      results[i] = GraphObjectResult{urls[i], LookupFailed{e.what()}};
    }
  });
  return results;
}

std::vector<AltmetricOutcome> harvest_altmetric_batch(const std::vector<Doi>& dois,
                                                      MentionSource& source,
                                                      const RetryPolicy& policy, int parallelism,
                                                      const Sleeper& sleep, const Clock& clock) {
  std::vector<std::optional<AltmetricOutcome>> slots(dois.size());
  bounded_for_each(dois.size(), parallelism, [&](std::size_t i) {
    try {
      if (auto rec = fetch_altmetric(dois[i], source, policy, sleep, clock)) {
        slots[i] = AltmetricOutcome{dois[i], std::move(*rec)};
      } else {
        slots[i] = AltmetricOutcome{dois[i], ObjectNotFound{}};
      }
    } catch (const std::exception& e) {
      slots[i] = AltmetricOutcome{dois[i], LookupFailed{e.what()}};
    }
  });
  std::vector<AltmetricOutcome> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace engage
