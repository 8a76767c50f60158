#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "engage/error.hpp"
#include "engage/harvest.hpp"

using namespace engage;
using namespace std::chrono_literals;

namespace {

RetryPolicy policy(int attempts = 5) {
  RetryPolicy p;
  p.max_attempts = attempts;
  p.base_delay = 10ms;
  return p;
}

struct Scripted : EngagementSource {
  std::vector<Reply<std::optional<GraphHit>>> replies;
  std::size_t calls = 0;
  Reply<std::optional<GraphHit>> query(const std::string&) override {
    return replies.at(std::min(calls++, replies.size() - 1));
  }
};

const Timestamp kT = start_of_day(parse_date("2017-10-09"));

}  // namespace

TEST(RetryPolicy, ExponentialDelaysAndValidation) {
  auto p = policy();
  EXPECT_EQ(p.delay_before_retry(1), 10ms);
  EXPECT_EQ(p.delay_before_retry(3), 40ms);
  RetryPolicy bad;
  bad.max_attempts = 0;
  EXPECT_THROW(bad.validate(), MalformedInput);
}

TEST(FetchEngagement, FoundAfterThrottleBacksOff) {
  Scripted s;
  s.replies = {Throttled{}, Throttled{}, std::optional<GraphHit>{GraphHit{"o1", {12, 3, 1, 0}}}};
  std::vector<std::chrono::milliseconds> slept;
  auto r = fetch_engagement("u", s, policy(), [&](auto d) { slept.push_back(d); }, fixed_clock(kT));
  ASSERT_TRUE(r.found());
  EXPECT_EQ(r.found()->object_id, "o1");
  EXPECT_EQ(r.found()->counts.shares, 12u);
  EXPECT_EQ(r.found()->fetched_at, kT);
  EXPECT_EQ(slept, (std::vector<std::chrono::milliseconds>{10ms, 20ms}));
}

TEST(FetchEngagement, NotFoundAndBudget) {
  Scripted s;
  s.replies = {std::optional<GraphHit>{}};
  EXPECT_TRUE(fetch_engagement("u", s, policy(), {}, fixed_clock(kT)).not_found());

  Scripted t;
  t.replies = {Throttled{}};
  std::vector<std::chrono::milliseconds> slept;
  EXPECT_THROW(fetch_engagement("u", t, policy(), [&](auto d) { slept.push_back(d); }), SourceUnavailable);
  EXPECT_EQ(t.calls, 5u);
  EXPECT_EQ(slept.size(), 4u);

  Scripted a;
  a.replies = {AuthRejected{"expired"}};
  EXPECT_THROW(fetch_engagement("u", a, policy()), AuthFailure);
  EXPECT_EQ(a.calls, 1u);
}

namespace {

struct Echo : EngagementSource {
  std::atomic<int> in_flight{0}, peak{0};
  Reply<std::optional<GraphHit>> query(const std::string& url) override {
    int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(2ms);
    --in_flight;
    if (url.ends_with("fail")) return TransientFailure{"boom"};
    if (url.ends_with("none")) return std::optional<GraphHit>{};
    return std::optional<GraphHit>{GraphHit{"id:" + url, {1, 0, 0, 0}}};
  }
};

}  // namespace

TEST(HarvestBatch, OrderPreservedBoundedAndFailuresIsolated) {
  std::vector<std::string> urls;
  for (int i = 0; i < 40; ++i) urls.push_back("u" + std::to_string(i) + (i % 7 == 0 ? "fail" : i % 5 == 0 ? "none" : ""));
  Echo src;
  auto out = harvest_batch(urls, src, policy(2), 3, [](auto) {}, fixed_clock(kT));
  ASSERT_EQ(out.size(), urls.size());
  EXPECT_LE(src.peak.load(), 3);
  for (std::size_t i = 0; i < urls.size(); ++i) {
    EXPECT_EQ(out[i].queried_url, urls[i]);
    if (urls[i].ends_with("fail")) EXPECT_TRUE(out[i].failed());
    else if (urls[i].ends_with("none")) EXPECT_TRUE(out[i].not_found());
    else EXPECT_EQ(out[i].found()->object_id, "id:" + urls[i]);
  }
}

namespace {

struct Mentions : MentionSource {
  Reply<std::optional<MentionCounts>> query(const Doi& doi) override {
    if (doi.str().ends_with("9")) return std::optional<MentionCounts>{};
    if (doi.str().ends_with("8")) return AuthRejected{"no"};
    return std::optional<MentionCounts>{MentionCounts{2, 5}};
  }
};

}  // namespace

TEST(Altmetric, SingleAndBatch) {
  Mentions m;
  auto rec = fetch_altmetric(Doi::parse("10.1/1"), m, policy(), {}, fixed_clock(kT));
  ASSERT_TRUE(rec);
  EXPECT_EQ(rec->pos_mentions, 2u);
  EXPECT_EQ(rec->tweets, 5u);
  EXPECT_FALSE(fetch_altmetric(Doi::parse("10.1/9"), m, policy()));

  auto out = harvest_altmetric_batch({Doi::parse("10.1/1"), Doi::parse("10.1/8"), Doi::parse("10.1/9")}, m,
                                     policy(), 2, {}, fixed_clock(kT));
  ASSERT_EQ(out.size(), 3u);
  EXPECT_TRUE(std::holds_alternative<AltmetricRecord>(out[0].outcome));
  EXPECT_TRUE(std::holds_alternative<LookupFailed>(out[1].outcome));
  EXPECT_TRUE(std::holds_alternative<ObjectNotFound>(out[2].outcome));
}

TEST(FetchEngagement, TwoThrottlesWithinThreeAttempts) {
  Scripted s;
  s.replies = {Throttled{}, Throttled{}, std::optional<GraphHit>{GraphHit{"o1", {3, 5, 1, 0}}}};
  std::vector<std::chrono::milliseconds> slept;
  auto r = fetch_engagement("u", s, policy(3), [&](auto d) { slept.push_back(d); }, fixed_clock(kT));
  ASSERT_TRUE(r.found());
  EXPECT_EQ(r.found()->counts, (EngagementCounts{3, 5, 1, 0}));
  EXPECT_EQ(s.calls, 3u);
  EXPECT_EQ(slept, (std::vector<std::chrono::milliseconds>{10ms, 20ms}));
}

namespace {

struct Recorder : EngagementSource {
  std::vector<std::string> seen;
  Reply<std::optional<GraphHit>> query(const std::string& url) override {
    seen.push_back(url);
    return std::optional<GraphHit>{};
  }
};

}  // namespace

TEST(HarvestBatch, ParallelismOneIsSequential) {
  Recorder r;
  std::vector<std::string> urls{"a", "b", "c"};
  auto out = harvest_batch(urls, r, policy(), 1, {}, fixed_clock(kT));
  EXPECT_EQ(r.seen, urls);
  EXPECT_EQ(out.size(), 3u);
}
