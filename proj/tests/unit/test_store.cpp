#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "engage/error.hpp"
#include "engage/store.hpp"

using namespace engage;
namespace fs = std::filesystem;

namespace {

class StoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("engage-store-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

const Date kSnap = parse_date("2017-10-09");

EngagementRecord rec(int i) {
  EngagementRecord r{Doi::parse("10.1371/journal.pone." + std::to_string(150000 + i)), kSnap,
                     parse_date("2016-05-0" + std::to_string(1 + i % 9)), {std::uint64_t(i), 1, 2, 3},
                     std::nullopt, std::nullopt, {"o" + std::to_string(i)}};
  if (i % 2) r.pos_mentions = i;
  if (i % 3) r.tweets = 2 * i;
  return r;
}

void append_raw(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::app | std::ios::binary);
  out << text;
}

}  // namespace

TEST(Codec, RecordRoundTrip) {
  for (int i = 0; i < 6; ++i) EXPECT_EQ(record_from_json_line(record_to_json_line(rec(i))), rec(i));
  EXPECT_THROW(record_from_json_line("{\"doi\":\"10.1/a\"}"), Error);
}

TEST(Codec, RawLinesRoundTrip) {
  Timestamp t = start_of_day(kSnap);
  RawGraphEntry e{Doi::parse("10.1/a"), UrlKind::pdf, {"u", GraphObject{"o", "u", {1, 2, 3, 4}, t}}};
  auto back = raw_graph_from_json_line(raw_graph_to_json_line(kSnap, e));
  EXPECT_EQ(back.result, e.result);
  EXPECT_EQ(back.kind, UrlKind::pdf);
  RawGraphEntry f{Doi::parse("10.1/a"), UrlKind::doi, {"v", LookupFailed{"throttled"}}};
  EXPECT_EQ(raw_graph_from_json_line(raw_graph_to_json_line(kSnap, f)).result, f.result);

  AltmetricOutcome a{Doi::parse("10.1/a"), AltmetricRecord{Doi::parse("10.1/a"), 3, 4, t}};
  auto ab = raw_altmetric_from_json_line(raw_altmetric_to_json_line(kSnap, a));
  EXPECT_EQ(std::get<AltmetricRecord>(ab.outcome), std::get<AltmetricRecord>(a.outcome));
}

TEST_F(StoreTest, AppendLoadAndDuplicateKey) {
  Store s(dir_);
  EXPECT_FALSE(s.has_snapshot(kSnap));
  EXPECT_THROW(s.load(kSnap), NotFound);
  std::vector<EngagementRecord> rs;
  for (int i = 0; i < 5; ++i) rs.push_back(rec(i));
  s.append(rs);
  EXPECT_THROW(s.append(rec(2)), DuplicateKey);
  Store again(dir_);
  EXPECT_THROW(again.append(rec(3)), DuplicateKey);
  auto snap = again.load(kSnap);
  ASSERT_EQ(snap.records.size(), 5u);
  EXPECT_EQ(snap.records.at(rec(4).doi), rec(4));
}

TEST_F(StoreTest, TornTailStrictVsCleanPrefixAndRepair) {
  Store s(dir_);
  s.append(rec(1));
  s.append(rec(2));
  append_raw(s.snapshot_dir(kSnap) / "records.jsonl", "{\"doi\":\"10.1371/jour");
  try {
    s.load(kSnap);
    FAIL() << "expected CorruptRecord";
  } catch (const CorruptRecord& e) {
    EXPECT_EQ(e.line_no(), 3u);
  }
  auto prefix = s.load(kSnap, LoadMode::clean_prefix);
  EXPECT_EQ(prefix.records.size(), 2u);
  EXPECT_EQ(prefix.corrupt_line, 3u);
  EXPECT_THROW(s.append(rec(3)), CorruptRecord);
  EXPECT_EQ(s.repair_torn_tails(kSnap), 1);
  s.append(rec(3));
  EXPECT_EQ(s.load(kSnap).records.size(), 3u);
}

TEST_F(StoreTest, GraphLatestAndPending) {
  Store s(dir_);
  Timestamp t = start_of_day(kSnap);
  auto d = Doi::parse("10.1/a");
  std::vector<RawGraphEntry> first{{d, UrlKind::doi, {"u1", LookupFailed{"x"}}},
                                   {d, UrlKind::doi_old, {"u2", ObjectNotFound{}}},
                                   {d, UrlKind::landing, {"u3", LookupFailed{"y"}}}};
  s.append_graph(kSnap, first);
  EXPECT_EQ(s.pending_urls(kSnap), (std::vector<std::string>{"u1", "u3"}));
  std::vector<RawGraphEntry> second{{d, UrlKind::doi, {"u1", GraphObject{"o", "u1", {1, 0, 0, 0}, t}}}};
  s.append_graph(kSnap, second);
  auto latest = s.latest_graph(kSnap);
  ASSERT_EQ(latest.size(), 3u);
  EXPECT_EQ(latest[0].result.queried_url, "u1");
  EXPECT_TRUE(latest[0].result.found());
  EXPECT_EQ(s.pending_urls(kSnap), (std::vector<std::string>{"u3"}));
  EXPECT_EQ(s.load_graph(kSnap).size(), 4u);
}

TEST_F(StoreTest, AltmetricAmbiguityManifest) {
  Store s(dir_);
  auto d1 = Doi::parse("10.1/a"), d2 = Doi::parse("10.1/b");
  std::vector<AltmetricOutcome> alt{{d1, LookupFailed{"x"}}, {d2, ObjectNotFound{}}};
  s.append_altmetric(kSnap, alt);
  EXPECT_EQ(s.pending_dois(kSnap), (std::vector<Doi>{d1}));
  EXPECT_EQ(s.latest_altmetric(kSnap).size(), 2u);

  std::vector<AmbiguityFlag> flags{{"S", {d1, d2}}};
  s.write_ambiguity(kSnap, flags);
  EXPECT_EQ(s.load_ambiguity(kSnap), flags);

  Manifest m{kSnap, {{"graph", "mock:world.json"}}, "abc"};
  s.write_manifest(m);
  auto back = s.read_manifest(kSnap);
  ASSERT_TRUE(back);
  EXPECT_EQ(back->source_versions, m.source_versions);
  EXPECT_EQ(back->config_hash, "abc");
  EXPECT_FALSE(s.read_manifest(parse_date("2000-01-01")));
}

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST_F(StoreTest, BulkRoundTrip) {
  Store s(dir_);
  std::vector<EngagementRecord> rs;
  for (int i = 0; i < 10000; ++i) rs.push_back(rec(i));
  std::mt19937 rng(4);
  std::shuffle(rs.begin(), rs.end(), rng);
  for (std::size_t i = 0; i < rs.size(); i += 1000) {
    s.append(std::span<const EngagementRecord>(rs.data() + i, 1000));
  }
  auto snap = Store(dir_).load(kSnap);
  ASSERT_EQ(snap.records.size(), 10000u);
  for (const auto& r : rs) EXPECT_EQ(snap.records.at(r.doi), r);
}
