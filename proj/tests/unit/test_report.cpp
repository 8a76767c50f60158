#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "engage/error.hpp"
#include "engage/report.hpp"
#include "snapshots.hpp"

using namespace engage;
using testsupport::record;
using testsupport::snapshot;
namespace fs = std::filesystem;

TEST(FormatPercent, HalfUpOneDecimal) {
  EXPECT_EQ(format_percent(0, 0), "0.0");
  EXPECT_EQ(format_percent(1, 8), "12.5");
  EXPECT_EQ(format_percent(1, 16), "6.3");   // 6.25 rounds up
  EXPECT_EQ(format_percent(1, 3), "33.3");
  EXPECT_EQ(format_percent(2, 3), "66.7");
  EXPECT_EQ(format_percent(5, 5), "100.0");
  EXPECT_EQ(format_percent(21415, 61848), "34.6");
  EXPECT_EQ(format_percent(9623, 61848), "15.6");
  EXPECT_EQ(format_percent(43064, 61848), "69.6");
  EXPECT_EQ(format_percent(13699, 23322), "58.7");
  EXPECT_EQ(format_percent(5223, 7716), "67.7");
  EXPECT_EQ(format_percent(2027, 7716), "26.3");
}

TEST(Coverage, FourArticleRow) {
  auto s = snapshot({record(1, 3, 1, 0, 2015), record(2, 0, 2, 5, 2016), record(3, 0, -1, -1, 2016),
                     record(4, 1, 0, 7, 2016)});
  auto rows = coverage_table(s, true);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].group, "2015");
  EXPECT_EQ(rows[2].group, "all");
  EXPECT_EQ(rows[2].aes, 2u);
  EXPECT_EQ(rows[2].pos, 2u);
  EXPECT_EQ(rows[2].tw, 2u);
  EXPECT_EQ(rows[2].total, 4u);
  EXPECT_EQ(rows[0].aes + rows[1].aes, rows[2].aes);
  EXPECT_EQ(render_csv(to_table(coverage_table(s, false))),
            "group,aes_n,aes_pct,pos_n,pos_pct,tw_n,tw_pct,total\nall,2,50.0,2,50.0,2,50.0,4\n");
}

TEST(Coverage, EmptySnapshot) {
  auto rows = coverage_table(snapshot({}), true);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].total, 0u);
  EXPECT_EQ(render_csv(to_table(rows)), "group,aes_n,aes_pct,pos_n,pos_pct,tw_n,tw_pct,total\nall,0,0.0,0,0.0,0,0.0,0\n");
}

TEST(Overlap, SingletonsAndAllThree) {
  auto s = snapshot({record(1, 1, 0, 0), record(2, 0, 1, 0), record(3, 0, 0, 1), record(4, 0, 0, 0)});
  auto p = overlap_partition(s);
  EXPECT_EQ(p.aes_only, 1u);
  EXPECT_EQ(p.pos_only, 1u);
  EXPECT_EQ(p.tw_only, 1u);
  EXPECT_EQ(p.aes_pos + p.aes_tw + p.pos_tw + p.all_three, 0u);
  EXPECT_EQ(p.universe, 4u);
  auto all = overlap_partition(snapshot({record(1, 1, 1, 1), record(2, 4, 2, 9)}));
  EXPECT_EQ(all.all_three, 2u);
  EXPECT_EQ(all.union_size(), 2u);
}

TEST(FbPartition, PosSubsetOfAes) {
  auto s = snapshot({record(1, 2, 1, 0), record(2, 5, 0, 0), record(3, 0, 0, 3)});
  auto rows = fb_partition(s, false);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].only_pos, 0u);
  EXPECT_EQ(rows[0].both, 1u);
  EXPECT_EQ(rows[0].only_aes, 1u);
  EXPECT_EQ(render_csv(to_table(rows)),
            "group,only_aes_n,only_aes_pct,both_n,both_pct,only_pos_n,only_pos_pct,any_fb\nall,1,50.0,1,50.0,0,0.0,2\n");
}

TEST(Compare, TiesOnlyAndHeader) {
  auto s = snapshot({record(1, 2, 2, 0), record(2, 5, 5, 0), record(3, 0, 4, 0)});
  auto rows = compare_counts(s, GroupBy::all);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].equal, 2u);
  EXPECT_EQ(rows[0].both_total(), 2u);
  EXPECT_EQ(render_csv(to_table(rows)),
            "group,aes_gt_n,aes_gt_pct,equal_n,equal_pct,pos_gt_n,pos_gt_pct,both_total\nall,0,0.0,2,100.0,0,0.0,2\n");
}

TEST(Partitions, CellsSumToGroundSets) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    auto s = testsupport::random_snapshot(rng, 300);
    std::uint64_t uni = 0, fb = 0, both = 0;
    for (const auto& [d, r] : s.records) {
      auto f = coverage_flags(r);
      uni += f.aes || f.pos || f.tw;
      fb += f.aes || f.pos;
      both += f.aes && f.pos;
    }
    EXPECT_EQ(overlap_partition(s).union_size(), uni);
    auto fbr = fb_partition(s, true);
    EXPECT_EQ(fbr.back().any_fb(), fb);
    std::uint64_t yearly = 0;
    for (std::size_t i = 0; i + 1 < fbr.size(); ++i) yearly += fbr[i].any_fb();
    EXPECT_EQ(yearly, fb);
    EXPECT_EQ(compare_counts(s, GroupBy::all).back().both_total(), both);
  }
}

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  auto p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Disciplines, ExcludedUnclassifiedAndTotal) {
  auto path = write_temp("engage-disc.csv",
                         "doi,grand_discipline,discipline,specialty\n" + testsupport::doi_for(1).str() +
                             ",Natural Sciences,Mathematics,Algebra\n" + testsupport::doi_for(2).str() +
                             ",\"Arts, Humanities\",Arts,Painting\n" + testsupport::doi_for(3).str() +
                             ",Health,Chemistry,Organic\n");
  auto map = DisciplineMap::load_csv(path.string());
  EXPECT_EQ(map.entries.size(), 3u);
  EXPECT_EQ(map.find(testsupport::doi_for(2))->grand_discipline, "Arts, Humanities");
  auto s = snapshot({record(1, 3, 1, 0), record(2, 3, 1, 0), record(3, 1, 4, 0), record(4, 2, 1, 0)});
  auto rows = compare_counts(s, GroupBy::discipline, &map);
  std::vector<std::string> groups;
  for (const auto& r : rows) groups.push_back(r.group);
  EXPECT_EQ(groups, (std::vector<std::string>{"Chemistry", "Mathematics", "unclassified", "total"}));
  EXPECT_EQ(rows[1].pos_gt, 0u);
  EXPECT_EQ(rows[3].both_total(), 2u);
  auto cov = coverage_by_discipline(s, map);
  EXPECT_EQ(cov.back().group, "total");
  EXPECT_EQ(cov.back().total, 2u);
  fs::remove(path);
}

TEST(LetterValueReport, ClassesSplitBySign) {
  std::vector<EngagementRecord> rs;
  for (int i = 0; i < 30; ++i) rs.push_back(record(i, 5, 3, 0, 2015 + i % 2));
  rs.push_back(record(100, 1, 4, 0, 2015));
  auto out = difference_lettervalues(snapshot(rs), GroupBy::year);
  bool saw = false;
  for (const auto& d : out) {
    if (d.group == "all" && d.sign_class == "aes_gt") {
      EXPECT_EQ(d.n, 30u);
      EXPECT_EQ(d.summary.median, 2.0);
      saw = true;
    }
  }
  EXPECT_TRUE(saw);
}

TEST(Emit, CsvJsonSvgDeterministic) {
  std::mt19937_64 rng(1);
  auto s = testsupport::random_snapshot(rng, 500);
  auto a = fs::temp_directory_path() / "engage-emit-a";
  auto b = fs::temp_directory_path() / "engage-emit-b";
  fs::remove_all(a);
  fs::remove_all(b);
  for (auto fmt : {ReportFormat::csv, ReportFormat::json, ReportFormat::svg}) {
    auto fa = write_reports(s, fmt, a);
    auto fb = write_reports(s, fmt, b);
    EXPECT_EQ(fa, fb);
    EXPECT_FALSE(fa.empty());
    for (const auto& f : fa) {
      std::ifstream ia(a / f), ib(b / f);
      std::string ta((std::istreambuf_iterator<char>(ia)), {}), tb((std::istreambuf_iterator<char>(ib)), {});
      EXPECT_EQ(ta, tb) << f;
      EXPECT_FALSE(ta.empty()) << f;
      if (fmt == ReportFormat::json) EXPECT_NE(ta.find("\"snapshot_date\": \"2017-10-09\""), std::string::npos) << f;
      if (fmt == ReportFormat::svg) EXPECT_NE(ta.find("<svg"), std::string::npos) << f;
    }
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Emit, CsvQuotingAndNumbers) {
  Table t{"x", {"a", "b"}, {{std::string("p,q"), 0.5}, {std::string("say \"hi\""), Percent{1, 3}}}, ""};
  EXPECT_EQ(render_csv(t), "a,b\n\"p,q\",0.5\n\"say \"\"hi\"\"\",33.3\n");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_THROW(parse_report_format("xml"), MalformedInput);
}
