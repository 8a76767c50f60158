#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "engage/error.hpp"
#include "engage/stats.hpp"
#include "oracles.hpp"

using namespace engage;

namespace {

MetricVector vec(Metric m, std::size_t universe, const std::map<std::size_t, std::uint64_t>& v) {
  MetricVector out{m, {}, universe};
  for (const auto& [k, c] : v) {
    char key[16];
    std::snprintf(key, sizeof key, "k%06zu", k);
    out.values[key] = c;
  }
  return out;
}

}  // namespace

TEST(Descriptive, Examples) {
  auto d = descriptive(vec(Metric::aes, 2, {{0, 2}, {1, 8}}));
  EXPECT_EQ(d.count, 2u);
  EXPECT_EQ(d.min, 2u);
  EXPECT_EQ(d.max, 8u);
  EXPECT_NEAR(d.geometric_mean, 4.0, 1e-12);
  EXPECT_NEAR(descriptive(vec(Metric::aes, 1, {{0, 1}})).geometric_mean, 1.0, 1e-15);
  EXPECT_THROW(descriptive(vec(Metric::aes, 3, {})), EmptyVector);
}

TEST(Spearman, IdentityReversalAndErrors) {
  auto a = vec(Metric::aes, 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  auto b = vec(Metric::pos, 5, {{0, 5}, {1, 4}, {2, 3}, {3, 2}, {4, 1}});
  EXPECT_NEAR(spearman_zero_imputed(a, a), 1.0, 1e-15);
  EXPECT_NEAR(spearman_zero_imputed(a, b), -1.0, 1e-15);
  EXPECT_THROW(spearman_zero_imputed(a, vec(Metric::pos, 6, {{0, 1}})), MalformedInput);
  EXPECT_THROW(spearman_zero_imputed(a, vec(Metric::pos, 5, {})), DegenerateVector);
}

TEST(Spearman, MidRanks) {
  std::vector<double> xs{10, 0, 0, 5, 10, 0};
  EXPECT_EQ(average_ranks(xs), (std::vector<double>{5.5, 2, 2, 4, 5.5, 2}));
}

TEST(Spearman, MatchesRankThenPearsonOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(3, 400)(rng);
    std::map<std::size_t, std::uint64_t> a, b;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 3 == 0) a[i] = 1 + rng() % 20;
      if (rng() % 4 == 0) b[i] = 1 + rng() % 5;
    }
    if (a.empty() || b.empty() || a.size() == n || b.size() == n) continue;
    double want = oracle::spearman(n, a, b);
    EXPECT_NEAR(spearman_zero_imputed(vec(Metric::aes, n, a), vec(Metric::tw, n, b)), want, 1e-12);
  }
}

TEST(LogBin, UnitRegionIsFrequencyTable) {
  std::vector<std::uint64_t> v{1, 1, 2, 5, 5, 5, 3};
  auto b = log_bin(v, 5, 0.11);
  ASSERT_EQ(b.points.size(), 4u);
  EXPECT_EQ(b.points[0].x_center, 1.0);
  EXPECT_EQ(b.points[0].density, 2.0);
  EXPECT_EQ(b.points[3].x_center, 5.0);
  EXPECT_EQ(b.points[3].raw_count, 3u);
  EXPECT_EQ(b.points[3].int_width, 1u);
}

TEST(LogBin, SingleValueHundred) {
  std::vector<std::uint64_t> v{100};
  auto b = log_bin(v, 5, 0.11);
  ASSERT_EQ(b.points.size(), 1u);
  auto bins = oracle::brute_force_log_bins(v, 5, 0.11);
  ASSERT_EQ(bins.size(), 1u);
  const auto& ob = bins.begin()->second;
  EXPECT_EQ(b.points[0].int_width, ob.integers);
  EXPECT_DOUBLE_EQ(b.points[0].density, 1.0 / static_cast<double>(ob.integers));
  EXPECT_LE(b.points[0].lower_edge, 100.0);
  EXPECT_GT(b.points[0].upper_edge, 100.0);
  long j = bins.begin()->first;
  EXPECT_NEAR(b.points[0].x_center, std::pow(10.0, std::log10(5.0) + (j + 0.5) * 0.11), 1e-9);
}

TEST(LogBin, MatchesBruteForceBins) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::uint64_t> v(200);
    for (auto& x : v) x = 1 + static_cast<std::uint64_t>(std::exp(std::uniform_real_distribution<double>(0, 9)(rng)));
    auto b = log_bin(v, 5, 0.11);
    auto bins = oracle::brute_force_log_bins(v, 5, 0.11);
    std::size_t i = 0;
    while (i < b.points.size() && b.points[i].int_width == 1 && b.points[i].x_center <= 5) ++i;
    ASSERT_EQ(b.points.size() - i, bins.size());
    for (const auto& [j, ob] : bins) {
      EXPECT_EQ(b.points[i].raw_count, ob.count);
      EXPECT_EQ(b.points[i].int_width, ob.integers);
      ++i;
    }
  }
}

TEST(LogBin, RejectsZeroAndBadParameters) {
  std::vector<std::uint64_t> v{0};
  EXPECT_THROW(log_bin(v), MalformedInput);
  std::vector<std::uint64_t> w{1};
  EXPECT_THROW(log_bin(w, 0, 0.11), MalformedInput);
  EXPECT_THROW(log_bin(w, 5, 0.0), MalformedInput);
}

TEST(FitPowerLaw, ExactLine) {
  BinnedDensity b;
  for (double x : {1.0, 2.0, 3.0, 7.0, 20.0, 150.0}) b.points.push_back({x, 3.0 * std::pow(x, -2.5), 1, 1, x, x + 1});
  auto fit = fit_power_law(b);
  EXPECT_NEAR(fit.alpha, 2.5, 1e-9);
  EXPECT_NEAR(fit.intercept, std::log10(3.0), 1e-9);
  EXPECT_EQ(fit.points_used, 6u);
  BinnedDensity one;
  one.points.push_back({1, 1, 1, 1, 1, 2});
  EXPECT_THROW(fit_power_law(one), InsufficientPoints);
}

TEST(LetterValues, TextbookAndSingle) {
  std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8};
  auto lv = letter_values(xs, 0);
  EXPECT_EQ(lv.median, 4.5);
  ASSERT_FALSE(lv.lower.empty());
  EXPECT_EQ(lv.lower[0], 2.5);
  EXPECT_EQ(lv.upper[0], 6.5);
  std::vector<double> one{3};
  auto s = letter_values(one);
  EXPECT_EQ(s.median, 3);
  EXPECT_TRUE(s.lower.empty());
  EXPECT_TRUE(s.outliers.empty());
  EXPECT_THROW(letter_values(std::vector<double>{}), EmptyVector);
}

TEST(LetterValues, ConstantIsDegenerate) {
  std::vector<double> xs(50, 2.0);
  auto lv = letter_values(xs);
  EXPECT_EQ(lv.median, 2.0);
  for (double v : lv.lower) EXPECT_EQ(v, 2.0);
  for (double v : lv.upper) EXPECT_EQ(v, 2.0);
  EXPECT_TRUE(lv.outliers.empty());
}

TEST(LetterValues, MatchesOrderStatisticOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + rng() % 1000;
    std::vector<double> xs(n);
    std::lognormal_distribution<double> d(0, 1.5);
    for (auto& x : xs) x = std::floor(d(rng));
    auto got = letter_values(xs);
    auto want = oracle::letter_values(xs, 10);
    EXPECT_EQ(got.median, want.median);
    EXPECT_EQ(got.lower, want.lower);
    EXPECT_EQ(got.upper, want.upper);
    EXPECT_EQ(got.depths, want.depths);
  }
}

TEST(Metric, Names) {
  EXPECT_EQ(parse_metric("aes"), Metric::aes);
  EXPECT_EQ(to_string(Metric::tw), "tw");
  EXPECT_THROW(parse_metric("fb"), MalformedInput);
}
