#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace engage {

enum class Metric { aes, pos, tw };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

/// Counts for the covered articles of one metric. Articles in the universe
/// but absent from `values` are treated as zero where imputation applies.
struct MetricVector {
  Metric metric = Metric::aes;
  std::map<std::string, std::uint64_t> values;  // doi -> count, all >= 1
  std::size_t universe_size = 0;

  std::vector<std::uint64_t> counts() const;
};

struct Descriptive {
  std::size_t count = 0;
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  double geometric_mean = 0.0;
};

/// Throws EmptyVector.
Descriptive descriptive(const MetricVector& v);

/// Spearman's rho over the whole universe with absent articles imputed as
/// zero. Ties get mid-ranks; rho is the Pearson correlation of the ranks.
/// Throws MalformedInput on mismatched universes, DegenerateVector when a
/// side is constant.
double spearman_zero_imputed(const MetricVector& a, const MetricVector& b);

/// Mid-ranks (1-based) of `xs`.
std::vector<double> average_ranks(std::span<const double> xs);

struct BinPoint {
  double x_center = 0.0;
  double density = 0.0;
  std::uint64_t raw_count = 0;
  std::uint64_t int_width = 0;
  double lower_edge = 0.0;  // inclusive
  double upper_edge = 0.0;  // exclusive
};

struct BinnedDensity {
  std::vector<BinPoint> points;  // x_center strictly increasing
  int threshold_k = 5;
  double bin_width_log10 = 0.11;
};

/// Partial logarithmic binning. Values 1..k keep unit bins (density =
/// frequency). Values above k fall into bins [10^a, 10^(a+width)) with a
/// starting at log10(k); density = count / integers-in-bin. Empty bins are
/// omitted.
BinnedDensity log_bin(std::span<const std::uint64_t> values, int k = 5, double width = 0.11);
BinnedDensity log_bin(const MetricVector& v, int k = 5, double width = 0.11);

/// Lower edge of log bin `index` for threshold k and width.
double log_bin_edge(int k, double width, long index);

struct DistributionFit {
  double alpha = 0.0;
  double intercept = 0.0;  // log10 density at x = 1
  std::uint64_t x_min = 1;
  std::size_t points_used = 0;
};

/// Unweighted least squares of log10(density) on log10(x_center) over the
/// points with positive density; alpha is the negated slope. Throws
/// InsufficientPoints below two usable points.
DistributionFit fit_power_law(const BinnedDensity& binned);

struct LetterValueSummary {
  double median = 0.0;
  std::vector<double> lower;     // fourth, eighth, ... non-increasing
  std::vector<double> upper;     // non-decreasing
  std::vector<double> outliers;  // ascending
  std::vector<double> depths;    // depths[0] is the median depth
};

/// Letter values at depths d1 = (n+1)/2, d(i+1) = (floor(d(i))+1)/2. The
/// halving stops once fewer than `min_beyond` observations lie outside the
/// current pair. Throws EmptyVector.
LetterValueSummary letter_values(std::span<const double> xs, std::size_t min_beyond = 10);

}  // namespace engage
