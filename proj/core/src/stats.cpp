#include "engage/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "engage/error.hpp"

namespace engage {

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::aes: return "aes";
    case Metric::pos: return "pos";
    case Metric::tw: return "tw";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "aes" || name == "AES") return Metric::aes;
  if (name == "pos" || name == "POS") return Metric::pos;
  if (name == "tw" || name == "TW") return Metric::tw;
  throw MalformedInput("unknown metric: " + std::string(name));
}

std::vector<std::uint64_t> MetricVector::counts() const {
  std::vector<std::uint64_t> out;
  out.reserve(values.size());
  for (const auto& [doi, c] : values) out.push_back(c);
  return out;
}

Descriptive descriptive(const MetricVector& v) {
  if (v.values.empty()) throw EmptyVector("descriptive statistics of an empty vector");
  Descriptive d;
  d.count = v.values.size();
  d.min = std::numeric_limits<std::uint64_t>::max();
  double log_sum = 0.0;
  for (const auto& [doi, c] : v.values) {
    if (c == 0) throw MalformedInput("metric vector holds a zero count for " + doi);
    d.min = std::min(d.min, c);
    d.max = std::max(d.max, c);
    log_sum += std::log(static_cast<double>(c));
  }
  d.geometric_mean = std::exp(log_sum / static_cast<double>(d.count));
  return d;
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    // positions i..j (0-based) share the mean of ranks i+1..j+1
    double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mid;
    i = j + 1;
  }
  return ranks;
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y, const char* what) {
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateVector(std::string(what) + ": constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

double spearman_zero_imputed(const MetricVector& a, const MetricVector& b) {
  if (a.universe_size != b.universe_size) {
    throw MalformedInput("spearman: vectors cover different universes");
  }
  std::set<std::string> keys;
  for (const auto& [doi, c] : a.values) keys.insert(doi);
  for (const auto& [doi, c] : b.values) keys.insert(doi);
  if (keys.size() > a.universe_size) {
    throw MalformedInput("spearman: more covered articles than the universe holds");
  }

  // Articles covered by neither metric are zero on both sides.
  std::vector<double> xa(a.universe_size, 0.0), xb(a.universe_size, 0.0);
  std::size_t i = 0;
  for (const auto& doi : keys) {
    if (auto it = a.values.find(doi); it != a.values.end()) xa[i] = static_cast<double>(it->second);
    if (auto it = b.values.find(doi); it != b.values.end()) xb[i] = static_cast<double>(it->second);
    ++i;
  }
  auto ra = average_ranks(xa);
  auto rb = average_ranks(xb);
  return pearson(ra, rb, "spearman");
}

double log_bin_edge(int k, double width, long index) {
  return std::pow(10.0, std::log10(static_cast<double>(k)) + static_cast<double>(index) * width);
}

namespace {

// Integers n with n > k and lo <= n < hi.
std::uint64_t integers_in(double lo, double hi, std::uint64_t k) {
  double first = std::max(std::ceil(lo), static_cast<double>(k + 1));
  double last = std::ceil(hi) - 1.0;
  return last < first ? 0 : static_cast<std::uint64_t>(last - first + 1.0);
}

long log_bin_index(std::uint64_t value, int k, double width) {
  double x = static_cast<double>(value);
  long j = static_cast<long>(std::floor((std::log10(x) - std::log10(static_cast<double>(k))) / width));
  // Settle rounding at the edges against the same edge function used for widths.
  while (j > 0 && x < log_bin_edge(k, width, j)) --j;
  while (x >= log_bin_edge(k, width, j + 1)) ++j;
  return j;
}

}  // namespace

BinnedDensity log_bin(std::span<const std::uint64_t> values, int k, double width) {
  if (k < 1) throw MalformedInput("log_bin: threshold k must be >= 1");
  if (!(width > 0.0)) throw MalformedInput("log_bin: width must be positive");

  const auto uk = static_cast<std::uint64_t>(k);
  std::map<std::uint64_t, std::uint64_t> unit;
  std::map<long, std::uint64_t> logbins;
  for (auto v : values) {
    if (v == 0) throw MalformedInput("log_bin: zero count in a covered-only vector");
    if (v <= uk) {
      ++unit[v];
    } else {
      ++logbins[log_bin_index(v, k, width)];
    }
  }

  BinnedDensity out;
  out.threshold_k = k;
  out.bin_width_log10 = width;
  for (const auto& [v, n] : unit) {
    double x = static_cast<double>(v);
    out.points.push_back({x, static_cast<double>(n), n, 1, x, x + 1.0});
  }
  const double a0 = std::log10(static_cast<double>(k));
  for (const auto& [j, n] : logbins) {
    double lo = log_bin_edge(k, width, j);
    double hi = log_bin_edge(k, width, j + 1);
    std::uint64_t w = integers_in(lo, hi, uk);
    double center = std::pow(10.0, a0 + (static_cast<double>(j) + 0.5) * width);
    out.points.push_back({center, static_cast<double>(n) / static_cast<double>(w), n, w, lo, hi});
  }
  return out;
}

BinnedDensity log_bin(const MetricVector& v, int k, double width) {
  auto c = v.counts();
  return log_bin(c, k, width);
}

DistributionFit fit_power_law(const BinnedDensity& binned) {
  std::vector<double> xs, ys;
  for (const auto& p : binned.points) {
    if (p.density > 0.0 && p.x_center > 0.0) {
      xs.push_back(std::log10(p.x_center));
      ys.push_back(std::log10(p.density));
    }
  }
  if (xs.size() < 2) throw InsufficientPoints("power-law fit needs at least two nonzero bins");
  const double n = static_cast<double>(xs.size());
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw InsufficientPoints("power-law fit needs two distinct bin centers");
  double slope = sxy / sxx;
  return {-slope, my - slope * mx, 1, xs.size()};
}

LetterValueSummary letter_values(std::span<const double> xs, std::size_t min_beyond) {
  if (xs.empty()) throw EmptyVector("letter values of an empty vector");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  auto from_below = [&](double depth) {
    auto lo = static_cast<std::size_t>(std::floor(depth));
    auto hi = static_cast<std::size_t>(std::ceil(depth));
    return (sorted[lo - 1] + sorted[hi - 1]) / 2.0;
  };
  auto from_above = [&](double depth) {
    auto lo = static_cast<std::size_t>(std::floor(depth));
    auto hi = static_cast<std::size_t>(std::ceil(depth));
    return (sorted[n - lo] + sorted[n - hi]) / 2.0;
  };

  LetterValueSummary s;
  double depth = (static_cast<double>(n) + 1.0) / 2.0;
  s.median = from_below(depth);
  s.depths.push_back(depth);

  for (;;) {
    double next = (std::floor(depth) + 1.0) / 2.0;
    if (next >= depth) break;
    depth = next;
    double lo = from_below(depth);
    double hi = from_above(depth);
    s.lower.push_back(lo);
    s.upper.push_back(hi);
    s.depths.push_back(depth);
    auto below = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), lo) - sorted.begin());
    auto above = static_cast<std::size_t>(
        sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), hi));
    if (below + above < min_beyond) break;
  }

  if (!s.lower.empty()) {
    double lo = s.lower.back();
    double hi = s.upper.back();
    for (double x : sorted) {
      if (x < lo || x > hi) s.outliers.push_back(x);
    }
  }
  return s;
}

}  // namespace engage
