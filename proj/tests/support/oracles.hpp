#pragma once

// Slow, obviously-correct reference implementations used to check the
// library. None of these call into the code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct ObjectReading {
  std::string object_id;
  std::uint64_t shares, reactions, comments, plugin_comments;
};

struct Sums {
  std::uint64_t shares = 0, reactions = 0, comments = 0, plugin_comments = 0;
  std::set<std::string> ids;
};

// Distinct-object summation: zero objects dropped, duplicates counted once
// at their largest (total, shares, reactions, comments, plugin) reading.
inline Sums distinct_object_sum(const std::vector<ObjectReading>& readings) {
  Sums s;
  std::vector<std::string> seen;
  for (const auto& r : readings) {
    if (r.shares + r.reactions + r.comments + r.plugin_comments == 0) continue;
    if (std::find(seen.begin(), seen.end(), r.object_id) != seen.end()) continue;
    seen.push_back(r.object_id);
    const ObjectReading* best = nullptr;
    for (const auto& o : readings) {
      if (o.object_id != r.object_id) continue;
      auto key = [](const ObjectReading& x) {
        return std::make_tuple(x.shares + x.reactions + x.comments + x.plugin_comments, x.shares, x.reactions,
                               x.comments, x.plugin_comments);
      };
      if (!best || key(*best) < key(o)) best = &o;
    }
    s.shares += best->shares;
    s.reactions += best->reactions;
    s.comments += best->comments;
    s.plugin_comments += best->plugin_comments;
    s.ids.insert(r.object_id);
  }
  return s;
}

// Rank by counting: rank(x_i) = #{x_j < x_i} + (#{x_j == x_i} + 1) / 2.
inline std::vector<double> count_ranks(const std::vector<double>& xs) {
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double less = 0, equal = 0;
    for (double y : xs) {
      if (y < xs[i]) ++less;
      else if (y == xs[i]) ++equal;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

// Two-pass Pearson in long double.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Spearman with zero imputation over a universe of `n` keys 0..n-1.
inline double spearman(std::size_t n, const std::map<std::size_t, std::uint64_t>& a,
                       const std::map<std::size_t, std::uint64_t>& b) {
  std::vector<double> xa(n, 0.0), xb(n, 0.0);
  for (const auto& [k, v] : a) xa[k] = static_cast<double>(v);
  for (const auto& [k, v] : b) xb[k] = static_cast<double>(v);
  return pearson(count_ranks(xa), count_ranks(xb));
}

struct Bin {
  std::uint64_t count = 0;
  std::uint64_t integers = 0;
  long double lo = 0, hi = 0;
};

// Partial log bins by scanning: a value v > k lands in the bin j with
// 10^(log10 k + j w) <= v < 10^(log10 k + (j+1) w), found by walking j up.
inline std::map<long, Bin> brute_force_log_bins(const std::vector<std::uint64_t>& values, int k, double w) {
  auto edge = [&](long j) { return std::pow(10.0, std::log10(static_cast<double>(k)) + static_cast<double>(j) * w); };
  std::map<long, Bin> bins;
  std::uint64_t vmax = 0;
  for (auto v : values) vmax = std::max(vmax, v);
  for (auto v : values) {
    if (v <= static_cast<std::uint64_t>(k)) continue;
    long j = 0;
    while (!(edge(j) <= static_cast<double>(v) && static_cast<double>(v) < edge(j + 1))) ++j;
    ++bins[j].count;
  }
  for (auto& [j, b] : bins) {
    b.lo = edge(j);
    b.hi = edge(j + 1);
    for (std::uint64_t n = static_cast<std::uint64_t>(k) + 1; static_cast<double>(n) < b.hi + 1; ++n) {
      if (edge(j) <= static_cast<double>(n) && static_cast<double>(n) < edge(j + 1)) ++b.integers;
    }
  }
  return bins;
}

// Discrete power law P(X = x) proportional to x^-alpha on [1, x_max], sampled by
// inverting the tabulated CDF.
class PowerLawSampler {
 public:
  PowerLawSampler(double alpha, std::uint64_t x_max) {
    cdf_.reserve(x_max);
    long double acc = 0;
    for (std::uint64_t x = 1; x <= x_max; ++x) {
      acc += std::pow(static_cast<long double>(x), -static_cast<long double>(alpha));
      cdf_.push_back(acc);
    }
    for (auto& c : cdf_) c /= acc;
  }

  template <class Rng>
  std::uint64_t operator()(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long double p = u(rng);
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
    if (it == cdf_.end()) --it;
    return static_cast<std::uint64_t>(it - cdf_.begin()) + 1;
  }

 private:
  std::vector<long double> cdf_;
};

// Value at a (possibly half-integer) 1-based depth from the bottom of the
// sorted sample, by linear interpolation between neighbouring order statistics.
inline double order_statistic(const std::vector<double>& sorted, double depth) {
  auto lo = static_cast<std::size_t>(depth);
  double frac = depth - static_cast<double>(lo);
  double a = sorted[lo - 1];
  double b = frac > 0 ? sorted[lo] : a;
  return a + frac * (b - a);
}

struct LetterValues {
  double median = 0;
  std::vector<double> lower, upper, depths;
};

inline LetterValues letter_values(std::vector<double> xs, std::size_t min_beyond) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  LetterValues lv;
  double d = (n + 1) / 2;
  lv.depths.push_back(d);
  lv.median = order_statistic(xs, d);
  while (true) {
    double next = (std::floor(d) + 1) / 2;
    if (!(next < d)) break;
    d = next;
    double lo = order_statistic(xs, d);
    double hi = order_statistic(xs, n + 1 - d);
    lv.lower.push_back(lo);
    lv.upper.push_back(hi);
    lv.depths.push_back(d);
    std::size_t beyond = 0;
    for (double x : xs) beyond += (x < lo || x > hi);
    if (beyond < min_beyond) break;
  }
  return lv;
}

// Follows a redirect map one hop at a time; nullopt on a cycle or when the
// chain is longer than `max_depth` hops.
inline std::optional<std::string> follow_chain(const std::string& start,
                                               const std::map<std::string, std::string>& redirects,
                                               int max_depth) {
  std::string cur = start;
  std::set<std::string> visited{cur};
  for (int hop = 0;; ++hop) {
    auto it = redirects.find(cur);
    if (it == redirects.end()) return cur;
    if (hop >= max_depth) return std::nullopt;
    cur = it->second;
    if (!visited.insert(cur).second) return std::nullopt;
  }
}

}  // namespace oracle
