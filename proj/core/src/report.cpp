#include "engage/report.hpp"

#include <algorithm>
#include <stdexcept>

#include "jsonio.hpp"

namespace engage {

namespace {

using RecordGroup = std::pair<std::string, std::vector<const EngagementRecord*>>;

std::string year_of(const EngagementRecord& r) {
  if (!r.publication_date) return "unknown";
  return std::to_string(static_cast<int>(r.publication_date->year()));
}

// Ordered groups; the summary group ("all" or "total") comes last.
std::vector<RecordGroup> group_records(const Snapshot& snapshot, GroupBy group_by,
                                       const DisciplineMap* disciplines,
                                       const ReportConfig& config) {
  std::vector<RecordGroup> out;
  if (group_by == GroupBy::discipline) {
    if (!disciplines) throw MalformedInput("discipline grouping needs a discipline map");
    std::map<std::string, std::vector<const EngagementRecord*>> by;
    std::vector<const EngagementRecord*> unclassified, total;
    for (const auto& [doi, r] : snapshot.records) {
      const auto* entry = disciplines->find(doi);
      if (!entry) {
        unclassified.push_back(&r);
        continue;
      }
      if (config.excluded_disciplines.count(entry->discipline)) continue;
      by[entry->discipline].push_back(&r);
      total.push_back(&r);
    }
    for (auto& [name, rs] : by) out.emplace_back(name, std::move(rs));
    out.emplace_back(config.unclassified_label, std::move(unclassified));
    out.emplace_back("total", std::move(total));
    return out;
  }

  std::vector<const EngagementRecord*> all;
  std::map<std::string, std::vector<const EngagementRecord*>> by_year;
  for (const auto& [doi, r] : snapshot.records) {
    all.push_back(&r);
    if (group_by == GroupBy::year) by_year[year_of(r)].push_back(&r);
  }
  for (auto& [year, rs] : by_year) out.emplace_back(year, std::move(rs));
  out.emplace_back("all", std::move(all));
  return out;
}

CoverageRow coverage_row(const RecordGroup& g, const ReportConfig& config) {
  CoverageRow row{g.first};
  for (const auto* r : g.second) {
    auto f = coverage_flags(*r, config.coverage_rule);
    row.aes += f.aes;
    row.pos += f.pos;
    row.tw += f.tw;
    ++row.total;
  }
  return row;
}

FbPartitionRow fb_row(const RecordGroup& g, const ReportConfig& config) {
  FbPartitionRow row{g.first};
  for (const auto* r : g.second) {
    auto f = coverage_flags(*r, config.coverage_rule);
    if (f.aes && f.pos) {
      ++row.both;
    } else if (f.aes) {
      ++row.only_aes;
    } else if (f.pos) {
      ++row.only_pos;
    }
  }
  return row;
}

bool both_covered(const EngagementRecord& r) {
  return r.aes.shares >= 1 && r.pos_mentions.value_or(0) >= 1;
}

}  // namespace

DisciplineMap DisciplineMap::load_csv(const std::string& path) {
  DisciplineMap map;
  map.provenance = path;
  auto lines = detail::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t c = 0; c < line.size(); ++c) {
      char ch = line[c];
      if (quoted) {
        if (ch == '"' && c + 1 < line.size() && line[c + 1] == '"') {
          field.push_back('"');
          ++c;
        } else if (ch == '"') {
          quoted = false;
        } else {
          field.push_back(ch);
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field.push_back(ch);
      }
    }
    fields.push_back(std::move(field));
    if (i == 0 && fields.size() >= 1 && fields[0] == "doi") continue;
    if (fields.size() != 4) {
      throw MalformedInput(path + ":" + std::to_string(i + 1) + ": expected 4 columns");
    }
    map.entries[Doi::parse(fields[0])] = {fields[1], fields[2], fields[3]};
  }
  return map;
}

const DisciplineEntry* DisciplineMap::find(const Doi& doi) const {
  auto it = entries.find(doi);
  return it == entries.end() ? nullptr : &it->second;
}

std::string format_percent(std::uint64_t n, std::uint64_t total) {
  if (total == 0) return "0.0";
  std::uint64_t tenths = (2 * n * 1000 + total) / (2 * total);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

std::vector<CoverageRow> coverage_table(const Snapshot& snapshot, bool group_by_year,
                                        const ReportConfig& config) {
  std::vector<CoverageRow> out;
  for (const auto& g :
       group_records(snapshot, group_by_year ? GroupBy::year : GroupBy::all, nullptr, config)) {
    out.push_back(coverage_row(g, config));
  }
  return out;
}

std::vector<CoverageRow> coverage_by_discipline(const Snapshot& snapshot,
                                                const DisciplineMap& disciplines,
                                                const ReportConfig& config) {
  std::vector<CoverageRow> out;
  for (const auto& g : group_records(snapshot, GroupBy::discipline, &disciplines, config)) {
    out.push_back(coverage_row(g, config));
  }
  return out;
}

OverlapPartition overlap_partition(const Snapshot& snapshot, const ReportConfig& config) {
  OverlapPartition p;
  std::uint64_t covered = 0;
  for (const auto& [doi, r] : snapshot.records) {
    ++p.universe;
    auto f = coverage_flags(r, config.coverage_rule);
    int mask = (f.aes ? 1 : 0) | (f.pos ? 2 : 0) | (f.tw ? 4 : 0);
    covered += mask != 0;
    switch (mask) {
      case 1: ++p.aes_only; break;
      case 2: ++p.pos_only; break;
      case 4: ++p.tw_only; break;
      case 3: ++p.aes_pos; break;
      case 5: ++p.aes_tw; break;
      case 6: ++p.pos_tw; break;
      case 7: ++p.all_three; break;
      default: break;
    }
  }
  if (p.union_size() != covered) throw std::logic_error("overlap regions do not sum to the union");
  return p;
}

std::vector<FbPartitionRow> fb_partition(const Snapshot& snapshot, bool group_by_year,
                                         const ReportConfig& config) {
  std::vector<FbPartitionRow> out;
  for (const auto& g :
       group_records(snapshot, group_by_year ? GroupBy::year : GroupBy::all, nullptr, config)) {
    out.push_back(fb_row(g, config));
  }
  return out;
}

std::vector<FbPartitionRow> fb_partition_by_discipline(const Snapshot& snapshot,
                                                       const DisciplineMap& disciplines,
                                                       const ReportConfig& config) {
  std::vector<FbPartitionRow> out;
  for (const auto& g : group_records(snapshot, GroupBy::discipline, &disciplines, config)) {
    out.push_back(fb_row(g, config));
  }
  return out;
}

std::vector<CompareRow> compare_counts(const Snapshot& snapshot, GroupBy group_by,
                                       const DisciplineMap* disciplines,
                                       const ReportConfig& config) {
  std::vector<CompareRow> out;
  for (const auto& g : group_records(snapshot, group_by, disciplines, config)) {
    CompareRow row{g.first};
    for (const auto* r : g.second) {
      if (!both_covered(*r)) continue;
      auto pos = *r->pos_mentions;
      if (r->aes.shares > pos) {
        ++row.aes_gt;
      } else if (r->aes.shares < pos) {
        ++row.pos_gt;
      } else {
        ++row.equal;
      }
    }
    out.push_back(row);
  }
  return out;
}

std::vector<DifferenceSummary> difference_lettervalues(const Snapshot& snapshot, GroupBy group_by,
                                                       const DisciplineMap* disciplines,
                                                       const ReportConfig& config) {
  std::vector<DifferenceSummary> out;
  for (const auto& g : group_records(snapshot, group_by, disciplines, config)) {
    std::vector<double> aes_gt, pos_gt;
    for (const auto* r : g.second) {
      if (!both_covered(*r)) continue;
      auto aes = r->aes.shares;
      auto pos = *r->pos_mentions;
      if (aes > pos) aes_gt.push_back(static_cast<double>(aes - pos));
      if (pos > aes) pos_gt.push_back(static_cast<double>(pos - aes));
    }
    if (!aes_gt.empty()) out.push_back({g.first, "aes_gt", aes_gt.size(), letter_values(aes_gt)});
    if (!pos_gt.empty()) out.push_back({g.first, "pos_gt", pos_gt.size(), letter_values(pos_gt)});
  }
  return out;
}

MetricVector metric_vector(const Snapshot& snapshot, Metric metric) {
  MetricVector v{metric, {}, snapshot.records.size()};
  for (const auto& [doi, r] : snapshot.records) {
    std::uint64_t value = 0;
    switch (metric) {
      case Metric::aes: value = r.aes.shares; break;
      case Metric::pos: value = r.pos_mentions.value_or(0); break;
      case Metric::tw: value = r.tweets.value_or(0); break;
    }
    if (value >= 1) v.values.emplace(doi.str(), value);
  }
  return v;
}

std::vector<DescriptiveRow> descriptive_table(const Snapshot& snapshot, const ReportConfig& config) {
  std::vector<DescriptiveRow> out;
  for (auto m : {Metric::aes, Metric::pos, Metric::tw}) {
    auto v = metric_vector(snapshot, m);
    if (v.values.empty()) continue;
    DescriptiveRow row{m, descriptive(v), std::nullopt};
    try {
      row.fit = fit_power_law(log_bin(v, config.binning_k, config.binning_width));
    } catch (const InsufficientPoints&) {
    }
    out.push_back(row);
  }
  return out;
}

std::vector<CorrelationRow> correlation_table(const Snapshot& snapshot) {
  std::vector<CorrelationRow> out;
  const std::pair<Metric, Metric> pairs[] = {
      {Metric::aes, Metric::pos}, {Metric::aes, Metric::tw}, {Metric::pos, Metric::tw}};
  for (auto [a, b] : pairs) {
    auto va = metric_vector(snapshot, a);
    auto vb = metric_vector(snapshot, b);
    CorrelationRow row{a, b, 0.0, va.universe_size, va.universe_size - va.values.size(),
                       vb.universe_size - vb.values.size()};
    try {
      row.rho = spearman_zero_imputed(va, vb);
    } catch (const DegenerateVector&) {
      continue;
    }
    out.push_back(row);
  }
  return out;
}

std::vector<PowerLawSeries> powerlaw_series(const Snapshot& snapshot, const ReportConfig& config) {
  std::vector<PowerLawSeries> out;
  for (auto m : {Metric::aes, Metric::pos, Metric::tw}) {
    auto binned = log_bin(metric_vector(snapshot, m), config.binning_k, config.binning_width);
    try {
      auto fit = fit_power_law(binned);
      out.push_back({m, std::move(binned), fit});
    } catch (const InsufficientPoints&) {
    }
  }
  return out;
}

}  // namespace engage
