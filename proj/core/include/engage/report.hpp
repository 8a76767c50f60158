#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "engage/resolve.hpp"
#include "engage/stats.hpp"
#include "engage/store.hpp"

namespace engage {

struct DisciplineEntry {
  std::string grand_discipline;
  std::string discipline;
  std::string specialty;
};

/// DOI -> NSF-style classification, read from CSV
/// "doi,grand_discipline,discipline,specialty".
struct DisciplineMap {
  std::map<Doi, DisciplineEntry> entries;
  std::string provenance;

  static DisciplineMap load_csv(const std::string& path);
  const DisciplineEntry* find(const Doi& doi) const;
};

struct ReportConfig {
  CoverageRule coverage_rule = CoverageRule::shares_only;
  std::set<std::string> excluded_disciplines{"Arts", "Humanities"};
  std::string unclassified_label = "unclassified";
  int binning_k = 5;
  double binning_width = 0.11;
};

enum class GroupBy { all, year, discipline };

/// Rounds n/total*100 half-up to one decimal; "0.0" when total is 0.
std::string format_percent(std::uint64_t n, std::uint64_t total);

// ---------------------------------------------------------------------------
// Tables

struct CoverageRow {
  std::string group;
  std::uint64_t aes = 0, pos = 0, tw = 0, total = 0;
};

/// Yearly rows (ascending) followed by an "all" row, or just "all".
std::vector<CoverageRow> coverage_table(const Snapshot& snapshot, bool group_by_year,
                                        const ReportConfig& config = {});

/// One row per discipline, then the unclassified bucket, then "total" over
/// classified, non-excluded articles.
std::vector<CoverageRow> coverage_by_discipline(const Snapshot& snapshot,
                                                const DisciplineMap& disciplines,
                                                const ReportConfig& config = {});

/// The seven regions of the (AES, POS, TW) coverage diagram.
struct OverlapPartition {
  std::uint64_t aes_only = 0, pos_only = 0, tw_only = 0;
  std::uint64_t aes_pos = 0, aes_tw = 0, pos_tw = 0;  // exactly these two
  std::uint64_t all_three = 0;
  std::uint64_t universe = 0;

  std::uint64_t union_size() const {
    return aes_only + pos_only + tw_only + aes_pos + aes_tw + pos_tw + all_three;
  }
};

OverlapPartition overlap_partition(const Snapshot& snapshot, const ReportConfig& config = {});

struct FbPartitionRow {
  std::string group;
  std::uint64_t only_aes = 0, both = 0, only_pos = 0;
  std::uint64_t any_fb() const { return only_aes + both + only_pos; }
};

/// Partition of AES-or-POS covered articles; yearly rows then "all".
std::vector<FbPartitionRow> fb_partition(const Snapshot& snapshot, bool group_by_year,
                                         const ReportConfig& config = {});
std::vector<FbPartitionRow> fb_partition_by_discipline(const Snapshot& snapshot,
                                                       const DisciplineMap& disciplines,
                                                       const ReportConfig& config = {});

struct CompareRow {
  std::string group;
  std::uint64_t aes_gt = 0, equal = 0, pos_gt = 0;
  std::uint64_t both_total() const { return aes_gt + equal + pos_gt; }
};

/// Articles with shares >= 1 and POS >= 1, split by which count is larger.
std::vector<CompareRow> compare_counts(const Snapshot& snapshot, GroupBy group_by,
                                       const DisciplineMap* disciplines = nullptr,
                                       const ReportConfig& config = {});

struct DifferenceSummary {
  std::string group;
  std::string sign_class;  // "aes_gt" or "pos_gt"
  std::size_t n = 0;
  LetterValueSummary summary;
};

/// Letter values of |AES - POS| over both-covered articles with AES != POS.
std::vector<DifferenceSummary> difference_lettervalues(const Snapshot& snapshot, GroupBy group_by,
                                                       const DisciplineMap* disciplines = nullptr,
                                                       const ReportConfig& config = {});

/// Covered-only counts of a metric over the snapshot (AES uses shares).
MetricVector metric_vector(const Snapshot& snapshot, Metric metric);

struct DescriptiveRow {
  Metric metric;
  Descriptive stats;
  std::optional<DistributionFit> fit;
};

std::vector<DescriptiveRow> descriptive_table(const Snapshot& snapshot,
                                              const ReportConfig& config = {});

struct CorrelationRow {
  Metric a;
  Metric b;
  double rho = 0.0;
  std::size_t n = 0;
  std::size_t imputed_a = 0;
  std::size_t imputed_b = 0;
};

std::vector<CorrelationRow> correlation_table(const Snapshot& snapshot);

struct PowerLawSeries {
  Metric metric;
  BinnedDensity binned;
  DistributionFit fit;
};

std::vector<PowerLawSeries> powerlaw_series(const Snapshot& snapshot,
                                            const ReportConfig& config = {});

// ---------------------------------------------------------------------------
// Emission

struct Percent {
  std::uint64_t n = 0;
  std::uint64_t total = 0;
};

using Cell = std::variant<std::uint64_t, double, std::string, Percent>;

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  std::string snapshot_date;  // embedded in JSON output when set
};

Table to_table(const std::vector<CoverageRow>& rows);
Table to_table(const OverlapPartition& partition);
Table to_table(const std::vector<FbPartitionRow>& rows);
Table to_table(const std::vector<CompareRow>& rows);
Table to_table(const std::vector<DifferenceSummary>& rows);
Table to_table(const std::vector<DescriptiveRow>& rows);
Table to_table(const std::vector<CorrelationRow>& rows);
Table to_table(const std::vector<PowerLawSeries>& series);

std::string render_csv(const Table& table);
std::string render_json(const Table& table);

/// Log-log scatter of binned densities with the fitted lines.
std::string render_powerlaw_svg(const std::vector<PowerLawSeries>& series,
                                const std::string& title = "Binned density and least-squares fit");
/// One stack of nested boxes per summary, log-scaled.
std::string render_lettervalue_svg(const std::vector<DifferenceSummary>& summaries,
                                   const std::string& title);

enum class ReportFormat { csv, json, svg };
ReportFormat parse_report_format(std::string_view name);

/// Writes `table` as <dir>/<table.name>.<csv|json>. Throws IoFailure.
void emit(const Table& table, ReportFormat format, const std::filesystem::path& dir);

/// Writes every report for the snapshot into `dir`; returns the file names
/// written, sorted.
std::vector<std::string> write_reports(const Snapshot& snapshot, ReportFormat format,
                                       const std::filesystem::path& dir,
                                       const DisciplineMap* disciplines = nullptr,
                                       const ReportConfig& config = {});

/// Shortest round-trip decimal rendering used in every report.
std::string format_number(double value);

}  // namespace engage
