#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "engage/resolve.hpp"

namespace engage {

/// One dated, immutable harvest.
struct Snapshot {
  Date snapshot_date;
  std::map<std::string, std::string> source_versions;
  std::map<Doi, EngagementRecord> records;
  /// Set when loaded with LoadMode::clean_prefix and a bad line was skipped.
  std::optional<std::size_t> corrupt_line;
};

/// A raw per-URL harvest outcome as persisted in raw_graph.jsonl.
struct RawGraphEntry {
  Doi doi;
  UrlKind kind;
  GraphObjectResult result;
};

struct Manifest {
  Date snapshot_date;
  std::map<std::string, std::string> source_versions;
  std::string config_hash;
};

enum class LoadMode {
  strict,        // any bad line throws CorruptRecord
  clean_prefix,  // stop at the first bad line and report it
};

/// Append-only JSON-lines store laid out as
/// <data_dir>/<snapshot_date>/{records,raw_graph,raw_altmetric}.jsonl plus
/// manifest.json. Writers serialize on an advisory lock file per snapshot.
class Store {
 public:
  explicit Store(std::filesystem::path data_dir);

  const std::filesystem::path& data_dir() const { return data_dir_; }
  std::filesystem::path snapshot_dir(const Date& d) const;
  bool has_snapshot(const Date& d) const;

  /// Throws DuplicateKey if (doi, snapshot_date) is already stored.
  void append(const EngagementRecord& record);
  void append(std::span<const EngagementRecord> records);

  /// Throws NotFound when the snapshot has no records file.
  Snapshot load(const Date& d, LoadMode mode = LoadMode::strict) const;

  void append_graph(const Date& d, std::span<const RawGraphEntry> entries);
  std::vector<RawGraphEntry> load_graph(const Date& d) const;
  /// The last stored outcome for every URL, in first-seen order.
  std::vector<RawGraphEntry> latest_graph(const Date& d) const;
  /// URLs whose last outcome is LookupFailed.
  std::vector<std::string> pending_urls(const Date& d) const;

  void append_altmetric(const Date& d, std::span<const AltmetricOutcome> entries);
  std::vector<AltmetricOutcome> load_altmetric(const Date& d) const;
  std::vector<AltmetricOutcome> latest_altmetric(const Date& d) const;
  std::vector<Doi> pending_dois(const Date& d) const;

  void write_ambiguity(const Date& d, std::span<const AmbiguityFlag> flags);
  std::vector<AmbiguityFlag> load_ambiguity(const Date& d) const;

  void write_manifest(const Manifest& m);
  std::optional<Manifest> read_manifest(const Date& d) const;

  /// Truncates a torn trailing line in every JSON-lines file of the
  /// snapshot. Returns the number of files repaired.
  int repair_torn_tails(const Date& d);

 private:
  void append_lines(const Date& d, const char* file, const std::vector<std::string>& lines);

  std::filesystem::path data_dir_;
  mutable std::mutex mutex_;
  std::map<Date, std::set<Doi>> record_keys_;
};

std::string record_to_json_line(const EngagementRecord& record);
EngagementRecord record_from_json_line(std::string_view line);

std::string raw_graph_to_json_line(const Date& snapshot, const RawGraphEntry& entry);
RawGraphEntry raw_graph_from_json_line(std::string_view line);

std::string raw_altmetric_to_json_line(const Date& snapshot, const AltmetricOutcome& entry);
AltmetricOutcome raw_altmetric_from_json_line(std::string_view line);

/// 64-bit FNV-1a over `text`, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace engage
