#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "engage/report.hpp"
#include "engage/retry.hpp"

namespace engage::cli {

enum class SourceMode { live, fixture, mock };

struct SourceConfig {
  SourceMode mode = SourceMode::live;
  std::string endpoint;         // live mode base URL
  std::string path;             // fixture or mock-world file
  std::string credentials_env;  // env var holding the credential, live mode only
};

/// Effective configuration: defaults, overlaid by the --config JSON file,
/// overlaid by command-line flags.
struct Config {
  std::filesystem::path data_dir = "data";
  std::map<std::string, SourceConfig> sources;  // corpus, idconv, graph, altmetric
  int binning_k = 5;
  double binning_width = 0.11;
  CoverageRule coverage_rule = CoverageRule::shares_only;
  std::vector<std::string> excluded_disciplines{"Arts", "Humanities"};
  RetryPolicy retry;
  int parallel = 4;
  std::string call_log;  // mock mode: file receiving every queried URL

  static Config defaults();
  /// Relative paths inside the file resolve against the file's directory.
  static Config load(const std::filesystem::path& file);

  const SourceConfig& source(const std::string& name) const;
  ReportConfig report_config() const;
  /// Canonical JSON of the effective configuration (stable key order).
  std::string canonical_json() const;
  std::string hash() const;
};

std::string_view to_string(SourceMode mode);

}  // namespace engage::cli
