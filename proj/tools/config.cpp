#include "config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace engage::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

SourceMode parse_mode(const std::string& s) {
  if (s == "live") return SourceMode::live;
  if (s == "fixture") return SourceMode::fixture;
  if (s == "mock") return SourceMode::mock;
  throw MalformedInput("unknown source mode: " + s);
}

std::string resolve_path(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

}  // namespace

std::string_view to_string(SourceMode mode) {
  switch (mode) {
    case SourceMode::live: return "live";
    case SourceMode::fixture: return "fixture";
    case SourceMode::mock: return "mock";
  }
  return "unknown";
}

Config Config::defaults() {
  Config c;
  c.sources["corpus"] = {SourceMode::live, "http://api.plos.org", "", ""};
  c.sources["idconv"] = {SourceMode::live, "https://www.ncbi.nlm.nih.gov", "", "NCBI_API_KEY"};
  c.sources["graph"] = {SourceMode::live, "https://graph.facebook.com/v2.10", "", "FB_GRAPH_TOKEN"};
  c.sources["altmetric"] = {SourceMode::live, "https://api.altmetric.com", "", "ALTMETRIC_KEY"};
  return c;
}

Config Config::load(const std::filesystem::path& file) {
  Config c = defaults();
  std::ifstream in(file);
  if (!in) throw IoFailure("cannot open config " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw MalformedInput("config " + file.string() + ": " + e.what());
  }
  const auto base = file.parent_path();
  try {
    if (doc.contains("data_dir")) c.data_dir = resolve_path(base, doc["data_dir"].get<std::string>());
    if (doc.contains("sources")) {
      for (auto& [name, s] : doc["sources"].items()) {
        auto& sc = c.sources[name];
        if (s.contains("mode")) sc.mode = parse_mode(s["mode"].get<std::string>());
        if (s.contains("endpoint")) sc.endpoint = s["endpoint"].get<std::string>();
        if (s.contains("path")) sc.path = resolve_path(base, s["path"].get<std::string>());
        if (s.contains("credentials_env")) sc.credentials_env = s["credentials_env"].get<std::string>();
      }
    }
    if (doc.contains("binning")) {
      c.binning_k = doc["binning"].value("k", c.binning_k);
      c.binning_width = doc["binning"].value("width", c.binning_width);
    }
    if (doc.contains("coverage_rule")) {
      auto rule = doc["coverage_rule"].get<std::string>();
      if (rule == "shares_only") c.coverage_rule = CoverageRule::shares_only;
      else if (rule == "any_counter") c.coverage_rule = CoverageRule::any_counter;
      else throw MalformedInput("unknown coverage_rule: " + rule);
    }
    if (doc.contains("excluded_disciplines")) {
      c.excluded_disciplines = doc["excluded_disciplines"].get<std::vector<std::string>>();
    }
    if (doc.contains("retry")) {
      const auto& r = doc["retry"];
      c.retry.max_attempts = r.value("max_attempts", c.retry.max_attempts);
      c.retry.base_delay = std::chrono::milliseconds{r.value("base_delay_ms", c.retry.base_delay.count())};
      c.retry.backoff_factor = r.value("backoff_factor", c.retry.backoff_factor);
      if (r.contains("throttle_status_codes")) {
        c.retry.throttle_status_codes = r["throttle_status_codes"].get<std::set<int>>();
      }
    }
    c.parallel = doc.value("parallel", c.parallel);
    if (doc.contains("call_log")) c.call_log = resolve_path(base, doc["call_log"].get<std::string>());
  } catch (const json::exception& e) {
    throw MalformedInput("config " + file.string() + ": " + e.what());
  }
  c.retry.validate();
  return c;
}

const SourceConfig& Config::source(const std::string& name) const {
  auto it = sources.find(name);
  if (it == sources.end()) throw MalformedInput("no source configured for " + name);
  return it->second;
}

ReportConfig Config::report_config() const {
  ReportConfig r;
  r.coverage_rule = coverage_rule;
  r.excluded_disciplines = {excluded_disciplines.begin(), excluded_disciplines.end()};
  r.binning_k = binning_k;
  r.binning_width = binning_width;
  return r;
}

std::string Config::canonical_json() const {
  ordered_json o;
  o["sources"] = ordered_json::object();
  for (const auto& [name, s] : sources) {
    o["sources"][name] = {{"mode", std::string(to_string(s.mode))},
                          {"endpoint", s.endpoint},
                          {"path", s.path},
                          {"credentials_env", s.credentials_env}};
  }
  o["binning"] = {{"k", binning_k}, {"width", binning_width}};
  o["coverage_rule"] = coverage_rule == CoverageRule::shares_only ? "shares_only" : "any_counter";
  o["excluded_disciplines"] = excluded_disciplines;
  o["retry"] = {{"max_attempts", retry.max_attempts},
                {"base_delay_ms", retry.base_delay.count()},
                {"backoff_factor", retry.backoff_factor},
                {"throttle_status_codes", retry.throttle_status_codes}};
  o["parallel"] = parallel;
  return o.dump();
}

std::string Config::hash() const { return fnv1a_hex(canonical_json()); }

}  // namespace engage::cli
