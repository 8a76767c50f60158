#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "config.hpp"
#include "engage/harvest.hpp"
#include "engage/ident.hpp"
#include "engage/mockgraph.hpp"
#include "engage/report.hpp"
#include "engage/resolve.hpp"
#include "engage/store.hpp"

namespace engage::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCorpusFile = "corpus.jsonl";
constexpr const char* kBundlesFile = "bundles.jsonl";
constexpr const char* kUrlsFile = "urls.jsonl";
constexpr std::size_t kChunk = 256;

// Raised for operational failures that carry the stage and the failing key.
struct StageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::string data_dir;
  std::string snapshot;
  int parallel = 0;

  std::string journal = "PLoSONE";
  std::string from;
  std::string to;

  std::string doi;
  std::string pmid;
  std::string pmcid;

  std::string source;
  bool resume = false;
  std::size_t limit = 0;

  std::string analysis;
  std::string disciplines;
  std::string metric = "aes";
  std::string group_by;

  std::string format = "csv";
  std::string out_dir;
};

std::vector<std::string> read_nonempty_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + tmp.string());
    for (const auto& l : lines) out << l << '\n';
    if (!out.flush()) throw IoFailure("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string credential(const SourceConfig& s) {
  if (s.mode != SourceMode::live || s.credentials_env.empty()) return {};
  const char* v = std::getenv(s.credentials_env.c_str());
  return v ? v : "";
}

void require_path(const SourceConfig& s, const std::string& name) {
  if (s.path.empty()) throw MalformedInput("source '" + name + "' needs a path in fixture/mock mode");
}

std::string source_version(const SourceConfig& s) {
  switch (s.mode) {
    case SourceMode::live: return "live:" + s.endpoint;
    case SourceMode::fixture: return "fixture:" + fs::path(s.path).filename().string();
    case SourceMode::mock: return "mock:" + fs::path(s.path).filename().string();
  }
  return "unknown";
}

class Runner {
 public:
  Runner(Config config, Options opts, std::ostream& out, std::ostream& err)
      : config_(std::move(config)), opts_(std::move(opts)), out_(out), err_(err) {}

  fs::path data(const char* name) const { return config_.data_dir / name; }

  Date snapshot_date() const {
    return opts_.snapshot.empty() ? today_utc() : parse_date(opts_.snapshot);
  }

  Clock clock_for(const SourceConfig& s) const {
    if (s.mode == SourceMode::live) return system_clock_source();
    return fixed_clock(start_of_day(snapshot_date()));
  }

  int corpus() {
    const auto& s = config_.source("corpus");
    std::unique_ptr<CorpusSource> source;
    if (s.mode == SourceMode::live) {
      source = make_search_api_corpus(s.endpoint, credential(s));
    } else {
      require_path(s, "corpus");
      source = open_fixture_corpus(s.path);
    }
    DateRange window{parse_date(opts_.from), parse_date(opts_.to)};
    auto records = fetch_corpus(*source, opts_.journal, window, config_.retry);
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const auto& r : records) lines.push_back(article_to_json_line(r));
    write_lines(data(kCorpusFile), lines);
    err_ << "corpus: " << records.size() << " articles written to " << data(kCorpusFile).string() << "\n";
    return kExitOk;
  }

  int convert() {
    const auto& s = config_.source("idconv");
    std::unique_ptr<IdConverterSource> source;
    if (s.mode == SourceMode::live) {
      source = make_ncbi_converter(s.endpoint, credential(s));
    } else {
      require_path(s, "idconv");
      source = open_fixture_converter(s.path);
    }
    std::vector<std::string> lines;
    std::size_t with_pmid = 0;
    for (const auto& line : read_nonempty_lines(data(kCorpusFile))) {
      auto article = article_from_json_line(line);
      auto bundle = [&] {
        try {
          return convert_ids(article.bundle, *source, config_.retry);
        } catch (const Error& e) {
          throw StageError("convert " + article.bundle.doi.str() + ": " + e.what());
        }
      }();
      with_pmid += bundle.pmid.has_value();
      lines.push_back(bundle_to_json_line(bundle));
    }
    write_lines(data(kBundlesFile), lines);
    err_ << "convert: " << lines.size() << " bundles, " << with_pmid << " with a PMID\n";
    return kExitOk;
  }

  int expand() {
    if (!opts_.doi.empty()) {
      IdBundle b{Doi::parse(opts_.doi), std::nullopt, std::nullopt, {}, Date{}};
      if (!opts_.pmid.empty()) b.pmid = opts_.pmid;
      if (!opts_.pmcid.empty()) b.pmcid = normalize_pmcid(opts_.pmcid);
      for (const auto& v : expand_urls(b)) out_ << v.url << "\n";
      return kExitOk;
    }
    std::vector<std::string> lines;
    for (const auto& line : read_nonempty_lines(data(kBundlesFile))) {
      auto bundle = bundle_from_json_line(line);
      for (const auto& v : expand_urls(bundle)) {
        lines.push_back("{\"doi\":\"" + bundle.doi.str() + "\",\"kind\":\"" +
                        std::string(to_string(v.kind)) + "\",\"url\":" + json_string(v.url) + "}");
      }
    }
    write_lines(data(kUrlsFile), lines);
    err_ << "expand: " << lines.size() << " URLs written to " << data(kUrlsFile).string() << "\n";
    return kExitOk;
  }

  int harvest() {
    Store store(config_.data_dir);
    const Date snap = snapshot_date();
    int parallel = opts_.parallel > 0 ? opts_.parallel : config_.parallel;
    if (opts_.resume) {
      if (int n = store.repair_torn_tails(snap)) err_ << "harvest: repaired " << n << " torn file(s)\n";
    }
    int rc = opts_.source == "graph" ? harvest_graph(store, snap, parallel)
                                     : harvest_altmetric(store, snap, parallel);
    update_manifest(store, snap);
    return rc;
  }

  int resolve() {
    Store store(config_.data_dir);
    const Date snap = snapshot_date();
    std::vector<IdBundle> bundles;
    for (const auto& line : read_nonempty_lines(data(kBundlesFile))) bundles.push_back(bundle_from_json_line(line));

    auto urls = load_urls();
    auto latest = store.latest_graph(snap);
    std::set<std::string> done;
    std::size_t failed = 0;
    for (const auto& e : latest) {
      if (e.result.failed()) ++failed;
      else done.insert(e.result.queried_url);
    }
    std::size_t missing = 0;
    for (const auto& u : urls) missing += !done.count(u.url);
    if (missing) {
      throw StageError("resolve " + format_date(snap) + ": " + std::to_string(missing) + " URL(s) without a stored outcome (" +
                       std::to_string(failed) + " failed); run harvest --source graph --resume");
    }

    std::map<Doi, AltmetricRecord> altmetric;
    std::set<Doi> alt_done;
    for (const auto& e : store.latest_altmetric(snap)) {
      if (std::holds_alternative<LookupFailed>(e.outcome)) continue;
      alt_done.insert(e.doi);
      if (const auto* rec = std::get_if<AltmetricRecord>(&e.outcome)) altmetric.emplace(e.doi, *rec);
    }
    std::size_t alt_missing = 0;
    for (const auto& b : bundles) alt_missing += !alt_done.count(b.doi);
    if (alt_missing) {
      throw StageError("resolve " + format_date(snap) + ": " + std::to_string(alt_missing) +
                       " DOI(s) without a mention outcome; run harvest --source altmetric --resume");
    }

    std::vector<ArticleResult> graph;
    graph.reserve(latest.size());
    for (auto& e : latest) graph.push_back({e.doi, std::move(e.result)});
    auto resolved = resolve_snapshot(bundles, graph, altmetric, snap);
    store.append(resolved.records);
    store.write_ambiguity(snap, resolved.flags);
    update_manifest(store, snap);
    std::set<Doi> removed;
    for (const auto& f : resolved.flags) removed.insert(f.dois.begin(), f.dois.end());
    err_ << "resolve: " << resolved.records.size() << " records, " << resolved.flags.size()
         << " ambiguous object(s), " << removed.size() << " article(s) removed\n";
    return kExitOk;
  }

  int analyze() {
    Store store(config_.data_dir);
    auto snapshot = store.load(snapshot_date());
    auto rc = config_.report_config();
    std::optional<DisciplineMap> disciplines;
    if (!opts_.disciplines.empty()) disciplines = DisciplineMap::load_csv(opts_.disciplines);
    const DisciplineMap* dmap = disciplines ? &*disciplines : nullptr;

    GroupBy group = GroupBy::year;
    if (opts_.group_by == "all") group = GroupBy::all;
    else if (opts_.group_by == "discipline" || (opts_.group_by.empty() && dmap)) group = GroupBy::discipline;
    if (group == GroupBy::discipline && !dmap) {
      throw MalformedInput("--group-by discipline needs --disciplines <csv>");
    }

    const auto& kind = opts_.analysis;
    if (kind == "coverage") {
      out_ << render_csv(to_table(group == GroupBy::discipline
                                      ? coverage_by_discipline(snapshot, *dmap, rc)
                                      : coverage_table(snapshot, group == GroupBy::year, rc)));
    } else if (kind == "overlap") {
      out_ << render_csv(to_table(overlap_partition(snapshot, rc)));
    } else if (kind == "fbpartition") {
      out_ << render_csv(to_table(group == GroupBy::discipline
                                      ? fb_partition_by_discipline(snapshot, *dmap, rc)
                                      : fb_partition(snapshot, group == GroupBy::year, rc)));
    } else if (kind == "correlate") {
      out_ << render_csv(to_table(correlation_table(snapshot)));
    } else if (kind == "descriptive") {
      out_ << render_csv(to_table(descriptive_table(snapshot, rc)));
    } else if (kind == "powerlaw") {
      auto metric = parse_metric(opts_.metric);
      auto binned = log_bin(metric_vector(snapshot, metric), rc.binning_k, rc.binning_width);
      auto fit = fit_power_law(binned);
      char alpha[32];
      std::snprintf(alpha, sizeof alpha, "%.2f", fit.alpha);
      out_ << "metric=" << to_string(metric) << "\n"
           << "alpha=" << alpha << "\n"
           << "alpha_exact=" << format_number(fit.alpha) << "\n"
           << "intercept=" << format_number(fit.intercept) << "\n"
           << "x_min=" << fit.x_min << "\n"
           << "points_used=" << fit.points_used << "\n";
    } else if (kind == "lettervalues") {
      out_ << render_csv(to_table(difference_lettervalues(snapshot, group, dmap, rc)));
    } else if (kind == "compare") {
      out_ << render_csv(to_table(compare_counts(snapshot, group, dmap, rc)));
    }
    return kExitOk;
  }

  int report() {
    Store store(config_.data_dir);
    auto snapshot = store.load(snapshot_date());
    std::optional<DisciplineMap> disciplines;
    if (!opts_.disciplines.empty()) disciplines = DisciplineMap::load_csv(opts_.disciplines);
    auto written = write_reports(snapshot, parse_report_format(opts_.format), opts_.out_dir,
                                 disciplines ? &*disciplines : nullptr, config_.report_config());
    for (const auto& name : written) err_ << "report: wrote " << (fs::path(opts_.out_dir) / name).string() << "\n";
    return kExitOk;
  }

 private:
  struct UrlRow {
    Doi doi;
    UrlKind kind;
    std::string url;
  };

  static std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    return out + "\"";
  }

  std::vector<UrlRow> load_urls() const {
    std::vector<UrlRow> rows;
    for (const auto& line : read_nonempty_lines(data(kUrlsFile))) {
      // {"doi":...,"kind":...,"url":...} as written by expand
      auto field = [&](const std::string& key) {
        auto k = line.find("\"" + key + "\":\"");
        if (k == std::string::npos) throw MalformedInput("bad URL row: " + line);
        auto start = k + key.size() + 4;
        std::string v;
        for (auto i = start; i < line.size() && line[i] != '"'; ++i) {
          if (line[i] == '\\' && i + 1 < line.size()) ++i;
          v.push_back(line[i]);
        }
        return v;
      };
      rows.push_back({Doi::parse(field("doi")), parse_url_kind(field("kind")), field("url")});
    }
    return rows;
  }

  int harvest_graph(Store& store, const Date& snap, int parallel) {
    const auto& s = config_.source("graph");
    auto urls = load_urls();
    auto existing = store.latest_graph(snap);
    if (!existing.empty() && !opts_.resume) {
      throw StageError("harvest graph " + format_date(snap) +
                       ": snapshot already has stored outcomes; use --resume");
    }
    std::set<std::string> succeeded;
    for (const auto& e : existing) {
      if (!e.result.failed()) succeeded.insert(e.result.queried_url);
    }
    std::vector<UrlRow> todo;
    for (auto& u : urls) {
      if (!succeeded.count(u.url)) todo.push_back(std::move(u));
    }
    if (opts_.limit > 0 && todo.size() > opts_.limit) todo.erase(todo.begin() + static_cast<std::ptrdiff_t>(opts_.limit), todo.end());

    std::shared_ptr<MockGraph> mock;
    std::unique_ptr<EngagementSource> owned;
    EngagementSource* source = nullptr;
    if (s.mode == SourceMode::mock) {
      require_path(s, "graph");
      mock = std::make_shared<MockGraph>(FixtureWorld::load(s.path));
      source = mock.get();
    } else if (s.mode == SourceMode::fixture) {
      require_path(s, "graph");
      owned = open_fixture_engagement_source(s.path);
      source = owned.get();
    } else {
      owned = make_graph_api_source(s.endpoint, credential(s), config_.retry.throttle_status_codes);
      source = owned.get();
    }

    auto clock = clock_for(s);
    std::size_t found = 0, not_found = 0, failed = 0;
    for (std::size_t begin = 0; begin < todo.size(); begin += kChunk) {
      auto end = std::min(todo.size(), begin + kChunk);
      std::vector<std::string> batch;
      for (auto i = begin; i < end; ++i) batch.push_back(todo[i].url);
      auto results = harvest_batch(batch, *source, config_.retry, parallel, thread_sleeper(), clock);
      std::vector<RawGraphEntry> entries;
      for (auto i = begin; i < end; ++i) {
        auto& r = results[i - begin];
        if (r.found()) ++found;
        else if (r.failed()) ++failed;
        else ++not_found;
        entries.push_back({todo[i].doi, todo[i].kind, std::move(r)});
      }
      store.append_graph(snap, entries);
    }
    if (mock && !config_.call_log.empty()) {
      std::ofstream log(config_.call_log, std::ios::app);
      for (const auto& u : mock->call_log()) log << u << "\n";
    }
    err_ << "harvest graph: " << todo.size() << " URL(s) queried; found " << found << ", not found "
         << not_found << ", failed " << failed << "\n";
    if (failed) err_ << "harvest graph: " << failed << " URL(s) pending; rerun with --resume\n";
    return kExitOk;
  }

  int harvest_altmetric(Store& store, const Date& snap, int parallel) {
    const auto& s = config_.source("altmetric");
    std::vector<Doi> dois;
    for (const auto& line : read_nonempty_lines(data(kBundlesFile))) dois.push_back(bundle_from_json_line(line).doi);
    auto existing = store.latest_altmetric(snap);
    if (!existing.empty() && !opts_.resume) {
      throw StageError("harvest altmetric " + format_date(snap) +
                       ": snapshot already has stored outcomes; use --resume");
    }
    std::set<Doi> succeeded;
    for (const auto& e : existing) {
      if (!std::holds_alternative<LookupFailed>(e.outcome)) succeeded.insert(e.doi);
    }
    std::vector<Doi> todo;
    for (auto& d : dois) {
      if (!succeeded.count(d)) todo.push_back(std::move(d));
    }
    if (opts_.limit > 0 && todo.size() > opts_.limit) todo.erase(todo.begin() + static_cast<std::ptrdiff_t>(opts_.limit), todo.end());

    std::unique_ptr<MentionSource> source;
    if (s.mode == SourceMode::live) {
      source = make_altmetric_api_source(s.endpoint, credential(s));
    } else {
      require_path(s, "altmetric");
      source = open_fixture_mention_source(s.path);
    }
    auto clock = clock_for(s);
    std::size_t found = 0, failed = 0;
    for (std::size_t begin = 0; begin < todo.size(); begin += kChunk) {
      auto end = std::min(todo.size(), begin + kChunk);
      std::vector<Doi> batch(todo.begin() + static_cast<std::ptrdiff_t>(begin),
                             todo.begin() + static_cast<std::ptrdiff_t>(end));
      auto results = harvest_altmetric_batch(batch, *source, config_.retry, parallel, thread_sleeper(), clock);
      for (const auto& r : results) {
        found += std::holds_alternative<AltmetricRecord>(r.outcome);
        failed += std::holds_alternative<LookupFailed>(r.outcome);
      }
      store.append_altmetric(snap, results);
    }
    err_ << "harvest altmetric: " << todo.size() << " DOI(s) queried; records " << found << ", failed "
         << failed << "\n";
    if (failed) err_ << "harvest altmetric: " << failed << " DOI(s) pending; rerun with --resume\n";
    return kExitOk;
  }

  void update_manifest(Store& store, const Date& snap) {
    Manifest m{snap, {}, config_.hash()};
    if (auto existing = store.read_manifest(snap)) m.source_versions = existing->source_versions;
    for (const char* name : {"graph", "altmetric"}) {
      if (config_.sources.count(name)) m.source_versions[name] = source_version(config_.source(name));
    }
    store.write_manifest(m);
  }

  Config config_;
  Options opts_;
  std::ostream& out_;
  std::ostream& err_;
};

CLI::Validator date_validator() {
  return CLI::Validator(
      [](std::string& v) -> std::string {
        try {
          parse_date(v);
          return {};
        } catch (const Error&) {
          return "expected a date YYYY-MM-DD, got '" + v + "'";
        }
      },
      "DATE");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harvest and analyze per-article social-engagement counts", "engage"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--data-dir", o.data_dir, "Data directory (overrides config)");

  auto* corpus = app.add_subcommand("corpus", "Fetch the article corpus of one journal");
  corpus->add_option("--journal", o.journal, "Journal key")->capture_default_str();
  corpus->add_option("--from", o.from, "Window start")->required()->check(date_validator());
  corpus->add_option("--to", o.to, "Window end")->required()->check(date_validator());

  app.add_subcommand("convert", "Attach PMID/PMCID to every corpus DOI");

  auto* expand = app.add_subcommand("expand", "Expand identifiers into URL variants");
  expand->add_option("--doi", o.doi, "Print the variants of a single DOI");
  expand->add_option("--pmid", o.pmid, "PubMed ID for --doi");
  expand->add_option("--pmcid", o.pmcid, "PubMed Central ID for --doi");

  auto* harvest = app.add_subcommand("harvest", "Query an engagement source for one snapshot");
  harvest->add_option("--source", o.source, "graph or altmetric")->required()->check(CLI::IsMember({"graph", "altmetric"}));
  harvest->add_option("--snapshot", o.snapshot, "Snapshot date (default: today, UTC)")->check(date_validator());
  harvest->add_flag("--resume", o.resume, "Only query items without a stored success");
  harvest->add_option("--parallel", o.parallel, "Requests in flight")->check(CLI::PositiveNumber);
  harvest->add_option("--limit", o.limit, "Stop after this many items (0 = all)");

  auto* resolve = app.add_subcommand("resolve", "Resolve graph objects into per-article records");
  resolve->add_option("--snapshot", o.snapshot, "Snapshot date (default: today, UTC)")->check(date_validator());

  auto* analyze = app.add_subcommand("analyze", "Print one analysis as CSV");
  analyze->add_option("kind", o.analysis, "Analysis")
      ->required()
      ->check(CLI::IsMember({"coverage", "overlap", "fbpartition", "correlate", "powerlaw", "lettervalues",
                             "compare", "descriptive"}));
  analyze->add_option("--snapshot", o.snapshot, "Snapshot date (default: today, UTC)")->check(date_validator());
  analyze->add_option("--disciplines", o.disciplines, "Discipline CSV")->check(CLI::ExistingFile);
  analyze->add_option("--metric", o.metric, "aes, pos or tw")->check(CLI::IsMember({"aes", "pos", "tw"}));
  analyze->add_option("--group-by", o.group_by, "all, year or discipline")
      ->check(CLI::IsMember({"all", "year", "discipline"}));

  auto* report = app.add_subcommand("report", "Write every report for a snapshot");
  report->add_option("--format", o.format, "csv, json or svg")->required()->check(CLI::IsMember({"csv", "json", "svg"}));
  report->add_option("--out", o.out_dir, "Output directory")->required();
  report->add_option("--snapshot", o.snapshot, "Snapshot date (default: today, UTC)")->check(date_validator());
  report->add_option("--disciplines", o.disciplines, "Discipline CSV")->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "engage: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    Config config = o.config_path.empty() ? Config::defaults() : Config::load(o.config_path);
    if (!o.data_dir.empty()) config.data_dir = o.data_dir;
    Runner runner(std::move(config), o, out, err);
    if (stage == "corpus") return runner.corpus();
    if (stage == "convert") return runner.convert();
    if (stage == "expand") return runner.expand();
    if (stage == "harvest") return runner.harvest();
    if (stage == "resolve") return runner.resolve();
    if (stage == "analyze") return runner.analyze();
    if (stage == "report") return runner.report();
  } catch (const MalformedDoi& e) {
    err << "engage " << stage << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "engage " << stage << ": " << e.what() << "\n";
    return kExitOperational;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace engage::cli
