#include "engage/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "jsonio.hpp"

namespace engage {

namespace fs = std::filesystem;
using detail::json;
using detail::ordered_json;

namespace {

constexpr const char* kRecords = "records.jsonl";
constexpr const char* kRawGraph = "raw_graph.jsonl";
constexpr const char* kRawAltmetric = "raw_altmetric.jsonl";
constexpr const char* kAmbiguous = "ambiguous.jsonl";
constexpr const char* kManifest = "manifest.json";
constexpr const char* kLock = ".lock";

class FileLock {
 public:
  explicit FileLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoFailure("cannot open lock " + path.string() + ": " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw IoFailure("cannot lock " + path.string() + ": " + std::strerror(errno));
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

struct ParsedLines {
  std::vector<std::string> lines;
  bool torn_tail = false;
};

ParsedLines split_file(const fs::path& path) {
  ParsedLines out;
  std::string content = detail::read_file(path.string());
  out.torn_tail = !content.empty() && content.back() != '\n';
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string::npos) nl = content.size();
    out.lines.push_back(content.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

// Parses every line with `parse`; a torn tail or an unparseable line raises
// CorruptRecord, or ends the read in clean_prefix mode.
template <class T, class Parse>
std::vector<T> parse_file(const fs::path& path, Parse&& parse, LoadMode mode,
                          std::optional<std::size_t>* bad_line = nullptr) {
  std::vector<T> out;
  if (!fs::exists(path)) return out;
  auto parsed = split_file(path);
  for (std::size_t i = 0; i < parsed.lines.size(); ++i) {
    bool last = i + 1 == parsed.lines.size();
    bool ok = !(last && parsed.torn_tail);
    if (ok) {
      try {
        out.push_back(parse(parsed.lines[i]));
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      if (mode == LoadMode::strict) throw CorruptRecord(path.string(), i + 1);
      if (bad_line) *bad_line = i + 1;
      break;
    }
  }
  return out;
}

ordered_json counts_json(const EngagementCounts& c) {
  ordered_json o;
  o["shares"] = c.shares;
  o["reactions"] = c.reactions;
  o["comments"] = c.comments;
  o["plugin_comments"] = c.plugin_comments;
  return o;
}

EngagementCounts counts_from(const json& o, std::string_view ctx) {
  return {detail::get_count(o, "shares", ctx), detail::get_count(o, "reactions", ctx),
          detail::get_count(o, "comments", ctx), detail::get_count(o, "plugin_comments", ctx)};
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string record_to_json_line(const EngagementRecord& r) {
  ordered_json o;
  o["doi"] = r.doi.str();
  o["snapshot_date"] = format_date(r.snapshot_date);
  if (r.publication_date) o["publication_date"] = format_date(*r.publication_date);
  o["aes_shares"] = r.aes.shares;
  o["aes_reactions"] = r.aes.reactions;
  o["aes_comments"] = r.aes.comments;
  o["aes_plugin_comments"] = r.aes.plugin_comments;
  if (r.pos_mentions) o["pos_mentions"] = *r.pos_mentions;
  if (r.tweets) o["tweets"] = *r.tweets;
  o["object_ids"] = ordered_json::array();
  for (const auto& id : r.object_ids) o["object_ids"].push_back(id);
  return detail::dump_compact(o);
}

EngagementRecord record_from_json_line(std::string_view line) {
  constexpr std::string_view ctx = "engagement record";
  auto o = detail::parse_json(line, ctx);
  try {
    EngagementRecord r{Doi::parse(o.at("doi").get<std::string>()),
                       parse_date(o.at("snapshot_date").get<std::string>()),
                       std::nullopt,
                       {detail::get_count(o, "aes_shares", ctx),
                        detail::get_count(o, "aes_reactions", ctx),
                        detail::get_count(o, "aes_comments", ctx),
                        detail::get_count(o, "aes_plugin_comments", ctx)},
                       std::nullopt,
                       std::nullopt,
                       {}};
    if (o.contains("publication_date")) {
      r.publication_date = parse_date(o["publication_date"].get<std::string>());
    }
    if (o.contains("pos_mentions")) r.pos_mentions = detail::get_count(o, "pos_mentions", ctx);
    if (o.contains("tweets")) r.tweets = detail::get_count(o, "tweets", ctx);
    for (const auto& id : o.at("object_ids")) r.object_ids.insert(id.get<std::string>());
    return r;
  } catch (const json::exception& e) {
    throw MalformedInput(std::string(ctx) + ": " + e.what());
  }
}

std::string raw_graph_to_json_line(const Date& snapshot, const RawGraphEntry& e) {
  ordered_json o;
  o["snapshot_date"] = format_date(snapshot);
  o["doi"] = e.doi.str();
  o["kind"] = std::string(to_string(e.kind));
  o["url"] = e.result.queried_url;
  if (const auto* obj = e.result.found()) {
    o["outcome"] = "found";
    o["object_id"] = obj->object_id;
    auto counts = counts_json(obj->counts);
    for (auto& [k, v] : counts.items()) o[k] = v;
    o["fetched_at"] = format_timestamp(obj->fetched_at);
  } else if (const auto* f = e.result.failed()) {
    o["outcome"] = "failed";
    o["reason"] = f->reason;
  } else {
    o["outcome"] = "not_found";
  }
  return detail::dump_compact(o);
}

RawGraphEntry raw_graph_from_json_line(std::string_view line) {
  constexpr std::string_view ctx = "raw graph entry";
  auto o = detail::parse_json(line, ctx);
  try {
    RawGraphEntry e{Doi::parse(o.at("doi").get<std::string>()),
                    parse_url_kind(o.at("kind").get<std::string>()),
                    {o.at("url").get<std::string>(), ObjectNotFound{}}};
    auto outcome = o.at("outcome").get<std::string>();
    if (outcome == "found") {
      e.result.outcome = GraphObject{o.at("object_id").get<std::string>(), e.result.queried_url,
                                     counts_from(o, ctx),
                                     parse_timestamp(o.at("fetched_at").get<std::string>())};
    } else if (outcome == "failed") {
      e.result.outcome = LookupFailed{o.value("reason", std::string{})};
    } else if (outcome != "not_found") {
      throw MalformedInput("unknown outcome: " + outcome);
    }
    return e;
  } catch (const json::exception& ex) {
    throw MalformedInput(std::string(ctx) + ": " + ex.what());
  }
}

std::string raw_altmetric_to_json_line(const Date& snapshot, const AltmetricOutcome& e) {
  ordered_json o;
  o["snapshot_date"] = format_date(snapshot);
  o["doi"] = e.doi.str();
  if (const auto* rec = std::get_if<AltmetricRecord>(&e.outcome)) {
    o["outcome"] = "found";
    o["pos"] = rec->pos_mentions;
    o["tw"] = rec->tweets;
    o["fetched_at"] = format_timestamp(rec->fetched_at);
  } else if (const auto* f = std::get_if<LookupFailed>(&e.outcome)) {
    o["outcome"] = "failed";
    o["reason"] = f->reason;
  } else {
    o["outcome"] = "none";
  }
  return detail::dump_compact(o);
}

AltmetricOutcome raw_altmetric_from_json_line(std::string_view line) {
  constexpr std::string_view ctx = "raw altmetric entry";
  auto o = detail::parse_json(line, ctx);
  try {
    auto doi = Doi::parse(o.at("doi").get<std::string>());
    AltmetricOutcome e{doi, ObjectNotFound{}};
    auto outcome = o.at("outcome").get<std::string>();
    if (outcome == "found") {
      e.outcome = AltmetricRecord{doi, detail::get_count(o, "pos", ctx),
                                  detail::get_count(o, "tw", ctx),
                                  parse_timestamp(o.at("fetched_at").get<std::string>())};
    } else if (outcome == "failed") {
      e.outcome = LookupFailed{o.value("reason", std::string{})};
    } else if (outcome != "none") {
      throw MalformedInput("unknown outcome: " + outcome);
    }
    return e;
  } catch (const json::exception& ex) {
    throw MalformedInput(std::string(ctx) + ": " + ex.what());
  }
}

Store::Store(fs::path data_dir) : data_dir_(std::move(data_dir)) {}

fs::path Store::snapshot_dir(const Date& d) const { return data_dir_ / format_date(d); }

bool Store::has_snapshot(const Date& d) const { return fs::exists(snapshot_dir(d) / kRecords); }

void Store::append_lines(const Date& d, const char* file, const std::vector<std::string>& lines) {
  auto dir = snapshot_dir(d);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());

  FileLock lock(dir / kLock);
  auto path = dir / file;
  if (fs::exists(path) && fs::file_size(path) > 0) {
    std::ifstream in(path, std::ios::binary);
    in.seekg(-1, std::ios::end);
    char last = 0;
    in.get(last);
    if (last != '\n') throw CorruptRecord(path.string(), split_file(path).lines.size());
  }
  std::string blob;
  for (const auto& l : lines) blob.append(l).push_back('\n');
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoFailure("cannot open " + path.string());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  out.flush();
  if (!out) throw IoFailure("write failed: " + path.string());
}

void Store::append(const EngagementRecord& record) { append(std::span(&record, 1)); }

void Store::append(std::span<const EngagementRecord> records) {
  if (records.empty()) return;
  std::lock_guard guard(mutex_);
  std::map<Date, std::vector<const EngagementRecord*>> by_date;
  for (const auto& r : records) by_date[r.snapshot_date].push_back(&r);

  for (auto& [date, batch] : by_date) {
    auto it = record_keys_.find(date);
    if (it == record_keys_.end()) {
      std::set<Doi> keys;
      for (const auto& r : parse_file<EngagementRecord>(snapshot_dir(date) / kRecords,
                                                        record_from_json_line, LoadMode::strict)) {
        keys.insert(r.doi);
      }
      it = record_keys_.emplace(date, std::move(keys)).first;
    }
    std::set<Doi> incoming;
    for (const auto* r : batch) {
      if (it->second.count(r->doi) || !incoming.insert(r->doi).second) {
        throw DuplicateKey("record already stored for (" + r->doi.str() + ", " +
                           format_date(date) + ")");
      }
    }
    std::vector<std::string> lines;
    lines.reserve(batch.size());
    for (const auto* r : batch) lines.push_back(record_to_json_line(*r));
    append_lines(date, kRecords, lines);
    it->second.insert(incoming.begin(), incoming.end());
  }
}

Snapshot Store::load(const Date& d, LoadMode mode) const {
  auto path = snapshot_dir(d) / kRecords;
  if (!fs::exists(path)) throw NotFound("no snapshot records for " + format_date(d));
  Snapshot snap{d, {}, {}, std::nullopt};
  auto records = parse_file<EngagementRecord>(path, record_from_json_line, mode, &snap.corrupt_line);
  for (auto& r : records) {
    auto doi = r.doi;
    snap.records.emplace(std::move(doi), std::move(r));
  }
  if (auto m = read_manifest(d)) snap.source_versions = m->source_versions;
  return snap;
}

void Store::append_graph(const Date& d, std::span<const RawGraphEntry> entries) {
  if (entries.empty()) return;
  std::vector<std::string> lines;
  lines.reserve(entries.size());
  for (const auto& e : entries) lines.push_back(raw_graph_to_json_line(d, e));
  std::lock_guard guard(mutex_);
  append_lines(d, kRawGraph, lines);
}

std::vector<RawGraphEntry> Store::load_graph(const Date& d) const {
  return parse_file<RawGraphEntry>(snapshot_dir(d) / kRawGraph, raw_graph_from_json_line,
                                   LoadMode::strict);
}

std::vector<RawGraphEntry> Store::latest_graph(const Date& d) const {
  std::vector<RawGraphEntry> out;
  std::map<std::string, std::size_t> slot;
  for (auto& e : load_graph(d)) {
    auto [it, inserted] = slot.emplace(e.result.queried_url, out.size());
    if (inserted) {
      out.push_back(std::move(e));
    } else {
      out[it->second] = std::move(e);
    }
  }
  return out;
}

std::vector<std::string> Store::pending_urls(const Date& d) const {
  std::vector<std::string> out;
  for (const auto& e : latest_graph(d)) {
    if (e.result.failed()) out.push_back(e.result.queried_url);
  }
  return out;
}

void Store::append_altmetric(const Date& d, std::span<const AltmetricOutcome> entries) {
  if (entries.empty()) return;
  std::vector<std::string> lines;
  lines.reserve(entries.size());
  for (const auto& e : entries) lines.push_back(raw_altmetric_to_json_line(d, e));
  std::lock_guard guard(mutex_);
  append_lines(d, kRawAltmetric, lines);
}

std::vector<AltmetricOutcome> Store::load_altmetric(const Date& d) const {
  return parse_file<AltmetricOutcome>(snapshot_dir(d) / kRawAltmetric,
                                      raw_altmetric_from_json_line, LoadMode::strict);
}

std::vector<AltmetricOutcome> Store::latest_altmetric(const Date& d) const {
  std::vector<AltmetricOutcome> out;
  std::map<Doi, std::size_t> slot;
  for (auto& e : load_altmetric(d)) {
    auto [it, inserted] = slot.emplace(e.doi, out.size());
    if (inserted) {
      out.push_back(std::move(e));
    } else {
      out[it->second] = std::move(e);
    }
  }
  return out;
}

std::vector<Doi> Store::pending_dois(const Date& d) const {
  std::vector<Doi> out;
  for (const auto& e : latest_altmetric(d)) {
    if (std::holds_alternative<LookupFailed>(e.outcome)) out.push_back(e.doi);
  }
  return out;
}

void Store::write_ambiguity(const Date& d, std::span<const AmbiguityFlag> flags) {
  std::string blob;
  for (const auto& f : flags) {
    ordered_json o;
    o["object_id"] = f.object_id;
    o["dois"] = ordered_json::array();
    for (const auto& doi : f.dois) o["dois"].push_back(doi.str());
    blob += detail::dump_compact(o);
    blob.push_back('\n');
  }
  std::lock_guard guard(mutex_);
  fs::create_directories(snapshot_dir(d));
  FileLock lock(snapshot_dir(d) / kLock);
  detail::write_file_atomic((snapshot_dir(d) / kAmbiguous).string(), blob);
}

std::vector<AmbiguityFlag> Store::load_ambiguity(const Date& d) const {
  return parse_file<AmbiguityFlag>(
      snapshot_dir(d) / kAmbiguous,
      [](std::string_view line) {
        auto o = detail::parse_json(line, "ambiguity flag");
        AmbiguityFlag f{o.at("object_id").get<std::string>(), {}};
        for (const auto& doi : o.at("dois")) f.dois.insert(Doi::parse(doi.get<std::string>()));
        return f;
      },
      LoadMode::strict);
}

void Store::write_manifest(const Manifest& m) {
  ordered_json o;
  o["snapshot_date"] = format_date(m.snapshot_date);
  o["source_versions"] = ordered_json::object();
  for (const auto& [k, v] : m.source_versions) o["source_versions"][k] = v;
  o["config_hash"] = m.config_hash;
  std::lock_guard guard(mutex_);
  fs::create_directories(snapshot_dir(m.snapshot_date));
  FileLock lock(snapshot_dir(m.snapshot_date) / kLock);
  detail::write_file_atomic((snapshot_dir(m.snapshot_date) / kManifest).string(),
                            o.dump(2) + "\n");
}

std::optional<Manifest> Store::read_manifest(const Date& d) const {
  auto path = snapshot_dir(d) / kManifest;
  if (!fs::exists(path)) return std::nullopt;
  auto o = detail::parse_json(detail::read_file(path.string()), path.string());
  Manifest m{parse_date(o.at("snapshot_date").get<std::string>()), {},
             o.value("config_hash", std::string{})};
  if (o.contains("source_versions")) {
    for (auto& [k, v] : o["source_versions"].items()) m.source_versions[k] = v.get<std::string>();
  }
  return m;
}

int Store::repair_torn_tails(const Date& d) {
  std::lock_guard guard(mutex_);
  auto dir = snapshot_dir(d);
  if (!fs::exists(dir)) return 0;
  FileLock lock(dir / kLock);
  int repaired = 0;
  for (const char* name : {kRecords, kRawGraph, kRawAltmetric}) {
    auto path = dir / name;
    if (!fs::exists(path)) continue;
    std::string content = detail::read_file(path.string());
    if (content.empty() || content.back() == '\n') continue;
    auto keep = content.rfind('\n');
    fs::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
    ++repaired;
  }
  record_keys_.erase(d);
  return repaired;
}

}  // namespace engage
