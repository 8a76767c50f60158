#include "engage/ident.hpp"

#include <algorithm>
#include <cctype>

namespace engage {

namespace {

constexpr std::array<std::string_view, 5> kResolverPrefixes{
    "https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/", "doi:"};

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// "10." registrant ("digits(.digits)*") "/" non-empty suffix, no whitespace.
bool valid_doi_shape(std::string_view s) {
  if (s.size() < 5 || s.substr(0, 3) != "10.") return false;
  if (std::any_of(s.begin(), s.end(), is_space)) return false;
  auto slash = s.find('/');
  if (slash == std::string_view::npos || slash + 1 >= s.size()) return false;
  auto registrant = s.substr(3, slash - 3);
  if (registrant.empty() || registrant.front() == '.' || registrant.back() == '.') return false;
  char prev = '.';
  for (char c : registrant) {
    if (c == '.' && prev == '.') return false;
    if (c != '.' && !is_digit(c)) return false;
    prev = c;
  }
  return true;
}

struct Pattern {
  std::string_view prefix;
  std::string_view suffix;
};

// Identifiers are substituted verbatim between prefix and suffix.
constexpr Pattern pattern_for(UrlKind kind) {
  switch (kind) {
    case UrlKind::doi: return {"https://doi.org/", ""};
    case UrlKind::doi_old: return {"http://dx.doi.org/", ""};
    case UrlKind::landing: return {"http://journals.plos.org/plosone/article?id=", ""};
    case UrlKind::authors: return {"http://journals.plos.org/plosone/article/authors?id=", ""};
    case UrlKind::metrics: return {"http://journals.plos.org/plosone/article/metrics?id=", ""};
    case UrlKind::comments: return {"http://journals.plos.org/plosone/article/comments?id=", ""};
    case UrlKind::related: return {"http://journals.plos.org/plosone/article/related?id=", ""};
    case UrlKind::pdf:
      return {"http://journals.plos.org/plosone/article/file?id=", "&type=printable"};
    case UrlKind::pubmed: return {"https://ncbi.nlm.nih.gov/pubmed/", ""};
    case UrlKind::pmc: return {"https://ncbi.nlm.nih.gov/pmc/articles/", "/"};
  }
  return {"", ""};
}

std::string substitute(UrlKind kind, std::string_view id) {
  auto p = pattern_for(kind);
  std::string url;
  url.reserve(p.prefix.size() + id.size() + p.suffix.size());
  url.append(p.prefix).append(id).append(p.suffix);
  return url;
}

}  // namespace

Doi Doi::parse(std::string_view raw) {
  while (!raw.empty() && is_space(raw.front())) raw.remove_prefix(1);
  while (!raw.empty() && is_space(raw.back())) raw.remove_suffix(1);
  if (raw.empty()) throw MalformedDoi("empty DOI");

  std::string value = lowercase(raw);
  for (auto prefix : kResolverPrefixes) {
    if (value.starts_with(prefix)) {
      value.erase(0, prefix.size());
      break;
    }
  }
  if (!valid_doi_shape(value)) throw MalformedDoi("not a DOI: " + std::string(raw));
  return Doi(std::move(value));
}

std::string_view to_string(UrlKind kind) {
  switch (kind) {
    case UrlKind::doi: return "doi";
    case UrlKind::doi_old: return "doi_old";
    case UrlKind::landing: return "landing";
    case UrlKind::authors: return "authors";
    case UrlKind::metrics: return "metrics";
    case UrlKind::comments: return "comments";
    case UrlKind::related: return "related";
    case UrlKind::pdf: return "pdf";
    case UrlKind::pubmed: return "pubmed";
    case UrlKind::pmc: return "pmc";
  }
  return "unknown";
}

UrlKind parse_url_kind(std::string_view name) {
  for (auto kind : kAllUrlKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw MalformedInput("unknown URL kind: " + std::string(name));
}

std::vector<UrlVariant> expand_urls(const IdBundle& bundle) {
  std::vector<UrlVariant> out;
  out.reserve(10);
  for (auto kind : kAllUrlKinds) {
    switch (kind) {
      case UrlKind::pubmed:
        if (bundle.pmid) out.push_back({kind, substitute(kind, *bundle.pmid)});
        break;
      case UrlKind::pmc:
        if (bundle.pmcid) out.push_back({kind, substitute(kind, *bundle.pmcid)});
        break;
      default:
        out.push_back({kind, substitute(kind, bundle.doi.str())});
    }
  }
  return out;
}

std::optional<std::string> extract_identifier(UrlKind kind, std::string_view url) {
  auto p = pattern_for(kind);
  if (url.size() <= p.prefix.size() + p.suffix.size()) return std::nullopt;
  if (!url.starts_with(p.prefix) || !url.ends_with(p.suffix)) return std::nullopt;
  url.remove_prefix(p.prefix.size());
  url.remove_suffix(p.suffix.size());
  return std::string(url);
}

std::string normalize_pmcid(std::string_view raw) {
  std::string_view digits = raw;
  if (digits.size() >= 3 && lowercase(digits.substr(0, 3)) == "pmc") digits.remove_prefix(3);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), is_digit)) {
    throw MalformedInput("not a PMCID: " + std::string(raw));
  }
  return "PMC" + std::string(digits);
}

IdBundle convert_ids(const Doi& doi, IdConverterSource& converter, const RetryPolicy& policy,
                     const Sleeper& sleep) {
  return convert_ids(IdBundle{doi, std::nullopt, std::nullopt, {}, Date{}}, converter, policy,
                     sleep);
}

IdBundle convert_ids(IdBundle base, IdConverterSource& converter, const RetryPolicy& policy,
                     const Sleeper& sleep) {
  auto mapping = call_with_retry<IdMapping>(policy, sleep, "id converter " + base.doi.str(),
                                            [&] { return converter.query(base.doi); });
  base.pmid = mapping.pmid;
  base.pmcid.reset();
  if (mapping.pmcid) base.pmcid = normalize_pmcid(*mapping.pmcid);
  return base;
}

std::vector<ArticleRecord> fetch_corpus(CorpusSource& source, const std::string& journal_key,
                                        const DateRange& window, const RetryPolicy& policy,
                                        const Sleeper& sleep, std::size_t page_size) {
  if (window.to < window.from) throw MalformedInput("corpus window start is after its end");
  if (page_size == 0) throw MalformedInput("corpus page size must be positive");

  CorpusQuery query{journal_key, window};
  std::vector<ArticleRecord> out;
  std::optional<std::size_t> total;
  while (!total || out.size() < *total) {
    const std::size_t start = out.size();
    std::optional<CorpusPage> accepted;
    bool saw_short_page = false;
    std::string last_reason;
    for (int attempt = 1; attempt <= policy.max_attempts && !accepted; ++attempt) {
      if (attempt > 1 && sleep) sleep(policy.delay_before_retry(attempt - 1));
      auto reply = source.page(query, start, page_size);
      if (auto* auth = std::get_if<AuthRejected>(&reply)) throw AuthFailure("corpus: " + auth->reason);
      if (auto* transient = std::get_if<TransientFailure>(&reply)) {
        last_reason = transient->reason;
        continue;
      }
      if (std::holds_alternative<Throttled>(reply)) {
        last_reason = "throttled";
        continue;
      }
      auto& page = std::get<CorpusPage>(reply);
      std::size_t known_total = total.value_or(page.total_found);
      std::size_t expected = known_total > start ? std::min(page_size, known_total - start) : 0;
      if (page.records.size() < expected) {
        saw_short_page = true;
        last_reason = "short page";
        continue;
      }
      accepted = std::move(page);
    }
    if (!accepted) {
      if (saw_short_page) {
        throw PartialPage("corpus page at offset " + std::to_string(start) +
                          " stayed truncated after " + std::to_string(policy.max_attempts) +
                          " attempts");
      }
      throw SourceUnavailable("corpus: retry budget exhausted (" + last_reason + ")");
    }
    if (!total) total = accepted->total_found;
    if (accepted->records.empty()) break;
    for (auto& r : accepted->records) out.push_back(std::move(r));
  }

  std::sort(out.begin(), out.end(), [](const ArticleRecord& a, const ArticleRecord& b) {
    if (a.bundle.publication_date != b.bundle.publication_date) {
      return a.bundle.publication_date < b.bundle.publication_date;
    }
    return a.bundle.doi < b.bundle.doi;
  });
  return out;
}

}  // namespace engage
