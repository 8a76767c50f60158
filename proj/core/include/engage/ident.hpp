#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "engage/date.hpp"
#include "engage/retry.hpp"

namespace engage {

/// A DOI stored lowercase and without a resolver prefix.
class Doi {
 public:
  /// Strips "https://doi.org/", "http://dx.doi.org/" and friends, lowercases,
  /// and checks the "10.<registrant>/<suffix>" shape. Throws MalformedDoi.
  static Doi parse(std::string_view raw);

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const Doi&, const Doi&) = default;
  friend auto operator<=>(const Doi&, const Doi&) = default;

 private:
  explicit Doi(std::string value) : value_(std::move(value)) {}
  std::string value_;
};

struct IdBundle {
  Doi doi;
  std::optional<std::string> pmid;
  std::optional<std::string> pmcid;
  std::string title;
  Date publication_date;
};

/// The URL forms an article can be shared under, in output order.
enum class UrlKind { doi, doi_old, landing, authors, metrics, comments, related, pdf, pubmed, pmc };

inline constexpr std::array<UrlKind, 10> kAllUrlKinds{
    UrlKind::doi,      UrlKind::doi_old, UrlKind::landing, UrlKind::authors, UrlKind::metrics,
    UrlKind::comments, UrlKind::related, UrlKind::pdf,     UrlKind::pubmed,  UrlKind::pmc};

std::string_view to_string(UrlKind kind);
UrlKind parse_url_kind(std::string_view name);

struct UrlVariant {
  UrlKind kind;
  std::string url;

  friend bool operator==(const UrlVariant&, const UrlVariant&) = default;
};

struct ArticleRecord {
  IdBundle bundle;
  std::vector<std::string> authors;
  std::string doc_type;
};

/// Returns the 8, 9 or 10 URL variants for `bundle`, in kAllUrlKinds order.
std::vector<UrlVariant> expand_urls(const IdBundle& bundle);

/// Inverse of the URL patterns: recovers the substituted identifier, or
/// nullopt when `url` does not match the pattern for `kind`.
std::optional<std::string> extract_identifier(UrlKind kind, std::string_view url);

/// Accepts "PMC123", "pmc123" or "123"; returns "PMC123". Throws MalformedInput.
std::string normalize_pmcid(std::string_view raw);

// ---------------------------------------------------------------------------
// Identifier conversion (DOI -> PMID/PMCID)

struct IdMapping {
  std::optional<std::string> pmid;
  std::optional<std::string> pmcid;
};

class IdConverterSource {
 public:
  virtual ~IdConverterSource() = default;
  /// An empty IdMapping means the converter knows no mapping for the DOI.
  virtual Reply<IdMapping> query(const Doi& doi) = 0;
};

/// Fills pmid/pmcid from the converter. A missing mapping is not an error.
IdBundle convert_ids(const Doi& doi, IdConverterSource& converter, const RetryPolicy& policy,
                     const Sleeper& sleep = thread_sleeper());

/// Keeps title and date from `base` and fills its identifiers.
IdBundle convert_ids(IdBundle base, IdConverterSource& converter, const RetryPolicy& policy,
                     const Sleeper& sleep = thread_sleeper());

/// JSON-lines file of {"doi", "pmid", "pmcid"} objects.
std::unique_ptr<IdConverterSource> open_fixture_converter(const std::string& path);

/// NCBI ID converter over HTTPS. `api_key` may be empty.
std::unique_ptr<IdConverterSource> make_ncbi_converter(std::string base_url, std::string api_key);

// ---------------------------------------------------------------------------
// Corpus retrieval

struct CorpusQuery {
  std::string journal_key;
  DateRange window;
};

struct CorpusPage {
  std::vector<ArticleRecord> records;
  std::size_t total_found = 0;  // across all pages
};

class CorpusSource {
 public:
  virtual ~CorpusSource() = default;
  virtual Reply<CorpusPage> page(const CorpusQuery& query, std::size_t start,
                                 std::size_t rows) = 0;
};

/// Full documents of one journal in the window, ordered by
/// (publication_date, doi). Throws PartialPage when a page comes back short
/// and re-requests do not fix it.
std::vector<ArticleRecord> fetch_corpus(CorpusSource& source, const std::string& journal_key,
                                        const DateRange& window, const RetryPolicy& policy,
                                        const Sleeper& sleep = thread_sleeper(),
                                        std::size_t page_size = 1000);

/// One JSON object per line: doi, pmid, pmcid, title, publication_date,
/// authors, doc_type.
std::unique_ptr<CorpusSource> open_fixture_corpus(const std::string& path);

/// Solr-style journal search API (the PLOS search endpoint by default).
std::unique_ptr<CorpusSource> make_search_api_corpus(std::string base_url, std::string api_key);

std::string article_to_json_line(const ArticleRecord& record);
ArticleRecord article_from_json_line(std::string_view line);

std::string bundle_to_json_line(const IdBundle& bundle);
IdBundle bundle_from_json_line(std::string_view line);

}  // namespace engage
