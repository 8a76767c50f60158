#include <map>

#include "engage/ident.hpp"
#include "http.hpp"
#include "jsonio.hpp"

namespace engage {

using detail::json;
using detail::ordered_json;

namespace {

class FixtureConverter final : public IdConverterSource {
 public:
  explicit FixtureConverter(const std::string& path) {
    auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      auto context = path + ":" + std::to_string(i + 1);
      auto obj = detail::parse_json(lines[i], context);
      auto doi = Doi::parse(obj.at("doi").get<std::string>());
      mappings_[doi.str()] = IdMapping{detail::get_optional_string(obj, "pmid"),
                                       detail::get_optional_string(obj, "pmcid")};
    }
  }

  Reply<IdMapping> query(const Doi& doi) override {
    auto it = mappings_.find(doi.str());
    if (it == mappings_.end()) return IdMapping{};
    return it->second;
  }

 private:
  std::map<std::string, IdMapping> mappings_;
};

class NcbiConverter final : public IdConverterSource {
 public:
  NcbiConverter(std::string base_url, std::string api_key)
      : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {}

  Reply<IdMapping> query(const Doi& doi) override {
    std::string path = "/pmc/utils/idconv/v1.0/?format=json&tool=engage&ids=" +
                       detail::url_encode(doi.str());
    if (!api_key_.empty()) path += "&api_key=" + detail::url_encode(api_key_);
    auto outcome = detail::http_get(base_url_, path);
    if (auto failure = detail::classify_failure<IdMapping>(outcome, {429})) return *failure;
    if (outcome.response->status == 404) return IdMapping{};
    json body;
    try {
      body = json::parse(outcome.response->body);
    } catch (const json::exception& e) {
      return TransientFailure{std::string("unparseable converter response: ") + e.what()};
    }
    IdMapping mapping;
    if (body.contains("records") && body["records"].is_array()) {
      for (const auto& rec : body["records"]) {
        mapping.pmid = detail::get_optional_string(rec, "pmid");
        mapping.pmcid = detail::get_optional_string(rec, "pmcid");
        break;
      }
    }
    return mapping;
  }

 private:
  std::string base_url_;
  std::string api_key_;
};

struct FixtureArticle {
  ArticleRecord record;
  std::optional<std::string> journal_key;
};

class FixtureCorpus final : public CorpusSource {
 public:
  explicit FixtureCorpus(const std::string& path) {
    auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      auto obj = detail::parse_json(lines[i], path + ":" + std::to_string(i + 1));
      articles_.push_back({article_from_json_line(lines[i]),
                           detail::get_optional_string(obj, "journal_key")});
    }
  }

  Reply<CorpusPage> page(const CorpusQuery& query, std::size_t start,
                         std::size_t rows) override {
    std::vector<const ArticleRecord*> hits;
    for (const auto& a : articles_) {
      if (a.record.doc_type != "full") continue;
      if (!query.window.contains(a.record.bundle.publication_date)) continue;
      if (a.journal_key && *a.journal_key != query.journal_key) continue;
      hits.push_back(&a.record);
    }
    std::sort(hits.begin(), hits.end(), [](const ArticleRecord* a, const ArticleRecord* b) {
      if (a->bundle.publication_date != b->bundle.publication_date) {
        return a->bundle.publication_date < b->bundle.publication_date;
      }
      return a->bundle.doi < b->bundle.doi;
    });
    CorpusPage page;
    page.total_found = hits.size();
    for (std::size_t i = start; i < hits.size() && i < start + rows; ++i) {
      page.records.push_back(*hits[i]);
    }
    return page;
  }

 private:
  std::vector<FixtureArticle> articles_;
};

class SearchApiCorpus final : public CorpusSource {
 public:
  SearchApiCorpus(std::string base_url, std::string api_key)
      : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {}

  Reply<CorpusPage> page(const CorpusQuery& query, std::size_t start,
                         std::size_t rows) override {
    std::string window = "publication_date:[" + format_date(query.window.from) +
                         "T00:00:00Z TO " + format_date(query.window.to) + "T23:59:59Z]";
    std::string path = "/search?q=" + detail::url_encode("*:*") +
                       "&fl=" + detail::url_encode("id,publication_date,title,author,doc_type") +
                       "&fq=" + detail::url_encode(window) +
                       "&fq=" + detail::url_encode("journal_key:" + query.journal_key) +
                       "&fq=" + detail::url_encode("doc_type:full") +
                       "&wt=json&start=" + std::to_string(start) +
                       "&rows=" + std::to_string(rows);
    if (!api_key_.empty()) path += "&api_key=" + detail::url_encode(api_key_);
    auto outcome = detail::http_get(base_url_, path);
    if (auto failure = detail::classify_failure<CorpusPage>(outcome, {429})) return *failure;
    CorpusPage page;
    try {
      auto body = json::parse(outcome.response->body);
      const auto& response = body.at("response");
      page.total_found = response.at("numFound").get<std::size_t>();
      for (const auto& doc : response.at("docs")) {
        ArticleRecord rec{IdBundle{Doi::parse(doc.at("id").get<std::string>()), std::nullopt,
                                   std::nullopt, doc.value("title", std::string{}),
                                   parse_date(doc.at("publication_date").get<std::string>())},
                          {},
                          doc.value("doc_type", std::string{"full"})};
        if (doc.contains("author")) {
          for (const auto& a : doc["author"]) rec.authors.push_back(a.get<std::string>());
        }
        page.records.push_back(std::move(rec));
      }
    } catch (const json::exception& e) {
      return TransientFailure{std::string("unparseable search response: ") + e.what()};
    }
    return page;
  }

 private:
  std::string base_url_;
  std::string api_key_;
};

ordered_json bundle_json(const IdBundle& b) {
  ordered_json obj;
  obj["doi"] = b.doi.str();
  if (b.pmid) obj["pmid"] = *b.pmid;
  if (b.pmcid) obj["pmcid"] = *b.pmcid;
  obj["title"] = b.title;
  obj["publication_date"] = format_date(b.publication_date);
  return obj;
}

IdBundle bundle_from(const json& obj) {
  IdBundle b{Doi::parse(obj.at("doi").get<std::string>()), detail::get_optional_string(obj, "pmid"),
             std::nullopt, obj.value("title", std::string{}),
             parse_date(obj.at("publication_date").get<std::string>())};
  if (auto pmcid = detail::get_optional_string(obj, "pmcid")) b.pmcid = normalize_pmcid(*pmcid);
  return b;
}

}  // namespace

std::unique_ptr<IdConverterSource> open_fixture_converter(const std::string& path) {
  return std::make_unique<FixtureConverter>(path);
}

std::unique_ptr<IdConverterSource> make_ncbi_converter(std::string base_url, std::string api_key) {
  return std::make_unique<NcbiConverter>(std::move(base_url), std::move(api_key));
}

std::unique_ptr<CorpusSource> open_fixture_corpus(const std::string& path) {
  return std::make_unique<FixtureCorpus>(path);
}

std::unique_ptr<CorpusSource> make_search_api_corpus(std::string base_url, std::string api_key) {
  return std::make_unique<SearchApiCorpus>(std::move(base_url), std::move(api_key));
}

std::string article_to_json_line(const ArticleRecord& record) {
  auto obj = bundle_json(record.bundle);
  obj["authors"] = record.authors;
  obj["doc_type"] = record.doc_type;
  return detail::dump_compact(obj);
}

ArticleRecord article_from_json_line(std::string_view line) {
  auto obj = detail::parse_json(line, "article record");
  try {
    ArticleRecord rec{bundle_from(obj), {}, obj.value("doc_type", std::string{})};
    if (obj.contains("authors")) {
      for (const auto& a : obj["authors"]) rec.authors.push_back(a.get<std::string>());
    }
    return rec;
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("article record: ") + e.what());
  }
}

std::string bundle_to_json_line(const IdBundle& bundle) {
  return detail::dump_compact(bundle_json(bundle));
}

IdBundle bundle_from_json_line(std::string_view line) {
  auto obj = detail::parse_json(line, "id bundle");
  try {
    return bundle_from(obj);
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("id bundle: ") + e.what());
  }
}

}  // namespace engage
