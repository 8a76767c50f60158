#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "engage/report.hpp"
#include "jsonio.hpp"

namespace engage {

using detail::ordered_json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

namespace {

std::string cell_text(const Cell& c) {
  struct Visitor {
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(const Percent& p) const { return format_percent(p.n, p.total); }
  };
  return std::visit(Visitor{}, c);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::vector<Cell> npct(std::uint64_t n, std::uint64_t total) { return {Cell{n}, Cell{Percent{n, total}}}; }

void append(std::vector<Cell>& row, std::vector<Cell> more) {
  for (auto& c : more) row.push_back(std::move(c));
}

}  // namespace

Table to_table(const std::vector<CoverageRow>& rows) {
  Table t{"coverage", {"group", "aes_n", "aes_pct", "pos_n", "pos_pct", "tw_n", "tw_pct", "total"}, {}, {}};
  for (const auto& r : rows) {
    std::vector<Cell> row{r.group};
    append(row, npct(r.aes, r.total));
    append(row, npct(r.pos, r.total));
    append(row, npct(r.tw, r.total));
    row.push_back(r.total);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table to_table(const OverlapPartition& p) {
  Table t{"overlap", {"region", "n", "pct"}, {}, {}};
  auto u = p.union_size();
  const std::pair<const char*, std::uint64_t> regions[] = {
      {"aes_only", p.aes_only}, {"pos_only", p.pos_only}, {"tw_only", p.tw_only},
      {"aes_pos", p.aes_pos},   {"aes_tw", p.aes_tw},     {"pos_tw", p.pos_tw},
      {"all_three", p.all_three}};
  for (auto [name, n] : regions) t.rows.push_back({std::string(name), n, Percent{n, u}});
  t.rows.push_back({std::string("union"), u, Percent{u, p.universe}});
  t.rows.push_back({std::string("universe"), p.universe, Percent{p.universe, p.universe}});
  return t;
}

Table to_table(const std::vector<FbPartitionRow>& rows) {
  Table t{"fbpartition",
          {"group", "only_aes_n", "only_aes_pct", "both_n", "both_pct", "only_pos_n", "only_pos_pct", "any_fb"},
          {}, {}};
  for (const auto& r : rows) {
    std::vector<Cell> row{r.group};
    auto total = r.any_fb();
    append(row, npct(r.only_aes, total));
    append(row, npct(r.both, total));
    append(row, npct(r.only_pos, total));
    row.push_back(total);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table to_table(const std::vector<CompareRow>& rows) {
  Table t{"compare",
          {"group", "aes_gt_n", "aes_gt_pct", "equal_n", "equal_pct", "pos_gt_n", "pos_gt_pct", "both_total"},
          {}, {}};
  for (const auto& r : rows) {
    std::vector<Cell> row{r.group};
    auto total = r.both_total();
    append(row, npct(r.aes_gt, total));
    append(row, npct(r.equal, total));
    append(row, npct(r.pos_gt, total));
    row.push_back(total);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table to_table(const std::vector<DifferenceSummary>& rows) {
  Table t{"lettervalues", {"group", "class", "n", "level", "depth", "lower", "upper", "outliers"}, {}, {}};
  for (const auto& r : rows) {
    const auto& s = r.summary;
    auto outliers = static_cast<std::uint64_t>(s.outliers.size());
    t.rows.push_back({r.group, r.sign_class, static_cast<std::uint64_t>(r.n), std::uint64_t{0},
                      s.depths.front(), s.median, s.median, outliers});
    for (std::size_t i = 0; i < s.lower.size(); ++i) {
      t.rows.push_back({r.group, r.sign_class, static_cast<std::uint64_t>(r.n),
                        static_cast<std::uint64_t>(i + 1), s.depths[i + 1], s.lower[i], s.upper[i],
                        outliers});
    }
  }
  return t;
}

Table to_table(const std::vector<DescriptiveRow>& rows) {
  Table t{"descriptive",
          {"metric", "count", "min", "max", "geom_mean", "alpha", "intercept", "points_used"},
          {}, {}};
  for (const auto& r : rows) {
    std::vector<Cell> row{std::string(to_string(r.metric)), static_cast<std::uint64_t>(r.stats.count),
                          r.stats.min, r.stats.max, r.stats.geometric_mean};
    if (r.fit) {
      row.insert(row.end(), {r.fit->alpha, r.fit->intercept, static_cast<std::uint64_t>(r.fit->points_used)});
    } else {
      row.insert(row.end(), {std::string{}, std::string{}, std::uint64_t{0}});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table to_table(const std::vector<CorrelationRow>& rows) {
  Table t{"correlation", {"metric_a", "metric_b", "rho", "n", "imputed_a", "imputed_b"}, {}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({std::string(to_string(r.a)), std::string(to_string(r.b)), r.rho,
                      static_cast<std::uint64_t>(r.n), static_cast<std::uint64_t>(r.imputed_a),
                      static_cast<std::uint64_t>(r.imputed_b)});
  }
  return t;
}

Table to_table(const std::vector<PowerLawSeries>& series) {
  Table t{"powerlaw_bins",
          {"metric", "x_center", "density", "raw_count", "int_width", "lower_edge", "upper_edge"},
          {}, {}};
  for (const auto& s : series) {
    for (const auto& p : s.binned.points) {
      t.rows.push_back({std::string(to_string(s.metric)), p.x_center, p.density, p.raw_count,
                        p.int_width, p.lower_edge, p.upper_edge});
    }
  }
  return t;
}

std::string render_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out.push_back(',');
    out += table.header[i];
  }
  out.push_back('\n');
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      out += csv_escape(cell_text(row[i]));
    }
    out.push_back('\n');
  }
  return out;
}

std::string render_json(const Table& table) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < table.header.size(); ++i) {
      const auto& key = table.header[i];
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Percent>) {
              // exact one-decimal value, emitted as a number
              obj[key] = ordered_json::parse(format_percent(v.n, v.total));
            } else if constexpr (std::is_same_v<T, double>) {
              obj[key] = std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
            } else {
              obj[key] = v;
            }
          },
          row[i]);
    }
    rows.push_back(std::move(obj));
  }
  ordered_json doc;
  doc["table"] = table.name;
  if (!table.snapshot_date.empty()) doc["snapshot_date"] = table.snapshot_date;
  doc["columns"] = table.header;
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Axis {
  double lo, hi;  // in log10 units
  double px_lo, px_hi;
  double map(double v) const {
    if (hi == lo) return (px_lo + px_hi) / 2.0;
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string svg_open(int w, int h, const std::string& title) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << title << "</text>\n";
  return s.str();
}

void log_ticks(std::ostringstream& s, const Axis& axis, bool horizontal, double other_px) {
  for (int e = static_cast<int>(std::floor(axis.lo)); e <= static_cast<int>(std::ceil(axis.hi)); ++e) {
    if (e < axis.lo - 1e-9 || e > axis.hi + 1e-9) continue;
    double p = axis.map(e);
    if (horizontal) {
      s << "<text x=\"" << fmt(p) << "\" y=\"" << fmt(other_px + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">1e" << e << "</text>\n";
    } else {
      s << "<text x=\"" << fmt(other_px - 6) << "\" y=\"" << fmt(p + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">1e" << e << "</text>\n";
    }
  }
}

}  // namespace

std::string render_powerlaw_svg(const std::vector<PowerLawSeries>& series, const std::string& title) {
  const int w = 640, h = 480, left = 60, right = 20, top = 40, bottom = 50;
  double xlo = 0, xhi = 1, ylo = -1, yhi = 0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& p : s.binned.points) {
      if (p.density <= 0) continue;
      double x = std::log10(p.x_center), y = std::log10(p.density);
      if (first) {
        xlo = xhi = x;
        ylo = yhi = y;
        first = false;
      }
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  Axis ax{std::floor(xlo), std::ceil(xhi), double(left), double(w - right)};
  Axis ay{std::floor(ylo), std::ceil(yhi), double(h - bottom), double(top)};

  std::ostringstream s;
  s << svg_open(w, h, title);
  s << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\""
    << h - bottom << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  log_ticks(s, ax, true, h - bottom);
  log_ticks(s, ay, false, left);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& ser = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    s << "<g class=\"series\" data-metric=\"" << to_string(ser.metric) << "\" data-alpha=\""
      << format_number(ser.fit.alpha) << "\">\n";
    double fx_lo = 1e300, fx_hi = -1e300;
    for (const auto& p : ser.binned.points) {
      if (p.density <= 0) continue;
      double x = std::log10(p.x_center);
      fx_lo = std::min(fx_lo, x);
      fx_hi = std::max(fx_hi, x);
      s << "<circle cx=\"" << fmt(ax.map(x)) << "\" cy=\"" << fmt(ay.map(std::log10(p.density)))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    auto line_y = [&](double x) { return ser.fit.intercept - ser.fit.alpha * x; };
    s << "<line x1=\"" << fmt(ax.map(fx_lo)) << "\" y1=\"" << fmt(ay.map(line_y(fx_lo))) << "\" x2=\""
      << fmt(ax.map(fx_hi)) << "\" y2=\"" << fmt(ay.map(line_y(fx_hi))) << "\" stroke=\"" << color
      << "\" stroke-width=\"1.5\"/>\n";
    s << "<text x=\"" << w - right - 120 << "\" y=\"" << top + 16 * (i + 1) << "\" fill=\"" << color
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << to_string(ser.metric)
      << " alpha=" << fmt(ser.fit.alpha) << "</text>\n";
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string render_lettervalue_svg(const std::vector<DifferenceSummary>& summaries,
                                   const std::string& title) {
  const int col = 70, left = 60, top = 40, bottom = 80, h = 480;
  const int w = left + col * static_cast<int>(std::max<std::size_t>(summaries.size(), 1)) + 20;
  double vmax = 1.0;
  for (const auto& d : summaries) {
    vmax = std::max(vmax, d.summary.median);
    for (double v : d.summary.upper) vmax = std::max(vmax, v);
    for (double v : d.summary.outliers) vmax = std::max(vmax, v);
  }
  // log10(1 + v) keeps zero differences on the chart
  Axis ay{0.0, std::ceil(std::log10(1.0 + vmax)), double(h - bottom), double(top)};
  auto y = [&](double v) { return ay.map(std::log10(1.0 + v)); };

  std::ostringstream s;
  s << svg_open(w, h, title);
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& d = summaries[i];
    const char* color = d.sign_class == "pos_gt" ? kPalette[1] : kPalette[0];
    double cx = left + col * (static_cast<double>(i) + 0.5);
    s << "<g class=\"lettervalues\" data-group=\"" << d.group << "\" data-class=\"" << d.sign_class
      << "\" data-n=\"" << d.n << "\">\n";
    const auto levels = d.summary.lower.size();
    for (std::size_t l = 0; l < levels; ++l) {
      double half = (col * 0.4) * (1.0 - static_cast<double>(l) / static_cast<double>(levels + 1));
      double y1 = y(d.summary.upper[l]);
      double y2 = y(d.summary.lower[l]);
      double opacity = 0.9 - 0.6 * static_cast<double>(l) / static_cast<double>(levels);
      s << "<rect x=\"" << fmt(cx - half) << "\" y=\"" << fmt(y1) << "\" width=\"" << fmt(2 * half)
        << "\" height=\"" << fmt(std::max(0.5, y2 - y1)) << "\" fill=\"" << color
        << "\" fill-opacity=\"" << fmt(opacity) << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
    s << "<line x1=\"" << fmt(cx - col * 0.4) << "\" y1=\"" << fmt(y(d.summary.median)) << "\" x2=\""
      << fmt(cx + col * 0.4) << "\" y2=\"" << fmt(y(d.summary.median))
      << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    for (double o : d.summary.outliers) {
      s << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(y(o)) << "\" r=\"2\" fill=\"none\" stroke=\""
        << color << "\"/>\n";
    }
    s << "<text transform=\"translate(" << fmt(cx) << "," << h - bottom + 12
      << ") rotate(45)\" font-family=\"sans-serif\" font-size=\"10\">" << d.group << " "
      << d.sign_class << "</text>\n";
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "svg") return ReportFormat::svg;
  throw MalformedInput("unknown report format: " + std::string(name));
}

void emit(const Table& table, ReportFormat format, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());
  switch (format) {
    case ReportFormat::csv:
      detail::write_file_atomic((dir / (table.name + ".csv")).string(), render_csv(table));
      break;
    case ReportFormat::json:
      detail::write_file_atomic((dir / (table.name + ".json")).string(), render_json(table));
      break;
    case ReportFormat::svg:
      throw MalformedInput("tables have no SVG form; use render_*_svg");
  }
}

std::vector<std::string> write_reports(const Snapshot& snapshot, ReportFormat format,
                                       const std::filesystem::path& dir,
                                       const DisciplineMap* disciplines,
                                       const ReportConfig& config) {
  std::vector<std::string> written;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());

  auto series = powerlaw_series(snapshot, config);
  auto diff_year = difference_lettervalues(snapshot, GroupBy::year, nullptr, config);

  if (format == ReportFormat::svg) {
    detail::write_file_atomic((dir / "powerlaw.svg").string(), render_powerlaw_svg(series, "Binned density and least-squares fit, snapshot " +
                                                                 format_date(snapshot.snapshot_date)));
    detail::write_file_atomic((dir / "lettervalues_year.svg").string(),
                              render_lettervalue_svg(diff_year, "|AES - POS| by year, snapshot " + format_date(snapshot.snapshot_date)));
    written = {"lettervalues_year.svg", "powerlaw.svg"};
    if (disciplines) {
      auto diff_disc = difference_lettervalues(snapshot, GroupBy::discipline, disciplines, config);
      detail::write_file_atomic((dir / "lettervalues_discipline.svg").string(),
                                render_lettervalue_svg(diff_disc, "|AES - POS| by discipline, snapshot " +
                                                       format_date(snapshot.snapshot_date)));
      written.push_back("lettervalues_discipline.svg");
    }
    std::sort(written.begin(), written.end());
    return written;
  }

  std::vector<Table> tables;
  tables.push_back(to_table(coverage_table(snapshot, true, config)));
  tables.push_back(to_table(overlap_partition(snapshot, config)));
  tables.push_back(to_table(fb_partition(snapshot, true, config)));
  tables.push_back(to_table(compare_counts(snapshot, GroupBy::year, nullptr, config)));
  tables.push_back(to_table(descriptive_table(snapshot, config)));
  tables.push_back(to_table(correlation_table(snapshot)));
  tables.push_back(to_table(series));
  {
    auto t = to_table(diff_year);
    t.name = "lettervalues_year";
    tables.push_back(std::move(t));
  }
  if (disciplines) {
    auto rename = [](Table t, std::string name) {
      t.name = std::move(name);
      return t;
    };
    tables.push_back(rename(to_table(coverage_by_discipline(snapshot, *disciplines, config)),
                            "coverage_discipline"));
    tables.push_back(rename(to_table(fb_partition_by_discipline(snapshot, *disciplines, config)),
                            "fbpartition_discipline"));
    tables.push_back(rename(to_table(compare_counts(snapshot, GroupBy::discipline, disciplines, config)),
                            "compare_discipline"));
    tables.push_back(rename(
        to_table(difference_lettervalues(snapshot, GroupBy::discipline, disciplines, config)),
        "lettervalues_discipline"));
  }
  const char* ext = format == ReportFormat::csv ? ".csv" : ".json";
  for (auto& t : tables) {
    t.snapshot_date = format_date(snapshot.snapshot_date);
    emit(t, format, dir);
    written.push_back(t.name + ext);
  }
  std::sort(written.begin(), written.end());
  return written;
}

}  // namespace engage
