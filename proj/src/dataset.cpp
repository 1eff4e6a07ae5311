#include "verdoorn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "verdoorn/errors.hpp"
#include "verdoorn/text.hpp"

namespace verdoorn {
namespace {

struct ColumnIndex {
  std::size_t region, sector, year, output, employment;
};

std::size_t find_column(const std::vector<std::string_view>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (text::trim(header[i]) == name) return i;
  }
  throw ParseError(1, "missing column '" + name + "'");
}

std::string strip_bom(std::string line) {
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  return line;
}

std::string unit_name(const std::string& region, const std::string& sector) {
  return region + "/" + sector;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool region_year_less(const GrowthObservation& a, const GrowthObservation& b) {
  return std::tie(a.region, a.year_to) < std::tie(b.region, b.year_to);
}

}  // namespace

void LoadResult::throw_if_rejected() const {
  if (rejections.empty()) return;
  std::string msg = std::to_string(rejections.size()) + " rejected row(s):";
  for (const auto& r : rejections) msg += "\n  line " + std::to_string(r.line) + ": " + r.reason;
  throw ValidationError(msg);
}

LoadResult load_panel(std::istream& in, const Schema& schema) {
  std::string line;
  if (!text::read_line(in, line)) throw ParseError(1, "empty input, header row required");
  const std::string header_line = strip_bom(line);
  const auto header = text::split(header_line, schema.delimiter);
  const ColumnIndex col{find_column(header, schema.region), find_column(header, schema.sector),
                        find_column(header, schema.year), find_column(header, schema.output),
                        find_column(header, schema.employment)};

  LoadResult result;
  std::map<std::tuple<std::string, std::string, int>, std::size_t> seen;
  std::size_t line_no = 1;
  while (text::read_line(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, schema.delimiter);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    const auto numeric = [&](std::size_t idx, const std::string& name) {
      const auto v = text::parse_double(fields[idx]);
      if (!v) {
        throw ParseError(line_no, "non-numeric value '" + std::string(text::trim(fields[idx])) +
                                      "' in column " + name);
      }
      return *v;
    };
    const auto year = text::parse_integer(fields[col.year]);
    if (!year) {
      throw ParseError(line_no, "non-integer year '" + std::string(text::trim(fields[col.year])) +
                                    "'");
    }

    PanelObservation obs;
    obs.region = std::string(text::trim(fields[col.region]));
    obs.sector = std::string(text::trim(fields[col.sector]));
    obs.year = static_cast<int>(*year);
    obs.output = numeric(col.output, schema.output);
    obs.employment = numeric(col.employment, schema.employment);

    if (obs.region.empty() || obs.sector.empty()) {
      result.rejections.push_back({line_no, "empty identifier"});
      continue;
    }
    if (!std::isfinite(obs.output) || !std::isfinite(obs.employment)) {
      result.rejections.push_back({line_no, "non-finite level"});
      continue;
    }
    if (!(obs.output > 0)) {
      result.rejections.push_back(
          {line_no, "non-positive level: " + schema.output + " = " + text::round_trip(obs.output)});
      continue;
    }
    if (!(obs.employment > 0)) {
      result.rejections.push_back({line_no, "non-positive level: " + schema.employment + " = " +
                                                text::round_trip(obs.employment)});
      continue;
    }
    const auto [it, inserted] = seen.emplace(std::tuple{obs.region, obs.sector, obs.year}, line_no);
    if (!inserted) {
      result.rejections.push_back(
          {line_no, "duplicate key: " + unit_name(obs.region, obs.sector) + "/" +
                        std::to_string(obs.year) + " first seen on line " +
                        std::to_string(it->second)});
      continue;
    }
    result.observations.push_back(std::move(obs));
  }
  return result;
}

void write_rejections(std::ostream& out, const std::vector<Rejection>& rejections,
                      char delimiter) {
  out << "line" << delimiter << "reason\n";
  for (const auto& r : rejections) out << r.line << delimiter << r.reason << '\n';
}

void write_panel(std::ostream& out, const std::vector<PanelObservation>& panel, char delimiter) {
  const char d = delimiter;
  out << "region" << d << "sector" << d << "year" << d << "output" << d << "employment\n";
  for (const auto& o : panel) {
    out << o.region << d << o.sector << d << o.year << d << text::round_trip(o.output) << d
        << text::round_trip(o.employment) << '\n';
  }
}

Eigen::VectorXd GrowthSeries::column(Variable v) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(observations.size()));
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& o = observations[i];
    out(static_cast<Eigen::Index>(i)) = v == Variable::p ? o.p : v == Variable::q ? o.q : o.e;
  }
  return out;
}

std::vector<int> GrowthSeries::region_groups() const {
  std::map<std::string, int> ids;
  std::vector<int> groups;
  groups.reserve(observations.size());
  for (const auto& o : observations) {
    const auto [it, _] = ids.emplace(o.region, static_cast<int>(ids.size()));
    groups.push_back(it->second);
  }
  return groups;
}

std::vector<std::string> GrowthSeries::regions() const {
  std::vector<std::string> out;
  for (const auto& o : observations) {
    if (std::find(out.begin(), out.end(), o.region) == out.end()) out.push_back(o.region);
  }
  return out;
}

std::pair<int, int> GrowthSeries::period() const {
  if (observations.empty()) return {0, 0};
  const auto [lo, hi] = std::minmax_element(
      observations.begin(), observations.end(),
      [](const auto& a, const auto& b) { return a.year_to < b.year_to; });
  const int last = hi->year_to;
  // Cross-section rows carry the last year of their region but cover the whole span.
  const int first = mode == SeriesMode::cross_section && period_start ? period_start : lo->year_to - 1;
  return {first, last};
}

std::vector<GrowthObservation> growth_rates(const std::vector<PanelObservation>& panel,
                                            GrowthMode mode) {
  std::map<std::pair<std::string, std::string>, std::vector<const PanelObservation*>> units;
  for (const auto& o : panel) {
    if (!(o.output > 0) || !(o.employment > 0) || !std::isfinite(o.output) ||
        !std::isfinite(o.employment)) {
      throw ValidationError("non-positive level in " + unit_name(o.region, o.sector) + "/" +
                            std::to_string(o.year));
    }
    units[{o.sector, o.region}].push_back(&o);
  }

  std::vector<GrowthObservation> out;
  std::vector<std::string> short_units;
  for (auto& [key, rows] : units) {
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->year < b->year; });
    bool produced = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& prev = *rows[i - 1];
      const auto& cur = *rows[i];
      if (cur.year == prev.year) {
        throw ValidationError("duplicate key: " + unit_name(cur.region, cur.sector) + "/" +
                              std::to_string(cur.year));
      }
      if (cur.year != prev.year + 1) continue;
      GrowthObservation g{cur.region, cur.sector, cur.year, 0, 0, 0};
      if (mode == GrowthMode::log) {
        g.q = std::log(cur.output / prev.output);
        g.e = std::log(cur.employment / prev.employment);
      } else {
        g.q = cur.output / prev.output - 1;
        g.e = cur.employment / prev.employment - 1;
      }
      g.p = g.q - g.e;
      out.push_back(std::move(g));
      produced = true;
    }
    if (!produced) short_units.push_back(unit_name(key.second, key.first));
  }
  if (out.empty()) {
    throw ValidationError("no unit has two consecutive years: " +
                          (short_units.empty() ? std::string("(empty panel)")
                                               : join(short_units, ", ")));
  }
  return out;
}

std::vector<std::string> sectors_of(const std::vector<GrowthObservation>& growth) {
  std::vector<std::string> out;
  for (const auto& g : growth) {
    if (std::find(out.begin(), out.end(), g.sector) == out.end()) out.push_back(g.sector);
  }
  return out;
}

GrowthSeries pool(const std::vector<GrowthObservation>& growth,
                  const std::set<std::string>& sector_filter, MergeMode merge) {
  GrowthSeries series;
  series.mode = SeriesMode::pooled;
  for (const auto& g : growth) {
    if (sector_filter.empty() || sector_filter.count(g.sector)) series.observations.push_back(g);
  }
  const std::string filter_name =
      sector_filter.empty() ? std::string("(all sectors)")
                            : join(std::vector<std::string>(sector_filter.begin(),
                                                            sector_filter.end()),
                                   "+");
  if (series.observations.empty()) {
    throw ValidationError("no growth observations match sector filter " + filter_name);
  }
  const auto sectors = sectors_of(series.observations);
  if (merge == MergeMode::per_sector && sectors.size() != 1) {
    throw ValidationError("per-sector pooling needs exactly one sector, filter " + filter_name +
                          " leaves " + std::to_string(sectors.size()));
  }
  if (merge == MergeMode::merged) {
    std::stable_sort(series.observations.begin(), series.observations.end(),
                     [](const auto& a, const auto& b) {
                       return std::tie(a.sector, a.region, a.year_to) <
                              std::tie(b.sector, b.region, b.year_to);
                     });
    std::vector<std::string> sorted(sectors.begin(), sectors.end());
    std::sort(sorted.begin(), sorted.end());
    series.label = join(sorted, "+");
  } else {
    std::stable_sort(series.observations.begin(), series.observations.end(), region_year_less);
    series.label = sectors.front();
  }
  return series;
}

GrowthSeries cross_section(const std::vector<GrowthObservation>& growth) {
  if (growth.empty()) throw ValidationError("cross_section: no growth observations");
  struct Accumulator {
    double q = 0, e = 0;
    int count = 0;
    int last_year = 0;
  };
  std::map<std::string, Accumulator> by_region;
  int first_year = growth.front().year_to;
  for (const auto& g : growth) {
    auto& acc = by_region[g.region];
    acc.q += g.q;
    acc.e += g.e;
    ++acc.count;
    acc.last_year = std::max(acc.last_year, g.year_to);
    first_year = std::min(first_year, g.year_to);
  }
  auto sectors = sectors_of(growth);
  std::sort(sectors.begin(), sectors.end());

  GrowthSeries series;
  series.mode = SeriesMode::cross_section;
  series.label = join(sectors, "+");
  series.period_start = first_year - 1;
  for (const auto& [region, acc] : by_region) {
    GrowthObservation g;
    g.region = region;
    g.sector = series.label;
    g.year_to = acc.last_year;
    g.q = acc.q / acc.count;
    g.e = acc.e / acc.count;
    g.p = g.q - g.e;
    series.observations.push_back(std::move(g));
  }
  return series;
}

void write_series(std::ostream& out, const GrowthSeries& series, char delimiter) {
  const char d = delimiter;
  out << "region" << d << "sector" << d << "year_to" << d << "q" << d << "e" << d << "p\n";
  for (const auto& o : series.observations) {
    out << o.region << d << o.sector << d << o.year_to << d << text::round_trip(o.q) << d
        << text::round_trip(o.e) << d << text::round_trip(o.p) << '\n';
  }
}

GrowthSeries read_series(std::istream& in, std::string label, SeriesMode mode, char delimiter) {
  std::string line;
  if (!text::read_line(in, line)) throw ParseError(1, "empty input, header row required");
  const std::string header_line = strip_bom(line);
  const auto header = text::split(header_line, delimiter);
  const std::size_t c_region = find_column(header, "region");
  const std::size_t c_sector = find_column(header, "sector");
  const std::size_t c_year = find_column(header, "year_to");
  const std::size_t c_q = find_column(header, "q");
  const std::size_t c_e = find_column(header, "e");
  const std::size_t c_p = find_column(header, "p");

  GrowthSeries series;
  series.label = std::move(label);
  series.mode = mode;
  std::size_t line_no = 1;
  while (text::read_line(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, delimiter);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    const auto year = text::parse_integer(fields[c_year]);
    const auto q = text::parse_double(fields[c_q]);
    const auto e = text::parse_double(fields[c_e]);
    const auto p = text::parse_double(fields[c_p]);
    if (!year || !q || !e || !p) throw ParseError(line_no, "non-numeric growth field");
    GrowthObservation g{std::string(text::trim(fields[c_region])),
                        std::string(text::trim(fields[c_sector])), static_cast<int>(*year), *q,
                        *e, *p};
    if (g.p != g.q - g.e) {
      throw ValidationError("line " + std::to_string(line_no) + ": p != q - e");
    }
    series.observations.push_back(std::move(g));
  }
  return series;
}

std::string to_string(SeriesMode mode) {
  return mode == SeriesMode::pooled ? "pooled" : "cross-section";
}

}  // namespace verdoorn
