#include "verdoorn/report.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "verdoorn/errors.hpp"
#include "verdoorn/text.hpp"

namespace verdoorn {
namespace {

constexpr int kDecimals = 3;
constexpr std::string_view kEeHeader = "E.E. (1/(1-b))";
constexpr std::string_view kNote =
    "Note: * significant at 5%, ** significant at 10% (two-sided t-test); "
    "G.L. degrees of freedom; E.E. economies of scale.";

using Row = std::vector<std::string>;

double constant_factor(RenderScale scale) { return scale == RenderScale::percent ? 100.0 : 1.0; }

Row header_row() {
  return {"", "Constant", "Coefficient", "DW", "R²", "G.L.", std::string(kEeHeader)};
}

Row body_row(const TableRow& r, RenderScale scale) {
  return {std::string(to_string(r.kind)),
          coefficient_cell(r.intercept * constant_factor(scale), r.t_intercept, r.p_intercept),
          coefficient_cell(r.slope, r.t_slope, r.p_slope),
          text::fixed(r.durbin_watson, kDecimals),
          text::fixed(r.r_squared, kDecimals),
          std::to_string(r.df),
          r.scale ? ee_cell(*r.scale) : std::string()};
}

std::string caption(const ReportTable& t, RenderScale scale) {
  return t.cell.sector + " | " + t.cell.period + " | " + to_string(t.cell.mode) +
         " | constants: " + to_string(scale);
}

std::string reference_line(const ReportTable& t) {
  const double b = t.rows[0].slope;
  const double dev = b - kReferenceElasticity;
  std::string sign = dev > 0 && text::fixed(dev, kDecimals) != "0.000" ? "+" : "";
  return "Verdoorn b = " + text::fixed(b, kDecimals) + "; deviation from reference elasticity " +
         text::fixed(kReferenceElasticity, 2) + " (range " +
         text::fixed(kReferenceElasticityLow, 2) + "-" + text::fixed(kReferenceElasticityHigh, 2) +
         "): " + sign + text::fixed(dev, kDecimals);
}

void append_aligned(std::string& out, const std::vector<Row>& rows) {
  std::vector<std::size_t> widths(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], text::display_width(row[c]));
    }
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line.append(widths[c] - text::display_width(row[c]) + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
}

std::string render_aligned(std::span<const ReportTable> tables, RenderScale scale) {
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto& t = tables[i];
    if (i) out += '\n';
    out += caption(t, scale) + '\n';
    std::vector<Row> rows{header_row()};
    for (const auto& r : t.rows) rows.push_back(body_row(r, scale));
    append_aligned(out, rows);
    out += std::string(kNote) + '\n';
    out += reference_line(t) + '\n';
  }
  return out;
}

std::string render_delimited(std::span<const ReportTable> tables, RenderScale scale) {
  std::string out = "cell,equation,constant,coefficient,dw,r2,gl,ee,constant_scale\n";
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      const Row row = body_row(r, scale);
      out += t.cell.to_string();
      for (const auto& field : row) {
        out += ',';
        out += field;
      }
      out += ',' + to_string(scale) + '\n';
    }
  }
  return out;
}

std::string render_markdown(std::span<const ReportTable> tables, RenderScale scale) {
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto& t = tables[i];
    if (i) out += '\n';
    out += "**" + caption(t, scale) + "**\n\n";
    const auto emit = [&out](const Row& row) {
      out += '|';
      for (const auto& field : row) out += ' ' + (field.empty() ? std::string() : field + ' ') + '|';
      out += '\n';
    };
    Row header = header_row();
    header[0] = "Equation";
    emit(header);
    out += "|---|---|---|---|---|---|---|\n";
    for (const auto& r : t.rows) emit(body_row(r, scale));
    out += '\n' + std::string(kNote) + "\n\n" + reference_line(t) + '\n';
  }
  return out;
}

TableRow to_row(const SpecEstimate& est) {
  const auto& f = est.fit;
  return {est.spec.kind, f.intercept, f.slope, f.se_intercept, f.se_slope, f.t_intercept,
          f.t_slope, f.p_intercept, f.p_slope, f.r_squared, f.durbin_watson,
          static_cast<long>(f.df), static_cast<long>(f.n), est.scale};
}

std::string rt(double v) { return text::round_trip(v); }

}  // namespace

std::string to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::aligned_text: return "aligned-text";
    case OutputFormat::delimited: return "delimited";
    case OutputFormat::markdown: return "markdown";
  }
  return "?";
}

std::string to_string(RenderScale scale) {
  return scale == RenderScale::percent ? "percent" : "fraction";
}

ReportTable tabulate(const VerdoornReport& report) {
  ReportTable t;
  t.cell = report.cell;
  for (const auto kind : kAllSpecs) t.rows[static_cast<std::size_t>(kind)] = to_row(report.get(kind));
  t.identities = report.identities;
  return t;
}

std::string coefficient_cell(double value, double t, double p, int decimals) {
  return text::fixed(value, decimals) + std::string(stars(mark_significance(p))) + " (" +
         text::fixed(t, decimals) + ")";
}

std::string ee_cell(const ScaleVerdict& verdict, int decimals) {
  switch (verdict.label) {
    case ScaleLabel::unbounded: return "∞";
    case ScaleLabel::unacceptable: return "---";
    default: return text::fixed(verdict.value, decimals);
  }
}

std::string render_table(const VerdoornReport& report, OutputFormat format, RenderScale scale) {
  const ReportTable t = tabulate(report);
  return render_tables(std::span<const ReportTable>(&t, 1), format, scale);
}

std::string render_tables(std::span<const ReportTable> tables, OutputFormat format,
                          RenderScale scale) {
  switch (format) {
    case OutputFormat::aligned_text: return render_aligned(tables, scale);
    case OutputFormat::delimited: return render_delimited(tables, scale);
    case OutputFormat::markdown: return render_markdown(tables, scale);
  }
  return {};
}

void write_results_header(std::ostream& out, char d) {
  const char* cols[] = {"cell", "spec", "intercept", "slope", "se_i", "se_s", "t_i", "t_s",
                        "p_i",  "p_s",  "r2",        "dw",    "df",   "n",    "ee_value", "ee_label"};
  for (std::size_t i = 0; i < std::size(cols); ++i) out << (i ? std::string(1, d) : "") << cols[i];
  out << '\n';
}

void write_results(std::ostream& out, const VerdoornReport& report, char d) {
  const std::string cell = report.cell.to_string();
  for (const auto kind : kAllSpecs) {
    const auto& est = report.get(kind);
    const auto& f = est.fit;
    out << cell << d << to_string(kind) << d << rt(f.intercept) << d << rt(f.slope) << d
        << rt(f.se_intercept) << d << rt(f.se_slope) << d << rt(f.t_intercept) << d
        << rt(f.t_slope) << d << rt(f.p_intercept) << d << rt(f.p_slope) << d << rt(f.r_squared)
        << d << rt(f.durbin_watson) << d << f.df << d << f.n << d;
    if (est.scale) out << rt(est.scale->value) << d << to_string(est.scale->label);
    else out << d;
    out << '\n';
  }
  out << cell << d << "identity";
  for (const double g : report.identities.gaps()) out << d << rt(g);
  for (int i = 0; i < 8; ++i) out << d;
  out << '\n';
}

std::vector<ReportTable> read_results(std::istream& in, char delimiter) {
  std::string line;
  if (!text::read_line(in, line)) throw ParseError(1, "empty results file");
  const auto header = text::split(line, delimiter);
  std::map<std::string, std::size_t, std::less<>> col;
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(std::string(text::trim(header[i])), i);
  const auto index = [&](std::string_view name) {
    const auto it = col.find(name);
    if (it == col.end()) throw ParseError(1, "missing column '" + std::string(name) + "'");
    return it->second;
  };
  const std::size_t c_cell = index("cell"), c_spec = index("spec"), c_ee_v = index("ee_value"),
                    c_ee_l = index("ee_label"), c_df = index("df"), c_n = index("n");
  const std::array numeric_cols{index("intercept"), index("slope"), index("se_i"), index("se_s"),
                                index("t_i"),       index("t_s"),   index("p_i"),  index("p_s"),
                                index("r2"),        index("dw")};

  std::vector<ReportTable> tables;
  std::map<std::string, std::size_t> table_of;
  std::map<std::string, unsigned> seen_mask;
  std::size_t line_no = 1;
  while (text::read_line(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(line, delimiter);
    if (f.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(f.size()));
    }
    const std::string cell(text::trim(f[c_cell]));
    auto [it, inserted] = table_of.emplace(cell, tables.size());
    if (inserted) {
      tables.emplace_back();
      tables.back().cell = CellLabel::parse(cell);
    }
    ReportTable& t = tables[it->second];
    const auto num = [&](std::size_t c) {
      const auto v = text::parse_double(f[c]);
      if (!v) throw ParseError(line_no, "non-numeric field '" + std::string(f[c]) + "'");
      return *v;
    };
    const auto spec = text::trim(f[c_spec]);
    if (spec == "identity") {
      auto& id = t.identities;
      double* gaps[] = {&id.intercept_negation_gap, &id.slope_complement_gap,
                        &id.rowthorn_intercept_gap, &id.rowthorn_slope_gap,
                        &id.dw_verdoorn_kaldor_gap, &id.dw_rowthorn_gap};
      for (std::size_t g = 0; g < 6; ++g) *gaps[g] = num(numeric_cols[g]);
      if (seen_mask[cell] & (1u << 4)) throw ParseError(line_no, "duplicate identity row for " + cell);
      seen_mask[cell] |= 1u << 4;
      continue;
    }
    const auto kind = parse_spec_kind(spec);
    if (!kind) throw ParseError(line_no, "unknown spec '" + std::string(spec) + "'");
    const unsigned bit = 1u << static_cast<unsigned>(*kind);
    if (seen_mask[cell] & bit) {
      throw ParseError(line_no, "duplicate " + std::string(spec) + " row for " + cell);
    }
    TableRow& r = t.rows[static_cast<std::size_t>(*kind)];
    r.kind = *kind;
    r.intercept = num(numeric_cols[0]);
    r.slope = num(numeric_cols[1]);
    r.se_intercept = num(numeric_cols[2]);
    r.se_slope = num(numeric_cols[3]);
    r.t_intercept = num(numeric_cols[4]);
    r.t_slope = num(numeric_cols[5]);
    r.p_intercept = num(numeric_cols[6]);
    r.p_slope = num(numeric_cols[7]);
    r.r_squared = num(numeric_cols[8]);
    r.durbin_watson = num(numeric_cols[9]);
    const auto df = text::parse_integer(f[c_df]);
    const auto n = text::parse_integer(f[c_n]);
    if (!df || !n) throw ParseError(line_no, "non-integer df or n");
    r.df = static_cast<long>(*df);
    r.n = static_cast<long>(*n);
    if (!text::trim(f[c_ee_l]).empty()) {
      const auto label = parse_scale_label(text::trim(f[c_ee_l]));
      if (!label) throw ParseError(line_no, "unknown ee_label");
      r.scale = ScaleVerdict{num(c_ee_v), *label};
    }
    seen_mask[cell] |= bit;
  }
  for (const auto& [cell, mask] : seen_mask) {
    if (mask != 0x1F) throw ParseError(0, "incomplete results for cell " + cell);
  }
  return tables;
}

}  // namespace verdoorn
