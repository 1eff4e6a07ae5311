#pragma once

// Table rendering for estimated cells and the full-precision results file
// the tables can be re-rendered from.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "verdoorn/verdoorn.hpp"

namespace verdoorn {

enum class OutputFormat { aligned_text, delimited, markdown };
/// How constants are shown. Slopes are elasticities and never rescaled.
enum class RenderScale { fraction, percent };

std::string to_string(OutputFormat format);
std::string to_string(RenderScale scale);

/// Everything a rendered row shows, at full precision.
struct TableRow {
  SpecKind kind = SpecKind::verdoorn;
  double intercept = 0;
  double slope = 0;
  double se_intercept = 0;
  double se_slope = 0;
  double t_intercept = 0;
  double t_slope = 0;
  double p_intercept = 1;
  double p_slope = 1;
  double r_squared = 0;
  double durbin_watson = 2;
  long df = 0;
  long n = 0;
  std::optional<ScaleVerdict> scale;
};

struct ReportTable {
  CellLabel cell;
  std::array<TableRow, 4> rows;
  IdentityReport identities;
};

ReportTable tabulate(const VerdoornReport& report);

/// "0.878* (12.527)": value, stars, t-statistic in parentheses.
std::string coefficient_cell(double value, double t, double p, int decimals = 3);

/// "8.197", "∞" for unbounded, "---" for unacceptable.
std::string ee_cell(const ScaleVerdict& verdict, int decimals = 3);

std::string render_table(const VerdoornReport& report, OutputFormat format = OutputFormat::aligned_text,
                         RenderScale scale = RenderScale::fraction);

/// Several cells; the delimited format emits a single header row.
std::string render_tables(std::span<const ReportTable> tables, OutputFormat format,
                          RenderScale scale);

/// Machine-readable results: one row per (cell, specification) plus one
/// "identity" row per cell whose intercept..t_s columns hold the six gaps.
void write_results_header(std::ostream& out, char delimiter = ',');
void write_results(std::ostream& out, const VerdoornReport& report, char delimiter = ',');
std::vector<ReportTable> read_results(std::istream& in, char delimiter = ',');

}  // namespace verdoorn
