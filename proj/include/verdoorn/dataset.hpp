#pragma once

// Level panels (region x sector x year), their growth-rate transform and the
// pooled / cross-section layouts the estimators run on.

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace verdoorn {

struct PanelObservation {
  std::string region;
  std::string sector;
  int year = 0;
  double output = 0;
  double employment = 0;
};

/// Column names and delimiter of a level file.
struct Schema {
  std::string region = "region";
  std::string sector = "sector";
  std::string year = "year";
  std::string output = "output";
  std::string employment = "employment";
  char delimiter = ',';
};

struct Rejection {
  std::size_t line = 0;
  std::string reason;
};

struct LoadResult {
  std::vector<PanelObservation> observations;
  std::vector<Rejection> rejections;

  /// Throws ValidationError listing every rejected cell, if any.
  void throw_if_rejected() const;
};

/// Reads a delimited level file. Structural problems (missing columns, wrong
/// arity, non-numeric fields) throw ParseError; rows that parse but break a
/// panel invariant go to the rejection report.
LoadResult load_panel(std::istream& in, const Schema& schema = {});

void write_rejections(std::ostream& out, const std::vector<Rejection>& rejections,
                      char delimiter = ',');

void write_panel(std::ostream& out, const std::vector<PanelObservation>& panel,
                 char delimiter = ',');

enum class GrowthMode { log, percent };

/// One transition year_to - 1 -> year_to. p == q - e exactly.
struct GrowthObservation {
  std::string region;
  std::string sector;
  int year_to = 0;
  double q = 0;
  double e = 0;
  double p = 0;
};

enum class Variable { p, q, e };

enum class SeriesMode { pooled, cross_section };

struct GrowthSeries {
  std::string label;
  SeriesMode mode = SeriesMode::pooled;
  std::vector<GrowthObservation> observations;
  /// First level year covered; set by cross_section, whose rows lose it.
  int period_start = 0;

  std::size_t size() const { return observations.size(); }
  Eigen::VectorXd column(Variable v) const;
  /// Dense region index per observation, numbered in order of appearance.
  std::vector<int> region_groups() const;
  std::vector<std::string> regions() const;
  /// Level years spanned by the transitions, e.g. {1986, 1994}.
  std::pair<int, int> period() const;
};

/// Consecutive-year growth rates per (region, sector). Output is sorted by
/// sector, region, year. Gaps produce no observation.
std::vector<GrowthObservation> growth_rates(const std::vector<PanelObservation>& panel,
                                            GrowthMode mode = GrowthMode::log);

enum class MergeMode { per_sector, merged };

/// Stacks growth observations region-major, year-ascending. An empty filter
/// keeps every sector. per_sector requires the filter to leave one sector;
/// merged places sector outermost.
GrowthSeries pool(const std::vector<GrowthObservation>& growth,
                  const std::set<std::string>& sector_filter = {},
                  MergeMode merge = MergeMode::per_sector);

/// One observation per region holding the mean q and e of its transitions.
GrowthSeries cross_section(const std::vector<GrowthObservation>& growth);

/// Distinct sectors in order of first appearance.
std::vector<std::string> sectors_of(const std::vector<GrowthObservation>& growth);

/// Interchange format: region, sector, year_to, q, e, p at round-trip precision.
void write_series(std::ostream& out, const GrowthSeries& series, char delimiter = ',');
GrowthSeries read_series(std::istream& in, std::string label = {},
                         SeriesMode mode = SeriesMode::pooled, char delimiter = ',');

std::string to_string(SeriesMode mode);

}  // namespace verdoorn
