#pragma once

// Synthetic panels with a known productivity/output relation, estimator
// recovery experiments on them, and leave-one-region-out influence.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "verdoorn/dataset.hpp"
#include "verdoorn/verdoorn.hpp"

namespace verdoorn {

/// Seedable generator: std::mt19937_64 (output fixed by the standard) with
/// hand-rolled uniform and Box-Muller normal transforms, so draws do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

/// SplitMix64 finalizer chained over the parts; used for sub-stream seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

enum class QDistribution { uniform, normal };

/// Output growth law. uniform: [first, second); normal: mean first, sd second.
struct QLaw {
  QDistribution kind = QDistribution::normal;
  double first = 0.03;
  double second = 0.03;
};

/// p = true_a + true_b * q + sigma * N(0, 1), e = q - p, for every region and
/// sector over `transitions` year-to-year steps starting at `start_year`.
struct DgpConfig {
  double true_b = 0.45;
  double true_a = 0.0;
  double sigma = 0.01;
  QLaw q_law;
  int regions = 5;
  int transitions = 8;
  std::uint64_t seed = 1;
  int sectors = 1;
  int start_year = 1986;
};

/// Flat key = value file; '#' starts a comment. q_law reads e.g. "normal 0.03 0.02".
DgpConfig read_dgp_config(std::istream& in);
void write_dgp_config(std::ostream& out, const DgpConfig& config);
void validate(const DgpConfig& config);

/// Level panel (base 100) whose log-differences follow the configured law.
/// Regions are named R01.., sectors S01...
std::vector<PanelObservation> generate(const DgpConfig& config);

struct RecoverySummary {
  int replications = 0;
  double mean_b = 0;
  double sd_b = 0;
  /// sd_b / sqrt(replications)
  double mc_standard_error = 0;
  double coverage_95 = 0;
};

/// Repeats generate -> growth_rates -> pool -> Verdoorn fit. Replication i
/// uses derive_seed(config.seed, i); results do not depend on `threads`
/// (0 picks the hardware concurrency).
RecoverySummary recovery_experiment(const DgpConfig& config, int replications,
                                    unsigned threads = 0);

void write_summary_header(std::ostream& out, char delimiter = ',');
void write_summary_row(std::ostream& out, const std::string& experiment, const DgpConfig& config,
                       const RecoverySummary& summary, char delimiter = ',');

struct InfluenceRecord {
  std::string left_out;
  std::size_t removed = 0;
  double b_without = 0;
  double delta_b = 0;  // b_full - b_without
  ScaleVerdict ee_without;
};

/// Leave-one-region-out Verdoorn refits, sorted by |delta_b| descending.
/// Needs at least three regions.
std::vector<InfluenceRecord> influence(const GrowthSeries& series);

void write_influence(std::ostream& out, const std::vector<InfluenceRecord>& records,
                     char delimiter = ',');

}  // namespace verdoorn
