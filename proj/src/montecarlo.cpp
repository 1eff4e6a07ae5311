#include "verdoorn/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <thread>

#include "verdoorn/errors.hpp"
#include "verdoorn/text.hpp"

namespace verdoorn {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string two_digit(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", i);
  return buf;
}

double draw_q(Rng& rng, const QLaw& law) {
  return law.kind == QDistribution::uniform ? rng.uniform(law.first, law.second)
                                            : rng.normal(law.first, law.second);
}

struct Replication {
  double b = 0;
  bool covered = false;
};

Replication replicate(const DgpConfig& config, int index, double t_crit) {
  DgpConfig cfg = config;
  cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(index));
  const auto growth = growth_rates(generate(cfg));
  const auto series = pool(growth, {}, cfg.sectors == 1 ? MergeMode::per_sector : MergeMode::merged);
  const auto est = estimate(series, SpecKind::verdoorn);
  const double half_width = t_crit * est.fit.se_slope;
  return {est.fit.slope, std::abs(est.fit.slope - config.true_b) <= half_width};
}

}  // namespace

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

void validate(const DgpConfig& config) {
  if (!std::isfinite(config.true_b) || !std::isfinite(config.true_a)) {
    throw ValidationError("dgp: true_a and true_b must be finite");
  }
  if (!(config.sigma >= 0) || !std::isfinite(config.sigma)) {
    throw ValidationError("dgp: sigma must be finite and >= 0");
  }
  if (config.regions < 1 || config.transitions < 1 || config.sectors < 1) {
    throw ValidationError("dgp: regions, transitions and sectors must be >= 1");
  }
  const auto& law = config.q_law;
  if (law.kind == QDistribution::uniform && !(law.first < law.second)) {
    throw ValidationError("dgp: uniform q_law needs lower < upper");
  }
  if (law.kind == QDistribution::normal && !(law.second >= 0)) {
    throw ValidationError("dgp: normal q_law needs sd >= 0");
  }
}

DgpConfig read_dgp_config(std::istream& in) {
  DgpConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (text::read_line(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = text::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const auto key = text::trim(view.substr(0, eq));
    const auto value = text::trim(view.substr(eq + 1));

    const auto real = [&] {
      const auto v = text::parse_double(value);
      if (!v) throw ParseError(line_no, "non-numeric value for " + std::string(key));
      return *v;
    };
    const auto integer = [&] {
      const auto v = text::parse_integer(value);
      if (!v) throw ParseError(line_no, "non-integer value for " + std::string(key));
      return *v;
    };

    if (key == "true_b") {
      config.true_b = real();
    } else if (key == "true_a") {
      config.true_a = real();
    } else if (key == "sigma") {
      config.sigma = real();
    } else if (key == "regions") {
      config.regions = static_cast<int>(integer());
    } else if (key == "transitions") {
      config.transitions = static_cast<int>(integer());
    } else if (key == "sectors") {
      config.sectors = static_cast<int>(integer());
    } else if (key == "start_year") {
      config.start_year = static_cast<int>(integer());
    } else if (key == "seed") {
      const auto v = integer();
      if (v < 0) throw ParseError(line_no, "seed must be non-negative");
      config.seed = static_cast<std::uint64_t>(v);
    } else if (key == "q_law") {
      std::vector<std::string_view> parts;
      for (const auto part : text::split(value, ' ')) {
        if (!text::trim(part).empty()) parts.push_back(text::trim(part));
      }
      if (parts.size() != 3) throw ParseError(line_no, "q_law expects '<uniform|normal> <a> <b>'");
      if (parts[0] == "uniform") {
        config.q_law.kind = QDistribution::uniform;
      } else if (parts[0] == "normal") {
        config.q_law.kind = QDistribution::normal;
      } else {
        throw ParseError(line_no, "unknown q_law '" + std::string(parts[0]) + "'");
      }
      const auto a = text::parse_double(parts[1]);
      const auto b = text::parse_double(parts[2]);
      if (!a || !b) throw ParseError(line_no, "non-numeric q_law parameter");
      config.q_law.first = *a;
      config.q_law.second = *b;
    } else {
      throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  validate(config);
  return config;
}

void write_dgp_config(std::ostream& out, const DgpConfig& c) {
  out << "true_b = " << text::round_trip(c.true_b) << '\n'
      << "true_a = " << text::round_trip(c.true_a) << '\n'
      << "sigma = " << text::round_trip(c.sigma) << '\n'
      << "q_law = " << (c.q_law.kind == QDistribution::uniform ? "uniform " : "normal ")
      << text::round_trip(c.q_law.first) << ' ' << text::round_trip(c.q_law.second) << '\n'
      << "regions = " << c.regions << '\n'
      << "transitions = " << c.transitions << '\n'
      << "seed = " << c.seed << '\n'
      << "sectors = " << c.sectors << '\n'
      << "start_year = " << c.start_year << '\n';
}

std::vector<PanelObservation> generate(const DgpConfig& config) {
  validate(config);
  std::vector<PanelObservation> panel;
  panel.reserve(static_cast<std::size_t>(config.sectors) * config.regions * (config.transitions + 1));
  for (int s = 0; s < config.sectors; ++s) {
    const std::string sector = "S" + two_digit(s + 1);
    for (int r = 0; r < config.regions; ++r) {
      const std::string region = "R" + two_digit(r + 1);
      Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(r)));
      double log_output = 0;
      double log_employment = 0;
      panel.push_back({region, sector, config.start_year, 100.0, 100.0});
      for (int t = 1; t <= config.transitions; ++t) {
        const double q = draw_q(rng, config.q_law);
        const double p = config.true_a + config.true_b * q + config.sigma * rng.normal();
        log_output += q;
        log_employment += q - p;
        panel.push_back({region, sector, config.start_year + t, 100.0 * std::exp(log_output),
                         100.0 * std::exp(log_employment)});
      }
    }
  }
  return panel;
}

RecoverySummary recovery_experiment(const DgpConfig& config, int replications, unsigned threads) {
  validate(config);
  if (replications < 100) throw ValidationError("recovery_experiment: need >= 100 replications");
  const Eigen::Index df =
      static_cast<Eigen::Index>(config.regions) * config.transitions * config.sectors - 2;
  if (df < 1) {
    throw EstimationError(EstimationFailure::sample_too_small,
                          "recovery_experiment: fewer than 3 observations per replication");
  }
  const double t_crit = t_critical(0.05, df);

  std::vector<Replication> results(static_cast<std::size_t>(replications));
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(replications));
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = static_cast<int>(w); i < replications; i += static_cast<int>(threads)) {
            results[static_cast<std::size_t>(i)] = replicate(config, i, t_crit);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  RecoverySummary summary;
  summary.replications = replications;
  double sum = 0;
  int covered = 0;
  for (const auto& r : results) {
    sum += r.b;
    covered += r.covered ? 1 : 0;
  }
  summary.mean_b = sum / replications;
  double ss = 0;
  for (const auto& r : results) ss += (r.b - summary.mean_b) * (r.b - summary.mean_b);
  summary.sd_b = std::sqrt(ss / (replications - 1));
  summary.mc_standard_error = summary.sd_b / std::sqrt(static_cast<double>(replications));
  summary.coverage_95 = static_cast<double>(covered) / replications;
  return summary;
}

void write_summary_header(std::ostream& out, char d) {
  out << "experiment" << d << "true_b" << d << "true_a" << d << "sigma" << d << "regions" << d
      << "transitions" << d << "sectors" << d << "seed" << d << "replications" << d << "mean_b"
      << d << "sd_b" << d << "mc_se" << d << "coverage_95\n";
}

void write_summary_row(std::ostream& out, const std::string& experiment, const DgpConfig& c,
                       const RecoverySummary& s, char d) {
  out << experiment << d << text::round_trip(c.true_b) << d << text::round_trip(c.true_a) << d
      << text::round_trip(c.sigma) << d << c.regions << d << c.transitions << d << c.sectors << d
      << c.seed << d << s.replications << d << text::round_trip(s.mean_b) << d
      << text::round_trip(s.sd_b) << d << text::round_trip(s.mc_standard_error) << d
      << text::round_trip(s.coverage_95) << '\n';
}

std::vector<InfluenceRecord> influence(const GrowthSeries& series) {
  const auto regions = series.regions();
  if (regions.size() < 3) {
    throw EstimationError(EstimationFailure::insufficient_units,
                          "influence: need at least 3 regions, got " +
                              std::to_string(regions.size()));
  }
  const double b_full = estimate(series, SpecKind::verdoorn).fit.slope;
  std::vector<InfluenceRecord> records;
  records.reserve(regions.size());
  for (const auto& region : regions) {
    GrowthSeries reduced;
    reduced.label = series.label + " without " + region;
    reduced.mode = series.mode;
    std::copy_if(series.observations.begin(), series.observations.end(),
                 std::back_inserter(reduced.observations),
                 [&](const GrowthObservation& o) { return o.region != region; });
    const double b = estimate(reduced, SpecKind::verdoorn).fit.slope;
    records.push_back({region, series.size() - reduced.size(), b, b_full - b, economies_of_scale(b)});
  }
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::abs(a.delta_b) > std::abs(b.delta_b);
  });
  return records;
}

void write_influence(std::ostream& out, const std::vector<InfluenceRecord>& records, char d) {
  out << "left_out" << d << "removed" << d << "b_without" << d << "delta_b" << d << "ee_value" << d
      << "ee_label\n";
  for (const auto& r : records) {
    out << r.left_out << d << r.removed << d << text::round_trip(r.b_without) << d
        << text::round_trip(r.delta_b) << d << text::round_trip(r.ee_without.value) << d
        << to_string(r.ee_without.label) << '\n';
  }
}

}  // namespace verdoorn
