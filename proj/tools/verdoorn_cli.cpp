// verdoorn: estimate productivity/output/employment regressions on regional
// sector panels and print growth-regression tables.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "verdoorn/dataset.hpp"
#include "verdoorn/errors.hpp"
#include "verdoorn/montecarlo.hpp"
#include "verdoorn/report.hpp"
#include "verdoorn/verdoorn.hpp"

namespace {

using namespace verdoorn;

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitEstimation = 4;
constexpr int kExitInvariant = 5;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return kExitParse;
    case ErrorKind::validation: return kExitValidation;
    case ErrorKind::estimation: return kExitEstimation;
    case ErrorKind::invariant: return kExitInvariant;
  }
  return kExitInvariant;
}

struct RunConfig {
  std::string input;
  Schema schema;
  std::string mode = "pooled";
  std::vector<std::string> sectors;
  bool merge = false;
  std::string growth = "log";
  std::string format = "aligned-text";
  std::string scale = "fraction";
  std::string output;
  std::string results;
  std::string rejects;
  bool skip_rejected = false;
  bool dw_within_region = false;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(0, "cannot write '" + path + "'");
  return out;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    open_output(path) << content;
  }
}

std::vector<PanelObservation> load(const RunConfig& cfg) {
  auto in = open_input(cfg.input);
  LoadResult loaded = load_panel(in, cfg.schema);
  if (!cfg.rejects.empty()) {
    auto out = open_output(cfg.rejects);
    write_rejections(out, loaded.rejections, cfg.schema.delimiter);
  }
  if (!cfg.skip_rejected) loaded.throw_if_rejected();
  return std::move(loaded.observations);
}

std::vector<GrowthSeries> build_cells(const std::vector<GrowthObservation>& growth,
                                      const RunConfig& cfg) {
  const std::set<std::string> filter(cfg.sectors.begin(), cfg.sectors.end());
  const bool cross = cfg.mode == "cross-section";
  std::vector<GrowthObservation> kept;
  for (const auto& g : growth) {
    if (filter.empty() || filter.count(g.sector)) kept.push_back(g);
  }
  if (kept.empty()) throw ValidationError("no growth observations match the sector filter");

  std::vector<GrowthSeries> cells;
  if (cfg.merge) {
    cells.push_back(cross ? cross_section(kept) : pool(kept, {}, MergeMode::merged));
    return cells;
  }
  auto sectors = sectors_of(kept);
  std::sort(sectors.begin(), sectors.end());
  for (const auto& sector : sectors) {
    if (cross) {
      std::vector<GrowthObservation> one;
      std::copy_if(kept.begin(), kept.end(), std::back_inserter(one),
                   [&](const auto& g) { return g.sector == sector; });
      cells.push_back(cross_section(one));
    } else {
      cells.push_back(pool(kept, {sector}, MergeMode::per_sector));
    }
  }
  return cells;
}

OutputFormat parse_format(const std::string& s) {
  if (s == "delimited") return OutputFormat::delimited;
  if (s == "markdown") return OutputFormat::markdown;
  return OutputFormat::aligned_text;
}

RenderScale parse_scale(const std::string& s) {
  return s == "percent" ? RenderScale::percent : RenderScale::fraction;
}

void run_estimate(const RunConfig& cfg) {
  const auto panel = load(cfg);
  const auto growth = growth_rates(panel, cfg.growth == "percent" ? GrowthMode::percent
                                                                  : GrowthMode::log);
  const EstimateOptions options{cfg.dw_within_region};

  std::vector<ReportTable> tables;
  std::ostringstream results;
  write_results_header(results);
  for (const auto& series : build_cells(growth, cfg)) {
    VerdoornReport report;
    try {
      report = run_cell(series, options);
    } catch (const Error& err) {
      throw Error(err.kind(), "cell '" + series.label + "': " + err.what());
    }
    write_results(results, report);
    tables.push_back(tabulate(report));
  }
  emit(cfg.output, render_tables(tables, parse_format(cfg.format), parse_scale(cfg.scale)));
  if (!cfg.results.empty()) open_output(cfg.results) << results.str();
}

void add_input_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("-i,--input", cfg.input, "Level panel file (delimited text with header)")
      ->required();
  cmd->add_option("--delimiter", cfg.schema.delimiter, "Field delimiter")->capture_default_str();
  cmd->add_option("--col-region", cfg.schema.region, "Region column name")->capture_default_str();
  cmd->add_option("--col-sector", cfg.schema.sector, "Sector column name")->capture_default_str();
  cmd->add_option("--col-year", cfg.schema.year, "Year column name")->capture_default_str();
  cmd->add_option("--col-output", cfg.schema.output, "Output level column name")
      ->capture_default_str();
  cmd->add_option("--col-employment", cfg.schema.employment, "Employment level column name")
      ->capture_default_str();
  cmd->add_option("--rejects", cfg.rejects, "Write the rejection report (line, reason) here");
  cmd->add_flag("--skip-rejected", cfg.skip_rejected,
                "Estimate on the valid rows instead of failing when rows are rejected");
  cmd->add_option("--growth", cfg.growth, "Growth-rate definition")
      ->check(CLI::IsMember({"log", "percent"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verdoorn, Kaldor and Rowthorn regressions on regional sector panels"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* est = app.add_subcommand("estimate", "Estimate the four specifications and print tables");
  add_input_options(est, cfg);
  est->add_option("--mode", cfg.mode, "Estimation layout")
      ->check(CLI::IsMember({"pooled", "cross-section"}))
      ->capture_default_str();
  est->add_option("--sector", cfg.sectors, "Sector to include (repeatable; default: all)");
  est->add_flag("--merge", cfg.merge, "Estimate the selected sectors together in one cell");
  est->add_option("--format", cfg.format, "Table format")
      ->check(CLI::IsMember({"aligned-text", "delimited", "markdown"}))
      ->capture_default_str();
  est->add_option("--scale", cfg.scale, "Display scale for constants")
      ->check(CLI::IsMember({"fraction", "percent"}))
      ->capture_default_str();
  est->add_option("-o,--output", cfg.output, "Table output file (default: stdout)");
  est->add_option("--results", cfg.results, "Full-precision results file");
  est->add_flag("--dw-within-region", cfg.dw_within_region,
                "Durbin-Watson ignores residual pairs that cross a region boundary");

  RunConfig growth_cfg;
  std::string series_out;
  auto* growth = app.add_subcommand("growth", "Export growth rates in the interchange format");
  add_input_options(growth, growth_cfg);
  growth->add_option("--mode", growth_cfg.mode, "Layout")
      ->check(CLI::IsMember({"pooled", "cross-section"}))
      ->capture_default_str();
  growth->add_option("--sector", growth_cfg.sectors, "Sector to include (repeatable)");
  growth->add_flag("--merge", growth_cfg.merge, "Stack the selected sectors into one series");
  growth->add_option("-o,--output", series_out, "Output file (default: stdout)");

  RunConfig infl_cfg;
  std::string infl_out;
  auto* infl = app.add_subcommand("influence", "Leave-one-region-out Verdoorn refits");
  add_input_options(infl, infl_cfg);
  infl->add_option("--sector", infl_cfg.sectors, "Sector to include (repeatable)");
  infl->add_flag("--merge", infl_cfg.merge, "Stack the selected sectors into one series");
  infl->add_option("-o,--output", infl_out, "Output file (default: stdout)");

  std::string dgp_path;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Write a synthetic level panel");
  gen->add_option("-c,--config", dgp_path, "Experiment config (key = value)")->required();
  gen->add_option("-o,--output", gen_out, "Output file (default: stdout)");

  std::string sim_out;
  std::string experiment = "experiment";
  int replications = 1000;
  unsigned threads = 0;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo recovery experiment");
  sim->add_option("-c,--config", dgp_path, "Experiment config (key = value)")->required();
  sim->add_option("-r,--replications", replications, "Number of replications")
      ->capture_default_str();
  sim->add_option("--threads", threads, "Worker threads (0: hardware concurrency)")
      ->capture_default_str();
  sim->add_option("--name", experiment, "Experiment label in the summary row")
      ->capture_default_str();
  sim->add_option("-o,--output", sim_out, "Summary file (default: stdout)");

  std::string results_in;
  std::string render_format = "aligned-text";
  std::string render_scale = "fraction";
  std::string render_out;
  auto* render = app.add_subcommand("render", "Re-render tables from a results file");
  render->add_option("results", results_in, "Results file written by estimate --results")
      ->required();
  render->add_option("--format", render_format, "Table format")
      ->check(CLI::IsMember({"aligned-text", "delimited", "markdown"}))
      ->capture_default_str();
  render->add_option("--scale", render_scale, "Display scale for constants")
      ->check(CLI::IsMember({"fraction", "percent"}))
      ->capture_default_str();
  render->add_option("-o,--output", render_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*est) {
      run_estimate(cfg);
    } else if (*growth) {
      const auto panel = load(growth_cfg);
      const auto rates = growth_rates(panel, growth_cfg.growth == "percent" ? GrowthMode::percent
                                                                           : GrowthMode::log);
      std::ostringstream out;
      for (const auto& series : build_cells(rates, growth_cfg)) write_series(out, series);
      emit(series_out, out.str());
    } else if (*infl) {
      const auto panel = load(infl_cfg);
      const auto rates = growth_rates(panel, infl_cfg.growth == "percent" ? GrowthMode::percent
                                                                         : GrowthMode::log);
      std::ostringstream out;
      for (const auto& series : build_cells(rates, infl_cfg)) {
        out << "# " << series.label << '\n';
        write_influence(out, influence(series));
      }
      emit(infl_out, out.str());
    } else if (*gen) {
      auto in = open_input(dgp_path);
      const DgpConfig dgp = read_dgp_config(in);
      std::ostringstream out;
      write_panel(out, generate(dgp));
      emit(gen_out, out.str());
    } else if (*sim) {
      auto in = open_input(dgp_path);
      const DgpConfig dgp = read_dgp_config(in);
      const auto summary = recovery_experiment(dgp, replications, threads);
      std::ostringstream out;
      write_summary_header(out);
      write_summary_row(out, experiment, dgp, summary);
      emit(sim_out, out.str());
    } else if (*render) {
      auto in = open_input(results_in);
      const auto tables = read_results(in);
      emit(render_out, render_tables(tables, parse_format(render_format), parse_scale(render_scale)));
    }
  } catch (const Error& err) {
    std::cerr << "verdoorn: " << err.what() << '\n';
    return exit_code(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "verdoorn: internal error: " << err.what() << '\n';
    return kExitInvariant;
  }
  return 0;
}
