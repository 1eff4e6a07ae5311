#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "support/oracles.hpp"
#include "verdoorn/dataset.hpp"
#include "verdoorn/errors.hpp"
#include "verdoorn/montecarlo.hpp"

using namespace verdoorn;

namespace {

LoadResult load_text(const std::string& text, const Schema& schema = {}) {
  std::istringstream in(text);
  return load_panel(in, schema);
}

std::vector<PanelObservation> grid(int regions, int sectors, int years, int first_year = 1986) {
  DgpConfig cfg;
  cfg.regions = regions;
  cfg.sectors = sectors;
  cfg.transitions = years - 1;
  cfg.start_year = first_year;
  cfg.seed = 99;
  return generate(cfg);
}

}  // namespace

TEST_CASE("load_panel reads a minimal file") {
  const auto r = load_text(
      "region,sector,year,output,employment\n"
      "PT11,industry,1986,100,50\n"
      "PT11,industry,1987,110,50\n");
  CHECK(r.observations.size() == 2);
  CHECK(r.rejections.empty());
  CHECK(r.observations[1].output == 110.0);
  CHECK(r.observations[1].year == 1987);
  CHECK_NOTHROW(r.throw_if_rejected());
}

TEST_CASE("load_panel rejects rows that break panel invariants") {
  const auto r = load_text(
      "region,sector,year,output,employment\n"
      "PT11,industry,1986,100,0\n"
      "PT11,industry,1987,110,50\n"
      "PT11,industry,1987,111,50\n"
      "PT11,industry,1988,-3,50\n");
  REQUIRE(r.rejections.size() == 3);
  CHECK(r.rejections[0].line == 2);
  CHECK(r.rejections[0].reason.rfind("non-positive level", 0) == 0);
  CHECK(r.rejections[0].reason.find("employment") != std::string::npos);
  CHECK(r.rejections[1].line == 4);
  CHECK(r.rejections[1].reason.rfind("duplicate key", 0) == 0);
  CHECK(r.rejections[2].reason.find("output") != std::string::npos);
  CHECK(r.observations.size() == 1);
  CHECK_THROWS_AS(r.throw_if_rejected(), ValidationError);

  std::ostringstream report;
  write_rejections(report, r.rejections);
  CHECK(report.str().rfind("line,reason\n2,non-positive level", 0) == 0);
}

TEST_CASE("load_panel parse errors carry the line number") {
  try {
    load_text("region,sector,year,output,employment\nA,s,1990,1,1\nA,s,1991,1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    load_text("region,sector,year,output,employment\nA,s,1990,abc,1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("abc") != std::string::npos);
  }
  CHECK_THROWS_AS(load_text("region,sector,year,output,employment\nA,s,19x0,1,1\n"), ParseError);
  CHECK_THROWS_AS(load_text("region,sector,year,output\nA,s,1990,1\n"), ParseError);
  CHECK_THROWS_AS(load_text(""), ParseError);
}

TEST_CASE("load_panel honours schema mapping and delimiter") {
  Schema schema;
  schema.region = "nuts";
  schema.output = "gva";
  schema.employment = "jobs";
  schema.delimiter = ';';
  const auto r = load_text(
      "\xEF\xBB\xBFyear;nuts;sector;jobs;gva\r\n"
      "1995;PT111;services;20;300\r\n"
      "\r\n"
      "1996;PT111;services;21;310\r\n",
      schema);
  REQUIRE(r.observations.size() == 2);
  CHECK(r.observations[0].region == "PT111");
  CHECK(r.observations[0].employment == 20.0);
  CHECK(r.observations[1].output == 310.0);
}

TEST_CASE("bundled synthetic fixture has 5 regions x 6 sectors x 9 years") {
  std::ifstream in(VERDOORN_TEST_DATA "/synthetic_nuts2.csv");
  REQUIRE(in);
  const auto r = load_panel(in);
  CHECK(r.rejections.empty());
  CHECK(r.observations.size() == 5 * 6 * 9);
}

TEST_CASE("growth_rates on constant and growing levels") {
  std::vector<PanelObservation> panel{{"A", "s", 1990, 100, 50}, {"A", "s", 1991, 100, 50},
                                      {"B", "s", 1990, 100, 50}, {"B", "s", 1991, 110, 50}};
  const auto g = growth_rates(panel);
  REQUIRE(g.size() == 2);
  CHECK(g[0].region == "A");
  CHECK(g[0].q == 0.0);
  CHECK(g[0].e == 0.0);
  CHECK(g[0].p == 0.0);
  CHECK(g[1].year_to == 1991);
  CHECK(g[1].q == doctest::Approx(0.09531017980432493).epsilon(1e-15));
  CHECK(g[1].e == 0.0);
  CHECK(g[1].p == g[1].q);
}

TEST_CASE("growth_rates in percent mode keeps p = q - e by definition") {
  std::vector<PanelObservation> panel{{"A", "s", 1990, 100, 50}, {"A", "s", 1991, 110, 55}};
  const auto g = growth_rates(panel, GrowthMode::percent);
  REQUIRE(g.size() == 1);
  CHECK(g[0].q == doctest::Approx(0.1));
  CHECK(g[0].e == doctest::Approx(0.1));
  CHECK(g[0].p == g[0].q - g[0].e);
}

TEST_CASE("growth_rates skips gaps and reports units without transitions") {
  std::vector<PanelObservation> panel{{"A", "s", 1990, 100, 50}, {"A", "s", 1991, 101, 50},
                                      {"A", "s", 1993, 102, 51}, {"A", "s", 1994, 104, 51}};
  CHECK(growth_rates(panel).size() == 2);

  std::vector<PanelObservation> sparse{{"A", "s", 1990, 100, 50}, {"B", "t", 1992, 100, 50},
                                       {"B", "t", 1994, 100, 50}};
  try {
    growth_rates(sparse);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("A/s") != std::string::npos);
    CHECK(msg.find("B/t") != std::string::npos);
  }
}

TEST_CASE("growth identity, scale and year-translation invariance on random panels") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    DgpConfig cfg;
    cfg.seed = seed;
    cfg.regions = 4;
    cfg.sectors = 2;
    cfg.transitions = 6;
    cfg.sigma = 0.05;
    auto panel = generate(cfg);
    const auto base = growth_rates(panel);
    for (const auto& g : base) CHECK(std::abs(g.p - g.q + g.e) <= 1e-15);

    auto scaled = panel;
    for (auto& o : scaled) {
      if (o.region == "R02") o.output *= 1234.5;
      if (o.sector == "S01") o.employment *= 0.001;
      o.year += 17;
    }
    const auto moved = growth_rates(scaled);
    REQUIRE(moved.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(moved[i].year_to == base[i].year_to + 17);
      CHECK(std::abs(moved[i].q - base[i].q) <= 1e-12);
      CHECK(std::abs(moved[i].e - base[i].e) <= 1e-12);
    }
  }
}

TEST_CASE("observation count matches a brute-force recount on gappy panels") {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    auto panel = grid(6, 3, 10);
    std::vector<PanelObservation> thinned;
    for (const auto& o : panel) {
      if (rng.uniform() > 0.25) thinned.push_back(o);
    }
    const std::size_t expected = oracle::transition_count(thinned);
    if (expected == 0) continue;
    const auto growth = growth_rates(thinned);
    CHECK(growth.size() == expected);
    CHECK(pool(growth, {}, MergeMode::merged).size() == expected);
  }
}

TEST_CASE("pool sizes match the table degrees-of-freedom arithmetic") {
  const auto nuts2 = growth_rates(grid(5, 1, 9));
  CHECK(pool(nuts2).size() == 40);

  const auto nuts3 = growth_rates(grid(28, 1, 5, 1995));
  CHECK(pool(nuts3).size() == 112);

  const auto industries = growth_rates(grid(5, 9, 9));
  CHECK(pool(industries, {}, MergeMode::merged).size() == 360);
  CHECK(pool(industries, {"S03"}).size() == 40);
  CHECK(pool(industries, {"S03"}).label == "S03");
}

TEST_CASE("pool ordering is region-major, year-ascending, sector outermost when merged") {
  const auto growth = growth_rates(grid(3, 2, 4));
  const auto one = pool(growth, {"S02"});
  for (std::size_t i = 1; i < one.size(); ++i) {
    const auto& a = one.observations[i - 1];
    const auto& b = one.observations[i];
    CHECK((a.region < b.region || (a.region == b.region && a.year_to < b.year_to)));
  }
  const auto both = pool(growth, {}, MergeMode::merged);
  CHECK(both.label == "S01+S02");
  CHECK(both.observations.front().sector == "S01");
  CHECK(both.observations.back().sector == "S02");
  CHECK(both.observations[3].region == "R02");
  CHECK(both.period() == std::pair{1986, 1989});
}

TEST_CASE("pool errors") {
  const auto growth = growth_rates(grid(3, 2, 4));
  CHECK_THROWS_AS(pool(growth, {"nope"}), ValidationError);
  CHECK_THROWS_AS(pool(growth, {}, MergeMode::per_sector), ValidationError);
}

TEST_CASE("cross_section averages each region") {
  std::vector<GrowthObservation> g{{"A", "s", 1991, 0.02, 0.01, 0.01},
                                   {"A", "s", 1992, 0.04, 0.00, 0.04},
                                   {"B", "s", 1991, 0.10, 0.05, 0.05}};
  const auto cs = cross_section(g);
  REQUIRE(cs.size() == 2);
  CHECK(cs.mode == SeriesMode::cross_section);
  CHECK(cs.observations[0].q == doctest::Approx(0.03));
  CHECK(cs.observations[0].e == doctest::Approx(0.005));
  CHECK(cs.observations[1].q == 0.10);
  CHECK(cs.observations[1].p == 0.05);
  CHECK(cs.period() == std::pair{1990, 1992});
  for (const auto& o : cs.observations) CHECK(o.p == o.q - o.e);
}

TEST_CASE("cross_section has one row per region of a full panel") {
  const auto growth = growth_rates(grid(28, 1, 5, 1995));
  const auto cs = cross_section(growth);
  CHECK(cs.size() == 28);
  CHECK(cs.period() == std::pair{1995, 1999});
  CHECK_THROWS_AS(cross_section({}), ValidationError);
}

TEST_CASE("interchange round trip is bit-identical") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    DgpConfig cfg;
    cfg.seed = seed;
    cfg.sigma = 0.3;
    cfg.q_law = {QDistribution::uniform, -0.5, 0.7};
    const auto series = pool(growth_rates(generate(cfg)));
    std::stringstream buf;
    write_series(buf, series);
    const auto back = read_series(buf, series.label, series.mode);
    REQUIRE(back.size() == series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto& a = series.observations[i];
      const auto& b = back.observations[i];
      CHECK(a.region == b.region);
      CHECK(a.sector == b.sector);
      CHECK(a.year_to == b.year_to);
      CHECK(std::bit_cast<std::uint64_t>(a.q) == std::bit_cast<std::uint64_t>(b.q));
      CHECK(std::bit_cast<std::uint64_t>(a.e) == std::bit_cast<std::uint64_t>(b.e));
      CHECK(std::bit_cast<std::uint64_t>(a.p) == std::bit_cast<std::uint64_t>(b.p));
    }
  }
}

TEST_CASE("read_series rejects rows that break the identity") {
  std::istringstream in("region,sector,year_to,q,e,p\nA,s,1991,0.1,0.05,0.07\n");
  CHECK_THROWS_AS(read_series(in), ValidationError);
}
