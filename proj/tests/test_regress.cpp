#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "support/oracles.hpp"
#include "verdoorn/montecarlo.hpp"
#include "verdoorn/regress.hpp"

using namespace verdoorn;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v(i++) = x;
  return v;
}

bool close(double a, double b, double rel, double floor = 0) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), floor});
}

struct Sample {
  std::vector<double> x, y;
};

Sample random_sample(Rng& rng) {
  const int n = 3 + static_cast<int>(rng.uniform() * 200);
  const double x_mag = std::pow(10.0, rng.uniform(-3, 3));
  const double y_mag = std::pow(10.0, rng.uniform(-3, 3));
  const double offset = rng.uniform(-2, 2);
  const double slope = rng.uniform(-2, 2);
  const double noise = rng.uniform(0.2, 1.0);
  Sample s;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal() + offset;
    s.x.push_back(x_mag * z);
    s.y.push_back(y_mag * (0.5 + slope * z + noise * rng.normal()));
  }
  return s;
}

Eigen::Map<const Eigen::VectorXd> view(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

TEST_CASE("ols_fit on a perfect line") {
  const auto fit = ols_fit(vec({1, 2, 3}), vec({1, 2, 3}));
  CHECK(fit.intercept == doctest::Approx(0.0));
  CHECK(fit.slope == doctest::Approx(1.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.residuals.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.degenerate_residuals);
  CHECK(fit.durbin_watson == 2.0);
  CHECK(fit.df == 1);
  CHECK(fit.n == 3);
}

TEST_CASE("ols_fit matches hand-solved normal equations") {
  // Sxy = 4.5, Sxx = 5, Syy = 4.75; residuals (0.1, 0.2, -0.7, 0.4).
  const auto fit = ols_fit(vec({0, 1, 2, 3}), vec({1, 2, 2, 4}));
  CHECK(fit.slope == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(fit.residuals(0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(fit.residuals(2) == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(fit.se_slope == doctest::Approx(std::sqrt(0.35 / 5)).epsilon(1e-12));
  CHECK(fit.se_intercept == doctest::Approx(std::sqrt(0.35 * (0.25 + 2.25 / 5))).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1 - 0.7 / 4.75).epsilon(1e-12));
  CHECK(fit.durbin_watson == doctest::Approx(2.03 / 0.7).epsilon(1e-12));
  CHECK(fit.df == 2);
  CHECK_FALSE(fit.degenerate_residuals);
}

TEST_CASE("ols_fit error paths") {
  CHECK_THROWS_AS(ols_fit(vec({1, 2}), vec({1, 2})), EstimationError);
  try {
    (void)ols_fit(vec({1, 2}), vec({1, 2}));
  } catch (const EstimationError& e) {
    CHECK(e.reason() == EstimationFailure::sample_too_small);
  }
  try {
    (void)ols_fit(vec({2, 2, 2, 2}), vec({1, 2, 3, 4}));
    FAIL("expected degenerate regressor");
  } catch (const EstimationError& e) {
    CHECK(e.reason() == EstimationFailure::degenerate_regressor);
  }
  try {
    (void)ols_fit(vec({1, 2, NAN}), vec({1, 2, 3}));
    FAIL("expected invalid input");
  } catch (const EstimationError& e) {
    CHECK(e.reason() == EstimationFailure::invalid_input);
  }
  CHECK_THROWS_AS(ols_fit(vec({1, 2, 3}), vec({1, 2, 3, 4})), EstimationError);
  CHECK_THROWS_AS(ols_fit(vec({1, 2, 3}), vec({1, 2, INFINITY})), EstimationError);
}

TEST_CASE("ols_fit instantiates for long double") {
  Vector<long double> x(4), y(4);
  x << 0, 1, 2, 3;
  y << 1, 2, 2, 4;
  const auto fit = ols_fit(x, y);
  CHECK(static_cast<double>(fit.slope) == doctest::Approx(0.9));
  CHECK(static_cast<double>(fit.p_slope) > 0.0);
}

TEST_CASE("normal equations hold on random samples") {
  Rng rng(7);
  for (int rep = 0; rep < 300; ++rep) {
    const auto s = random_sample(rng);
    const auto fit = ols_fit(view(s.x), view(s.y));
    const double y_scale = view(s.y).cwiseAbs().maxCoeff();
    const double x_scale = view(s.x).cwiseAbs().maxCoeff();
    const auto x = view(s.x);
    CHECK(std::abs(fit.residuals.sum()) <= 1e-9 * y_scale * fit.n);
    CHECK(std::abs(fit.residuals.dot(x)) <= 1e-9 * y_scale * x_scale * fit.n);
    CHECK(fit.r_squared >= 0.0);
    CHECK(fit.r_squared <= 1.0);
    CHECK(fit.durbin_watson >= 0.0);
    CHECK(fit.durbin_watson <= 4.0);
  }
}

TEST_CASE("centered and raw-moment paths agree") {
  Rng rng(11);
  for (int rep = 0; rep < 500; ++rep) {
    const auto s = random_sample(rng);
    const auto fit = ols_fit(view(s.x), view(s.y));
    const auto ref = oracle::ols_raw_moments(s.x, s.y);
    const double y_scale = view(s.y).cwiseAbs().maxCoeff();
    const double x_scale = view(s.x).cwiseAbs().maxCoeff();
    REQUIRE(close(fit.slope, ref.slope, 1e-9, y_scale / x_scale));
    CHECK(close(fit.intercept, ref.intercept, 1e-9, y_scale));
    CHECK(close(fit.se_slope, ref.se_slope, 1e-9));
    CHECK(close(fit.se_intercept, ref.se_intercept, 1e-9));
    CHECK(close(fit.t_slope, ref.t_slope, 1e-9, 1));
    CHECK(close(fit.t_intercept, ref.t_intercept, 1e-9, 1));
    CHECK(close(fit.p_slope, ref.p_slope, 1e-9, 1));
    CHECK(close(fit.p_intercept, ref.p_intercept, 1e-9, 1));
    CHECK(close(fit.r_squared, ref.r_squared, 1e-9, 1));
    CHECK(close(fit.durbin_watson, ref.durbin_watson, 1e-9, 1));
    CHECK(fit.df == ref.df);
  }
}

TEST_CASE("affine response transforms coefficients and keeps inference") {
  Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = random_sample(rng);
    const double alpha = rng.uniform() < 0.5 ? -rng.uniform(0.1, 10) : rng.uniform(0.1, 10);
    const double beta = rng.uniform(-5, 5);
    std::vector<double> y2(s.y.size());
    std::transform(s.y.begin(), s.y.end(), y2.begin(), [&](double v) { return alpha * v + beta; });
    const auto a = ols_fit(view(s.x), view(s.y));
    const auto b = ols_fit(view(s.x), view(y2));
    const double y_scale = std::max(view(s.y).cwiseAbs().maxCoeff(), 1.0);
    CHECK(close(b.slope, alpha * a.slope, 1e-9, std::abs(alpha) * y_scale));
    CHECK(close(b.intercept, alpha * a.intercept + beta, 1e-9, std::abs(alpha) * y_scale + std::abs(beta)));
    CHECK(close(b.r_squared, a.r_squared, 1e-9, 1));
    CHECK(close(b.p_slope, a.p_slope, 1e-9, 1));
  }
}

TEST_CASE("jointly permuting pairs changes only residual order and DW") {
  Rng rng(17);
  const auto s = random_sample(rng);
  std::vector<std::size_t> order(s.x.size());
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  std::vector<double> px, py;
  for (const auto i : order) {
    px.push_back(s.x[i]);
    py.push_back(s.y[i]);
  }
  const auto a = ols_fit(view(s.x), view(s.y));
  const auto b = ols_fit(view(px), view(py));
  CHECK(close(a.slope, b.slope, 1e-9, 1e-3));
  CHECK(close(a.r_squared, b.r_squared, 1e-9, 1));
  CHECK(close(a.t_slope, b.t_slope, 1e-9, 1));
  CHECK(close(a.se_intercept, b.se_intercept, 1e-9));
  std::vector<double> ra(a.residuals.data(), a.residuals.data() + a.n);
  std::vector<double> rb(b.residuals.data(), b.residuals.data() + b.n);
  std::sort(ra.begin(), ra.end());
  std::sort(rb.begin(), rb.end());
  for (std::size_t i = 0; i < ra.size(); ++i) CHECK(close(ra[i], rb[i], 1e-8, 1e-6));
}

TEST_CASE("durbin_watson respects region boundaries when asked") {
  const Eigen::VectorXd u = vec({1, -1, 1, -1});
  CHECK(durbin_watson(u) == doctest::Approx(12.0 / 4.0));
  const std::vector<int> groups{0, 0, 1, 1};
  CHECK(durbin_watson(u, std::span<const int>(groups)) == doctest::Approx(8.0 / 4.0));
  CHECK(durbin_watson(vec({0, 0, 0})) == 2.0);
  const std::vector<int> wrong{0, 1};
  CHECK_THROWS_AS(durbin_watson(u, std::span<const int>(wrong)), EstimationError);
}

TEST_CASE("white-noise residuals give DW near 2") {
  int inside = 0;
  for (int run = 0; run < 100; ++run) {
    Rng rng(derive_seed(2024, static_cast<std::uint64_t>(run)));
    Eigen::VectorXd x(1000), y(1000);
    for (int i = 0; i < 1000; ++i) {
      x(i) = rng.normal();
      y(i) = 0.3 + 0.5 * x(i) + rng.normal();
    }
    const double dw = ols_fit(x, y).durbin_watson;
    inside += (dw >= 1.8 && dw <= 2.2) ? 1 : 0;
  }
  CHECK(inside >= 99);
}

TEST_CASE("t_two_sided_p reference values") {
  CHECK(t_two_sided_p(0.0, 1) == 1.0);
  CHECK(t_two_sided_p(0.0, 38) == 1.0);
  CHECK(t_two_sided_p(12.527, 38) < 1e-14);
  // scipy.stats.t.sf(1.75, 38) * 2
  CHECK(t_two_sided_p(1.750, 38) == doctest::Approx(0.08819026351995414).epsilon(1e-9));
  CHECK(t_two_sided_p(-1.750, 38) == t_two_sided_p(1.750, 38));
  // Cauchy: P(|T| >= 1) = 1/2
  CHECK(t_two_sided_p(1.0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(t_two_sided_p(INFINITY, 5) == 0.0);
  CHECK_THROWS_AS(t_two_sided_p(1.0, 0), EstimationError);
}

TEST_CASE("t_two_sided_p agrees with quadrature of the density") {
  for (const int df : {1, 2, 5, 23, 38, 110, 342}) {
    for (const double t : {0.05, 0.5, 1.0, 1.16, 1.75, 2.0, 3.5, 6.0, 12.527, 40.0}) {
      INFO("df=" << df << " t=" << t);
      CHECK(std::abs(t_two_sided_p(t, df) - oracle::t_two_sided_p(t, df)) <= 1e-8);
    }
  }
}

TEST_CASE("t_two_sided_p is strictly decreasing in |t|") {
  for (const int df : {1, 7, 38, 300}) {
    double prev = 1.0;
    for (double t = 0.01; t < 30; t *= 1.3) {
      const double p = t_two_sided_p(t, df);
      CHECK(p < prev);
      prev = p;
    }
  }
}

TEST_CASE("t_critical inverts the p-value") {
  // scipy.stats.t.ppf(0.975, 38)
  CHECK(t_critical(0.05, 38) == doctest::Approx(2.024394163911969).epsilon(1e-10));
  CHECK(t_two_sided_p(t_critical(0.10, 12), 12) == doctest::Approx(0.10).epsilon(1e-10));
  CHECK_THROWS_AS(t_critical(1.5, 10), EstimationError);
}

TEST_CASE("mark_significance thresholds") {
  CHECK(mark_significance(0.01) == SignificanceMark::five_percent);
  CHECK(mark_significance(0.05) == SignificanceMark::five_percent);
  CHECK(mark_significance(0.08) == SignificanceMark::ten_percent);
  CHECK(mark_significance(0.0882) == SignificanceMark::ten_percent);
  CHECK(mark_significance(0.10) == SignificanceMark::ten_percent);
  CHECK(mark_significance(0.2533) == SignificanceMark::none);
  CHECK(stars(SignificanceMark::five_percent) == "*");
  CHECK(stars(SignificanceMark::ten_percent) == "**");
  CHECK(stars(SignificanceMark::none).empty());
}

TEST_CASE("regularized incomplete beta edge cases") {
  CHECK(regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0);
  CHECK(regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0);
  // I_x(1, 1) = x; I_x(a, 1) = x^a
  CHECK(regularized_incomplete_beta(0.3, 1.0, 1.0) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(regularized_incomplete_beta(0.3, 2.5, 1.0) == doctest::Approx(std::pow(0.3, 2.5)).epsilon(1e-10));
  CHECK_THROWS_AS(regularized_incomplete_beta(1.5, 1.0, 1.0), EstimationError);
}
