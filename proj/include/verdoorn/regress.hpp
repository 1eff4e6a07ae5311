#pragma once

// Bivariate least squares with the diagnostic set of a growth-regression
// table: coefficients, standard errors, t-statistics, two-sided p-values,
// R^2, Durbin-Watson and degrees of freedom.
//
// Everything here is header-only and templated on the scalar type of the
// Eigen expressions passed in, so the same code serves double and long double.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

#include "verdoorn/errors.hpp"

namespace verdoorn {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Star convention: "*" at 5%, "**" at 10%.
enum class SignificanceMark { five_percent, ten_percent, none };

template <typename Scalar>
struct FitResult {
  Scalar intercept{0};
  Scalar slope{0};
  Scalar se_intercept{0};
  Scalar se_slope{0};
  Scalar t_intercept{0};
  Scalar t_slope{0};
  Scalar p_intercept{1};
  Scalar p_slope{1};
  Scalar r_squared{0};
  Scalar durbin_watson{2};
  Eigen::Index df = 0;
  Eigen::Index n = 0;
  Vector<Scalar> residuals;
  /// Residuals vanish to rounding; durbin_watson then holds 2 by convention.
  bool degenerate_residuals = false;
};

namespace detail {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
template <typename Scalar>
Scalar beta_continued_fraction(Scalar x, Scalar a, Scalar b) {
  constexpr int kMaxIterations = 300;
  constexpr Scalar kTolerance = Scalar(1e-10);
  const Scalar tiny = std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon();

  const Scalar qab = a + b;
  const Scalar qap = a + 1;
  const Scalar qam = a - 1;
  Scalar c = 1;
  Scalar d = 1 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1 / d;
  Scalar h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const Scalar mm = m;
    const Scalar m2 = 2 * mm;
    Scalar aa = mm * (b - mm) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + mm) * (qab + mm) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const Scalar step = d * c;
    h *= step;
    if (std::abs(step - 1) < kTolerance) return h;
  }
  throw EstimationError(EstimationFailure::no_convergence,
                        "incomplete beta continued fraction did not converge (a=" +
                            std::to_string(static_cast<double>(a)) +
                            ", b=" + std::to_string(static_cast<double>(b)) + ")");
}

template <typename Scalar>
Scalar safe_ratio(Scalar num, Scalar den) {
  if (den > 0) return num / den;
  if (num == 0) return 0;
  return num > 0 ? std::numeric_limits<Scalar>::infinity()
                 : -std::numeric_limits<Scalar>::infinity();
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b) for x in [0, 1], a, b > 0.
template <typename Scalar>
Scalar regularized_incomplete_beta(Scalar x, Scalar a, Scalar b) {
  if (!(x >= 0 && x <= 1) || !(a > 0) || !(b > 0)) {
    throw EstimationError(EstimationFailure::invalid_input,
                          "regularized_incomplete_beta: argument out of domain");
  }
  if (x == 0) return 0;
  if (x == 1) return 1;
  using std::exp;
  using std::lgamma;
  using std::log;
  const Scalar front =
      exp(lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * std::log1p(-x));
  if (x < (a + 1) / (a + b + 2)) return front * detail::beta_continued_fraction(x, a, b) / a;
  return 1 - front * detail::beta_continued_fraction(Scalar(1) - x, b, a) / b;
}

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
template <typename Scalar>
Scalar t_two_sided_p(Scalar t, Eigen::Index df) {
  if (df < 1) {
    throw EstimationError(EstimationFailure::invalid_input, "t_two_sided_p: df must be >= 1");
  }
  if (std::isnan(t)) {
    throw EstimationError(EstimationFailure::invalid_input, "t_two_sided_p: t is NaN");
  }
  if (std::isinf(t)) return 0;
  if (t == 0) return 1;
  const Scalar nu = static_cast<Scalar>(df);
  const Scalar x = nu / (nu + t * t);
  const Scalar p = regularized_incomplete_beta(x, nu / 2, Scalar(0.5));
  return std::clamp(p, Scalar(0), Scalar(1));
}

/// Positive t with t_two_sided_p(t, df) == alpha, by bisection.
template <typename Scalar>
Scalar t_critical(Scalar alpha, Eigen::Index df) {
  if (!(alpha > 0 && alpha < 1)) {
    throw EstimationError(EstimationFailure::invalid_input, "t_critical: alpha must be in (0, 1)");
  }
  Scalar lo = 0;
  Scalar hi = 1;
  while (t_two_sided_p(hi, df) > alpha) {
    lo = hi;
    hi *= 2;
  }
  for (int i = 0; i < 200 && hi - lo > std::numeric_limits<Scalar>::epsilon() * 4 * hi; ++i) {
    const Scalar mid = (lo + hi) / 2;
    if (t_two_sided_p(mid, df) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

template <typename Scalar>
SignificanceMark mark_significance(Scalar p) {
  if (p <= Scalar(0.05)) return SignificanceMark::five_percent;
  if (p <= Scalar(0.10)) return SignificanceMark::ten_percent;
  return SignificanceMark::none;
}

constexpr std::string_view stars(SignificanceMark mark) {
  switch (mark) {
    case SignificanceMark::five_percent: return "*";
    case SignificanceMark::ten_percent: return "**";
    case SignificanceMark::none: break;
  }
  return "";
}

/// Durbin-Watson statistic of a residual sequence in its given order.
///
/// When `groups` is non-empty it must label every residual; successive pairs
/// whose labels differ are left out of the numerator (the denominator always
/// covers every residual). An all-zero sequence yields 2.
template <typename Derived>
typename Derived::Scalar durbin_watson(const Eigen::MatrixBase<Derived>& residuals,
                                       std::span<const int> groups = {}) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = residuals.size();
  if (!groups.empty() && static_cast<Eigen::Index>(groups.size()) != n) {
    throw EstimationError(EstimationFailure::invalid_input,
                          "durbin_watson: group labels do not match residual count");
  }
  const Scalar denominator = residuals.squaredNorm();
  if (!(denominator > 0)) return 2;
  Scalar numerator = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!groups.empty() && groups[i] != groups[i - 1]) continue;
    const Scalar diff = residuals(i) - residuals(i - 1);
    numerator += diff * diff;
  }
  return std::clamp(numerator / denominator, Scalar(0), Scalar(4));
}

/// Least-squares fit of y = intercept + slope * x using centered two-pass sums.
///
/// Throws EstimationError for n < 3, mismatched lengths, non-finite input or
/// a regressor without variance. `dw_groups` is forwarded to durbin_watson.
template <typename DerivedX, typename DerivedY>
FitResult<typename DerivedX::Scalar> ols_fit(const Eigen::MatrixBase<DerivedX>& x,
                                             const Eigen::MatrixBase<DerivedY>& y,
                                             std::span<const int> dw_groups = {}) {
  using Scalar = typename DerivedX::Scalar;
  static_assert(std::is_same_v<Scalar, typename DerivedY::Scalar>,
                "ols_fit: x and y must share a scalar type");
  const Eigen::Index n = x.size();
  if (n != y.size()) {
    throw EstimationError(EstimationFailure::invalid_input,
                          "ols_fit: x has " + std::to_string(n) + " values but y has " +
                              std::to_string(y.size()));
  }
  if (n < 3) {
    throw EstimationError(EstimationFailure::sample_too_small,
                          "ols_fit: need at least 3 observations, got " + std::to_string(n));
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw EstimationError(EstimationFailure::invalid_input, "ols_fit: non-finite input");
  }

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar count = static_cast<Scalar>(n);
  const Scalar x_mean = x.mean();
  const Scalar y_mean = y.mean();
  const auto xc = (x.array() - x_mean).eval();
  const auto yc = (y.array() - y_mean).eval();
  const Scalar sxx = xc.square().sum();
  const Scalar x_scale = x.cwiseAbs().maxCoeff();
  if (!(sxx > count * Scalar(16) * eps * eps * x_scale * x_scale)) {
    throw EstimationError(EstimationFailure::degenerate_regressor,
                          "ols_fit: regressor has zero variance");
  }
  const Scalar sxy = (xc * yc).sum();
  const Scalar syy = yc.square().sum();

  FitResult<Scalar> fit;
  fit.n = n;
  fit.df = n - 2;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  fit.residuals = (y.array() - fit.intercept - fit.slope * x.array()).matrix();

  const Scalar ssr = fit.residuals.squaredNorm();
  const Scalar s2 = ssr / static_cast<Scalar>(fit.df);
  fit.se_slope = std::sqrt(s2 / sxx);
  fit.se_intercept = std::sqrt(s2 * (1 / count + x_mean * x_mean / sxx));
  fit.t_slope = detail::safe_ratio(fit.slope, fit.se_slope);
  fit.t_intercept = detail::safe_ratio(fit.intercept, fit.se_intercept);
  fit.p_slope = t_two_sided_p(fit.t_slope, fit.df);
  fit.p_intercept = t_two_sided_p(fit.t_intercept, fit.df);
  fit.r_squared = syy > 0 ? std::clamp(1 - ssr / syy, Scalar(0), Scalar(1)) : Scalar(1);

  const Scalar y_norm2 = std::max(y.squaredNorm(), std::numeric_limits<Scalar>::min());
  fit.degenerate_residuals = ssr <= count * count * eps * eps * y_norm2;
  fit.durbin_watson = fit.degenerate_residuals ? Scalar(2) : durbin_watson(fit.residuals, dw_groups);
  return fit;
}

}  // namespace verdoorn
