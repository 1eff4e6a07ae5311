#pragma once

// The four productivity/output/employment regressions, the returns-to-scale
// index derived from the productivity slope, and the cross-equation identity
// checks that follow from p = q - e.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "verdoorn/dataset.hpp"
#include "verdoorn/regress.hpp"

namespace verdoorn {

/// Historical productivity-on-output elasticity and its reported range.
inline constexpr double kReferenceElasticity = 0.45;
inline constexpr double kReferenceElasticityLow = 0.41;
inline constexpr double kReferenceElasticityHigh = 0.57;

/// |b| at or below this counts as constant returns.
inline constexpr double kConstantReturnsTolerance = 1e-12;

enum class SpecKind { verdoorn, kaldor, rowthorn1, rowthorn2 };

inline constexpr std::array<SpecKind, 4> kAllSpecs{SpecKind::verdoorn, SpecKind::kaldor,
                                                   SpecKind::rowthorn1, SpecKind::rowthorn2};

struct Specification {
  SpecKind kind = SpecKind::verdoorn;
  Variable response = Variable::p;
  Variable regressor = Variable::q;
};

/// p on q, e on q, p on e, q on e.
constexpr Specification specification(SpecKind kind) {
  switch (kind) {
    case SpecKind::verdoorn: return {kind, Variable::p, Variable::q};
    case SpecKind::kaldor: return {kind, Variable::e, Variable::q};
    case SpecKind::rowthorn1: return {kind, Variable::p, Variable::e};
    case SpecKind::rowthorn2: return {kind, Variable::q, Variable::e};
  }
  return {kind, Variable::p, Variable::q};
}

std::string_view to_string(SpecKind kind);
std::optional<SpecKind> parse_spec_kind(std::string_view name);

enum class ScaleLabel { increasing, constant, decreasing, unbounded, unacceptable };

struct ScaleVerdict {
  /// 1 / (1 - b); +infinity when b >= 1.
  double value = 1;
  ScaleLabel label = ScaleLabel::constant;
};

std::string_view to_string(ScaleLabel label);
std::optional<ScaleLabel> parse_scale_label(std::string_view name);

/// Returns-to-scale index 1 / (1 - b) with its label: b >= 1 is unbounded,
/// b < 0 unacceptable, |b| <= 1e-12 constant, otherwise increasing.
ScaleVerdict economies_of_scale(double b);

struct SpecEstimate {
  Specification spec;
  FitResult<double> fit;
  /// Only set for SpecKind::verdoorn.
  std::optional<ScaleVerdict> scale;
  /// Hash of the observation set the fit ran on.
  std::uint64_t sample_fingerprint = 0;
};

struct EstimateOptions {
  /// Durbin-Watson skips residual pairs that straddle two regions.
  bool dw_within_region = false;
};

SpecEstimate estimate(const GrowthSeries& series, SpecKind kind, const EstimateOptions& options = {});

std::uint64_t fingerprint(const GrowthSeries& series);

struct IdentityReport {
  double intercept_negation_gap = 0;  // a + c
  double slope_complement_gap = 0;    // b + d - 1
  double rowthorn_intercept_gap = 0;  // lambda1 - lambda2
  double rowthorn_slope_gap = 0;      // eps2 - eps1 - 1
  double dw_verdoorn_kaldor_gap = 0;
  double dw_rowthorn_gap = 0;

  std::array<double, 6> gaps() const {
    return {intercept_negation_gap, slope_complement_gap,   rowthorn_intercept_gap,
            rowthorn_slope_gap,     dw_verdoorn_kaldor_gap, dw_rowthorn_gap};
  }
  double max_abs_gap() const;
};

/// Needs one estimate per kind, all on the same observation set; otherwise
/// throws EstimationError(invalid_comparison).
IdentityReport check_identities(std::span<const SpecEstimate> estimates);

struct CellLabel {
  std::string sector;
  std::string period;  // e.g. "1986-1994"
  SeriesMode mode = SeriesMode::pooled;

  /// sector/period/mode
  std::string to_string() const;
  static CellLabel parse(std::string_view text);
};

struct VerdoornReport {
  CellLabel cell;
  std::array<SpecEstimate, 4> estimates;  // in kAllSpecs order
  IdentityReport identities;
  /// b - 0.45. Informational only.
  double reference_deviation = 0;

  const SpecEstimate& get(SpecKind kind) const { return estimates[static_cast<std::size_t>(kind)]; }
};

/// Estimates all four specifications, checks the identities and throws
/// InvariantError if they fail beyond rounding.
VerdoornReport run_cell(const GrowthSeries& series, const EstimateOptions& options = {});

}  // namespace verdoorn
