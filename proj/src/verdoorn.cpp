#include "verdoorn/verdoorn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "verdoorn/errors.hpp"
#include "verdoorn/text.hpp"

namespace verdoorn {
namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void mix(std::uint64_t& h, std::string_view bytes) {
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  h ^= 0xFF;
  h *= kFnvPrime;
}

void mix(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFF;
    h *= kFnvPrime;
  }
}

}  // namespace

std::string_view to_string(SpecKind kind) {
  switch (kind) {
    case SpecKind::verdoorn: return "Verdoorn";
    case SpecKind::kaldor: return "Kaldor";
    case SpecKind::rowthorn1: return "Rowthorn1";
    case SpecKind::rowthorn2: return "Rowthorn2";
  }
  return "?";
}

std::optional<SpecKind> parse_spec_kind(std::string_view name) {
  for (const auto kind : kAllSpecs) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string_view to_string(ScaleLabel label) {
  switch (label) {
    case ScaleLabel::increasing: return "increasing";
    case ScaleLabel::constant: return "constant";
    case ScaleLabel::decreasing: return "decreasing";
    case ScaleLabel::unbounded: return "unbounded";
    case ScaleLabel::unacceptable: return "unacceptable";
  }
  return "?";
}

std::optional<ScaleLabel> parse_scale_label(std::string_view name) {
  for (const auto label : {ScaleLabel::increasing, ScaleLabel::constant, ScaleLabel::decreasing,
                           ScaleLabel::unbounded, ScaleLabel::unacceptable}) {
    if (to_string(label) == name) return label;
  }
  return std::nullopt;
}

ScaleVerdict economies_of_scale(double b) {
  if (std::abs(b) <= kConstantReturnsTolerance) return {1.0, ScaleLabel::constant};
  if (b >= 1) return {std::numeric_limits<double>::infinity(), ScaleLabel::unbounded};
  const double value = 1 / (1 - b);
  if (b < 0) return {value, ScaleLabel::unacceptable};
  return {value, ScaleLabel::increasing};
}

std::uint64_t fingerprint(const GrowthSeries& series) {
  std::uint64_t h = kFnvOffset;
  for (const auto& o : series.observations) {
    mix(h, o.region);
    mix(h, o.sector);
    mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(o.year_to)));
    mix(h, std::bit_cast<std::uint64_t>(o.q));
    mix(h, std::bit_cast<std::uint64_t>(o.e));
  }
  return h;
}

SpecEstimate estimate(const GrowthSeries& series, SpecKind kind, const EstimateOptions& options) {
  const Specification spec = specification(kind);
  const Eigen::VectorXd x = series.column(spec.regressor);
  const Eigen::VectorXd y = series.column(spec.response);
  const std::vector<int> groups =
      options.dw_within_region ? series.region_groups() : std::vector<int>{};

  SpecEstimate out{spec, {}, std::nullopt, fingerprint(series)};
  try {
    out.fit = ols_fit(x, y, std::span<const int>(groups));
  } catch (const EstimationError& err) {
    throw EstimationError(err.reason(), std::string(to_string(kind)) + " on '" + series.label +
                                            "': " + err.what());
  }
  if (kind == SpecKind::verdoorn) out.scale = economies_of_scale(out.fit.slope);
  return out;
}

double IdentityReport::max_abs_gap() const {
  double worst = 0;
  for (const double g : gaps()) worst = std::max(worst, std::abs(g));
  return worst;
}

IdentityReport check_identities(std::span<const SpecEstimate> estimates) {
  std::array<const SpecEstimate*, 4> by_kind{};
  for (const auto& est : estimates) {
    auto& slot = by_kind[static_cast<std::size_t>(est.spec.kind)];
    if (slot) {
      throw EstimationError(EstimationFailure::invalid_comparison,
                            "check_identities: duplicate " + std::string(to_string(est.spec.kind)));
    }
    slot = &est;
  }
  for (const auto kind : kAllSpecs) {
    if (!by_kind[static_cast<std::size_t>(kind)]) {
      throw EstimationError(EstimationFailure::invalid_comparison,
                            "check_identities: missing " + std::string(to_string(kind)));
    }
  }
  const auto& v = by_kind[0]->fit;
  const auto& k = by_kind[1]->fit;
  const auto& r1 = by_kind[2]->fit;
  const auto& r2 = by_kind[3]->fit;
  for (const auto* est : by_kind) {
    if (est->sample_fingerprint != by_kind[0]->sample_fingerprint || est->fit.n != v.n) {
      throw EstimationError(EstimationFailure::invalid_comparison,
                            "check_identities: estimates were fitted on different observations");
    }
  }

  IdentityReport r;
  r.intercept_negation_gap = v.intercept + k.intercept;
  r.slope_complement_gap = v.slope + k.slope - 1;
  r.rowthorn_intercept_gap = r1.intercept - r2.intercept;
  r.rowthorn_slope_gap = r2.slope - r1.slope - 1;
  r.dw_verdoorn_kaldor_gap = v.durbin_watson - k.durbin_watson;
  r.dw_rowthorn_gap = r1.durbin_watson - r2.durbin_watson;
  return r;
}

std::string CellLabel::to_string() const {
  return sector + "/" + period + "/" + verdoorn::to_string(mode);
}

CellLabel CellLabel::parse(std::string_view text) {
  const auto last = text.rfind('/');
  const auto mid = last == std::string_view::npos ? last : text.rfind('/', last - 1);
  if (last == std::string_view::npos || mid == std::string_view::npos) {
    throw ParseError(0, "malformed cell label '" + std::string(text) + "'");
  }
  CellLabel cell;
  cell.sector = std::string(text.substr(0, mid));
  cell.period = std::string(text.substr(mid + 1, last - mid - 1));
  const auto mode = text.substr(last + 1);
  if (mode == "pooled") {
    cell.mode = SeriesMode::pooled;
  } else if (mode == "cross-section") {
    cell.mode = SeriesMode::cross_section;
  } else {
    throw ParseError(0, "unknown mode in cell label '" + std::string(text) + "'");
  }
  return cell;
}

VerdoornReport run_cell(const GrowthSeries& series, const EstimateOptions& options) {
  VerdoornReport report;
  const auto [first, last] = series.period();
  report.cell = {series.label, std::to_string(first) + "-" + std::to_string(last), series.mode};
  for (const auto kind : kAllSpecs) {
    report.estimates[static_cast<std::size_t>(kind)] = estimate(series, kind, options);
  }
  report.identities = check_identities(report.estimates);
  report.reference_deviation = report.get(SpecKind::verdoorn).fit.slope - kReferenceElasticity;

  // Coefficient identities are exact up to rounding on any series. The DW
  // pairs only coincide when both fits have residuals well above rounding
  // noise relative to the data.
  double scale = 1;
  double sq = 0, se = 0, sp = 0;
  for (const auto& o : series.observations) {
    scale = std::max({scale, std::abs(o.q), std::abs(o.e), std::abs(o.p)});
    sq += o.q * o.q;
    se += o.e * o.e;
    sp += o.p * o.p;
  }
  const double data_norm2 = std::max({sq, se, sp});
  const double tol = 1e-10 * scale;
  const auto& id = report.identities;
  const auto near_exact = [&](SpecKind kind) {
    const auto& fit = report.get(kind).fit;
    return fit.degenerate_residuals || fit.residuals.squaredNorm() <= 1e-12 * data_norm2;
  };
  const bool coefficients_ok =
      std::abs(id.intercept_negation_gap) <= tol && std::abs(id.slope_complement_gap) <= tol &&
      std::abs(id.rowthorn_intercept_gap) <= tol && std::abs(id.rowthorn_slope_gap) <= tol;
  const bool dw_vk_ok = near_exact(SpecKind::verdoorn) || near_exact(SpecKind::kaldor) ||
                        std::abs(id.dw_verdoorn_kaldor_gap) <= 1e-8;
  const bool dw_r_ok = near_exact(SpecKind::rowthorn1) || near_exact(SpecKind::rowthorn2) ||
                       std::abs(id.dw_rowthorn_gap) <= 1e-8;
  if (!coefficients_ok || !dw_vk_ok || !dw_r_ok) {
    throw InvariantError("identity check failed for " + report.cell.to_string() +
                         ": max gap " + text::round_trip(id.max_abs_gap()));
  }
  return report;
}

}  // namespace verdoorn
