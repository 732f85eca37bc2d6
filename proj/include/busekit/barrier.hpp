#pragma once

#include <string>
#include <vector>

#include "busekit/busemann.hpp"
#include "busekit/geodesic.hpp"

namespace busekit {

/// Everything derived from one oriented line: its two halves as paths, the
/// glued line path, and the two Busemann fields.
struct LineFields {
  std::string id;
  LineSpec line;
  GeodesicPath plus_path;
  GeodesicPath minus_path;
  LimitField plus;
  LimitField minus;
};

struct LineFieldOptions {
  BusemannOptions busemann;
  // Schedule applied to both halves; t values beyond a half's in-chart
  // extent raise Schedule errors.
  TruncationSchedule schedule;
};

LineFields compute_line_fields(const MetricChart& chart, const LineSpec& line, const LineFieldOptions& options,
                               std::string id = "");

struct BarrierField {
  ScalarField field;
  LineSpec line;
  ScalarField b_plus;
  ScalarField b_minus;
  GeodesicPath path;  // minus half reversed, then plus half
  double min_value = 0.0;
  double max_on_line = 0.0;
};

struct BarrierOptions {
  double nonneg_tol_cells = 3;
  double on_line_tol_cells = 3;
  int margin_cells = 5;
};

/// B = b_plus + b_minus on the common valid cells. Throws Inconsistency if
/// B < -3h somewhere or |B| > 3h within one cell of the line.
BarrierField barrier_field(const MetricChart& chart, const LineFields& lf, const BarrierOptions& options = {});

// Glued line path of minus(-t) and plus(t), without the minimizing test.
GeodesicPath join_halves(const GeodesicPath& plus, const GeodesicPath& minus);

// Nodes within one cell (chart-coordinate) of the path points.
std::vector<std::uint8_t> near_path_mask(const MetricChart& chart, const GeodesicPath& path, double radius_cells = 1.0);

struct InvarianceOptions {
  std::vector<double> shifts{-2.0, -1.0, 1.0, 2.0};
  double tol_cells = 6;
  bool reversal = true;
};

// γ_τ(t) = γ(t + τ), obtained by integrating the line geodesic.
LineSpec shifted_line(const MetricChart& chart, const LineSpec& line, double tau, double dt = 0.01);

/// Rebuilds the barrier for each shifted and the reversed line and compares
/// to `reference` on commonly valid cells.
std::vector<VerdictReport> barrier_invariance(const MetricChart& chart, const LineFields& lf,
                                              const BarrierField& reference, const LineFieldOptions& options,
                                              const InvarianceOptions& inv = {});

struct ZeroSetOptions {
  double zero_tol = -1.0;  // < 0: 4h
  int max_checked = 32;    // marked off-line cells checked for foliation
  double trace_horizon = -1.0;  // < 0: the line's horizon
  double dt = 0.01;
  double tol_opposite = 0.2;    // |v+ + v-|_g allowed before gluing
  CorayOptions coray;
  GlueOptions glue;
};

struct FoliationCheck {
  Vec2 cell;
  bool glued = false;
  std::string reason;
  double defect = 0.0;
};

struct ZeroSetResult {
  std::vector<std::uint8_t> mask;
  double tol = 0.0;
  std::size_t marked = 0;
  std::size_t marked_off_line = 0;
  std::vector<FoliationCheck> checks;
  std::size_t glued = 0;
  double glued_fraction() const { return checks.empty() ? 1.0 : static_cast<double>(glued) / checks.size(); }
  double max_opposite_defect = 0.0;
  double max_glue_defect = 0.0;
};

/// Thresholds B <= zero_tol and, on an evenly spread subsample of the marked
/// cells off the line, traces corays of both Busemann fields and glues them.
ZeroSetResult zero_set(const MetricChart& chart, const BarrierField& bf, DistanceOracle& oracle,
                       const ZeroSetOptions& options = {});

struct QuadBound {
  double constant = 0.0;
  Vec2 argmax{};
  std::size_t counted = 0;
  std::size_t excluded = 0;
};

/// max B(x) / d(x, γ)^2 over region nodes with d >= exclusion_cells * h,
/// where d(., γ) comes from a polyline-source distance solve of the line.
QuadBound quad_bound_constant(const MetricChart& chart, const BarrierField& bf, const Rect& region,
                              double exclusion_cells = 2.0, const EikonalOptions& eikonal = {});

enum class Relation { Precedes, Equivalent };
const char* relation_name(Relation r);

struct RelationOptions {
  double zero_tol = -1.0;       // < 0: 4h
  double tol_slope = 0.05;
  double osc_tol_cells = 6;
  int samples = 16;
  int window_steps = 8;
  int margin_cells = 5;
};

struct RelationVerdict {
  Relation relation = Relation::Precedes;
  bool holds = false;
  std::string candidate;
  std::string reference;
  // precedes evidence
  double max_barrier = 0.0;
  double slope_defect_plus = 0.0;
  double slope_defect_minus = 0.0;
  // equivalent evidence
  double oscillation_plus = 0.0;
  double oscillation_minus = 0.0;
  bool precedes_both = false;
  bool routes_agree = true;
  std::string detail;
};

std::ostream& operator<<(std::ostream& os, const RelationVerdict& v);

/// candidate ≺ reference: B_ref <= zero_tol along the candidate and the
/// reference Busemann fields decrease with slope -1 along both halves.
RelationVerdict precedes(const MetricChart& chart, const LineFields& candidate, const LineFields& reference,
                         const BarrierField& reference_barrier, const RelationOptions& options = {});

/// Oscillation of b_{a±} - b_{b±} <= 6h, cross-checked against mutual ≺.
RelationVerdict equivalent(const MetricChart& chart, const LineFields& a, const BarrierField& ba, const LineFields& b,
                           const BarrierField& bb, const RelationOptions& options = {});

struct LineSumResult {
  VerdictReport field_test;  // min(b1 + b2) >= -6h
  GlueResult glue;
  bool agree = false;
};

LineSumResult line_sum_test(const MetricChart& chart, const RaySpec& r1, const RaySpec& r2, const ScalarField& b1,
                            const ScalarField& b2, DistanceOracle& oracle, double dt = 0.01,
                            const GlueOptions& glue = {});

struct PseudoDistance {
  double value = 0.0;
  Vec2 base_a{};
  Vec2 base_b{};
  bool small = false;       // value <= 6h
  bool equivalent = false;  // verdict it is compared with
  bool consistent = false;
};

/// Moves both base points along their lines onto {b_ref+ = 0} and returns
/// B_a(b.base) + B_b(a.base), clamped at 0.
PseudoDistance pseudo_distance(const MetricChart& chart, const LineFields& a, const BarrierField& ba,
                               const LineFields& b, const BarrierField& bb, const ScalarField& reference_plus,
                               bool equivalent_verdict);

/// b_ray(x) - b_ray(coray.base) <= b_coray(x) + 6h on common valid cells.
VerdictReport lemma41_check(const MetricChart& chart, const RaySpec& coray, const ScalarField& b_ray,
                            const ScalarField& b_coray, double tol_cells = 6);

// Equivalence classes under `equivalent`, as index lists.
std::vector<std::vector<std::size_t>> classify(const std::vector<std::vector<bool>>& equivalent_matrix);

}  // namespace busekit
