#pragma once

#include <string>
#include <vector>

#include "busekit/eikonal.hpp"
#include "busekit/field.hpp"
#include "busekit/geodesic.hpp"
#include "busekit/gradients.hpp"
#include "busekit/metric.hpp"

namespace busekit {

struct TruncationSchedule {
  std::vector<double> t_values;
  double cauchy_tol = 0.0;

  void validate() const;
};

struct BusemannOptions {
  EikonalOptions eikonal;
  double dt = 0.01;               // geodesic step used to place γ(t_i)
  double monotone_tol_cells = 3;  // b_{t_{i+1}} <= b_{t_i} + this * h
};

struct TruncationStep {
  double t = 0.0;
  double max_defect = 0.0;       // max |b_k - b_{k-1}| on commonly valid cells
  double masked_fraction = 0.0;  // cells with defect > cauchy_tol
  double monotone_violation = 0.0;
};

struct ConvergenceReport {
  std::vector<TruncationStep> steps;
  double masked_fraction = 0.0;       // of the final field's valid cells
  double max_monotone_violation = 0.0;
  std::string text() const;
};

struct LimitField {
  ScalarField field;   // last iterate, masked where not Cauchy-converged
  ScalarField defect;  // per-cell |last - previous| (zero for single-step schedules)
  ConvergenceReport report;
};

/// b_{t_i}(x) = d(x, γ(t_i)) - t_i for each t_i, returning the last iterate.
/// Throws Schedule if some γ(t_i) is outside the chart and Inconsistency if
/// monotone non-increase fails beyond tolerance.
LimitField busemann_field(const MetricChart& chart, const RaySpec& ray, const TruncationSchedule& schedule,
                          const BusemannOptions& options = {});

/// h_n(x) = d(x, x_n) - d(base, x_n); Precondition unless d(base, x_n)
/// strictly increases. `cauchy_tol` < 0 disables masking.
LimitField horofunction_field(const MetricChart& chart, const std::vector<Vec2>& points, Vec2 base,
                              double cauchy_tol, const BusemannOptions& options = {});

/// h_n(x) = d(x, K_n) - d(base, K_n).
LimitField dl_field(const MetricChart& chart, const std::vector<SourceSet>& sets, Vec2 base, double cauchy_tol,
                    const BusemannOptions& options = {});

// Source helpers for dl-functions.
SourceSet circle_source(Vec2 center, double radius, int segments = 720);
SourceSet vertical_line_source(const MetricChart& chart, double x);
// Closed region {y >= level} of the chart: boundary polyline plus all nodes above it.
SourceSet region_above_source(const MetricChart& chart, double level);

struct SingularityOptions {
  double jump_threshold = 0.2;
  double tol_grad = 0.25;
};

struct Superdifferential {
  std::vector<GradientCluster> clusters;  // approximates D*
  std::vector<Covector> hull;             // extreme points of co D*, counter-clockwise
  double diameter = 0.0;
  std::size_t samples = 0;
};

/// Clusters the one-sided gradients of every valid node within `radius` of
/// the node nearest p.
Superdifferential superdifferential(const MetricChart& chart, const ScalarField& field, Vec2 p, double radius,
                                    const SingularityOptions& options = {});

struct SingularMask {
  int nx = 0;
  int ny = 0;
  std::vector<std::uint8_t> marked;
  std::vector<double> diameter;

  bool at(int i, int j) const { return marked[static_cast<std::size_t>(j) * nx + i] != 0; }
  double diameter_at(int i, int j) const { return diameter[static_cast<std::size_t>(j) * nx + i]; }
  std::size_t count() const;
};

/// Marks nodes whose local reachable-gradient set splits into two clusters
/// with diameter above jump_threshold.
SingularMask singular_set(const MetricChart& chart, const ScalarField& field, const SingularityOptions& options = {});

struct SemiconcavityEstimate {
  double constant = 0.0;
  Vec2 argmax{};
  std::size_t cells = 0;
  std::string chart;
};

/// max over nodes p of the region and offsets e in {(h,0), (0,h), diagonals}
/// of [u(p+e) + u(p-e) - 2u(p)] / |e|^2, clamped below at 0.
SemiconcavityEstimate semiconcavity_constant(const MetricChart& chart, const ScalarField& field, const Rect& region);

}  // namespace busekit
