#pragma once

#include <string>
#include <utility>
#include <vector>

#include "busekit/field.hpp"
#include "busekit/metric.hpp"

namespace busekit {

struct Polyline {
  std::vector<Vec2> points;
};

/// Closed source set K for a distance solve: explicit grid nodes, points,
/// and polylines (rasterized with exact point-to-segment initialization in a
/// collar around them).
struct SourceSet {
  std::vector<std::pair<int, int>> nodes;
  std::vector<Vec2> points;
  std::vector<Polyline> polylines;
  std::string description;

  static SourceSet point(Vec2 p);
  static SourceSet polyline(std::vector<Vec2> pts);
  bool empty() const { return nodes.empty() && points.empty() && polylines.empty(); }
  SourceSet& merge(const SourceSet& other);
  std::string describe() const;
};

struct EikonalOptions {
  double eps_sweep = 1e-9;  // relative to max(1, largest finite value)
  int max_sweeps = 1000;    // individual directional sweeps
  int margin_cells = 5;     // low-confidence band along non-periodic edges
  double collar_cells = 2.0;
  // Point sources additionally initialize every node within this metric
  // length, which removes the log(1/h) error growth around point sources.
  double point_collar_radius = 0.1;
};

struct SolveStats {
  int sweeps = 0;
  double last_update = 0.0;
};

/// Viscosity solution of g^{ij} u_i u_j = 1, u = 0 on K, by Gauss-Seidel
/// sweeping in the four alternating orderings with 8-neighbour simplex
/// Hopf-Lax updates. Throws Error(Convergence) if max_sweeps is exhausted.
ScalarField solve_distance(const MetricChart& chart, const SourceSet& source,
                           const EikonalOptions& options = {}, SolveStats* stats = nullptr);

struct ResidualStats {
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double excluded_fraction = 0.0;
  std::size_t counted = 0;
};

struct ResidualOptions {
  bool exclude_singular = true;
  double jump_threshold = 0.2;
  double tol_grad = 0.25;
  // Additional per-node exclusion (1 = excluded); empty = none.
  std::vector<std::uint8_t> exclude;
};

/// | |Du|_g - 1 | over interior valid nodes, with Du the Godunov upwind
/// gradient. Nodes with two separated reachable-gradient clusters are
/// excluded when exclude_singular is set; so are zero-valued distance
/// sources. Throws Error(Data) if nothing is left to measure.
ResidualStats eikonal_residual(const MetricChart& chart, const ScalarField& field,
                               const ResidualOptions& options = {});

// Godunov upwind covector at node (i,j); empty if a needed neighbour is invalid.
std::optional<Covector> upwind_gradient(const ScalarField& f, int i, int j);

// Second-order one-sided gradients in the four quadrant sectors (sx, sy) in
// {(+,+), (-,+), (-,-), (+,-)}; sectors whose stencil is incomplete are empty.
std::array<std::optional<Covector>, 4> sector_gradients(const ScalarField& f, int i, int j);

}  // namespace busekit
