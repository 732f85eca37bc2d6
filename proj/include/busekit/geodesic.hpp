#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "busekit/eikonal.hpp"
#include "busekit/field.hpp"
#include "busekit/metric.hpp"

namespace busekit {

struct GeodesicState {
  Vec2 p;
  Vec2 v;
};

/// Unit-speed curve sampled at t0 + k*dt. Points along a periodic axis are
/// stored wrapped into the chart.
struct GeodesicPath {
  std::vector<GeodesicState> states;
  double dt = 0.0;
  double t0 = 0.0;
  bool truncated = false;  // integration stopped at the domain boundary

  bool empty() const { return states.empty(); }
  std::size_t size() const { return states.size(); }
  double t_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double t_end() const { return states.empty() ? t0 : t_at(states.size() - 1); }
  // Cubic Hermite interpolation between stored states; empty outside [t0, t_end].
  std::optional<GeodesicState> at(const MetricChart& chart, double t) const;
  // Largest | |v|_g - 1 | over the stored states.
  double speed_drift(const MetricChart& chart) const;
};

struct RaySpec {
  Vec2 base;
  Vec2 direction;
  double horizon = 1.0;

  // Rescales `direction` to unit g-length at `base`.
  static RaySpec unit(const MetricChart& chart, Vec2 base, Vec2 direction, double horizon);
  void validate(const MetricChart& chart) const;
};

struct LineSpec {
  RaySpec plus;
  RaySpec minus;

  static LineSpec through(const MetricChart& chart, Vec2 base, Vec2 direction, double horizon);
  LineSpec reversed() const { return {minus, plus}; }
  void validate(const MetricChart& chart) const;
};

constexpr double kTolSpeed = 1e-6;
constexpr double kTolDirection = 1e-6;

/// Classical RK4 integration of x'' + Γ(x', x') = 0 from (base, v0) up to
/// `horizon`. Stops early with `truncated` set when the next state would
/// leave the chart. Throws Precondition for non-unit v0 and EmptyPath if not
/// even one step fits.
GeodesicPath integrate_geodesic(const MetricChart& chart, Vec2 base, Vec2 v0, double horizon, double dt);
GeodesicPath integrate_ray(const MetricChart& chart, const RaySpec& ray, double dt);

// Number of leading states that stay `margin` cells away from every
// non-periodic edge, i.e. where solver output is trusted.
std::size_t confident_extent(const MetricChart& chart, const GeodesicPath& path, int margin);

/// Distance queries backed by cached eikonal solves, one per anchor point.
class DistanceOracle {
 public:
  explicit DistanceOracle(const MetricChart& chart, EikonalOptions options = {});

  const ScalarField& field_from(Vec2 anchor);
  // d(a, b) sampled from the field of `a`; empty where b is masked.
  std::optional<double> distance(Vec2 a, Vec2 b);
  const MetricChart& chart() const { return chart_; }
  std::size_t solves() const { return cache_.size(); }

 private:
  const MetricChart& chart_;
  EikonalOptions options_;
  std::map<std::pair<double, double>, ScalarField> cache_;
};

struct VerdictReport {
  std::string check;
  bool pass = false;
  double violation = 0.0;  // worst measured defect
  double tolerance = 0.0;
  std::string detail;
};

std::ostream& operator<<(std::ostream& os, const VerdictReport& v);

struct RayTestOptions {
  int pairs = 32;
  int anchors = 2;
  double tol = -1.0;          // < 0: 2 * max(h, dt)
  double horizon = -1.0;      // < 0: the path's own extent
  int margin_cells = 5;
};

/// Checks d(γ(t_i), γ(t_j)) >= |t_j - t_i| - tol on pairs log-spaced in
/// |t_j - t_i|. Throws InsufficientHorizon if the trusted part of the path
/// is shorter than the requested horizon.
VerdictReport is_ray(const MetricChart& chart, const GeodesicPath& path, DistanceOracle& oracle,
                     const RayTestOptions& options = {});

enum class GlueStatus { Accepted, NotGeodesic, NotMinimizing };
const char* glue_status_name(GlueStatus s);

struct GlueResult {
  GlueStatus status = GlueStatus::NotGeodesic;
  GeodesicPath line;      // parameter runs from -t_minus to +t_plus
  double defect = 0.0;    // joint mismatch or worst (**)-style shortfall
  double tolerance = 0.0;
  bool accepted() const { return status == GlueStatus::Accepted; }
};

struct GlueOptions {
  int anchors = 3;
  int pairs_per_anchor = 8;
  double tol = -1.0;  // < 0: 2 * max(h, dt)
  double tol_dir = kTolDirection;
  int margin_cells = 5;
};

/// Concatenates γ'(t) = minus(-t), t <= 0, and plus(t), t >= 0, then checks
/// d(γ'(s), γ'(s')) = s' - s on sampled pairs s < 0 < s'.
GlueResult glue_line(const MetricChart& chart, const GeodesicPath& plus, const GeodesicPath& minus,
                     DistanceOracle& oracle, const GlueOptions& options = {});

struct CorayOptions {
  double tol_slope = 0.05;
  double jump_threshold = 0.2;
  double tol_grad = 0.25;
  int margin_cells = 5;
};

struct CorayTrace {
  GeodesicPath path;
  std::vector<Covector> gradients;  // reachable-gradient cluster representatives at the start
  Covector chosen;
  double gradient_diameter = 0.0;
  double slope = 0.0;
  double slope_defect = 0.0;
  std::size_t used_states = 0;  // states entering the slope fit
};

/// Backtraces a coray of `busemann` from `start` along v0 = -g^{-1}p for a
/// reachable gradient p. Among several clusters the one closest in angle to
/// `previous` wins, else the lexicographically first. Throws Data when no
/// gradient is available and CorayValidation when the slope of b along the
/// path is not -1 within tol_slope.
CorayTrace trace_coray(const MetricChart& chart, const ScalarField& busemann, Vec2 start, double horizon,
                       double dt, const CorayOptions& options = {},
                       std::optional<Vec2> previous = std::nullopt);
// Same, starting from an explicitly given gradient p.
CorayTrace trace_coray_from(const MetricChart& chart, const ScalarField& busemann, Vec2 start, Covector p,
                            double horizon, double dt, const CorayOptions& options = {});

// Reachable-gradient cluster representatives at the node nearest to p.
std::vector<Covector> reachable_gradients(const MetricChart& chart, const ScalarField& field, Vec2 p,
                                          double jump_threshold, double tol_grad, double* diameter = nullptr);

// Least-squares slope of f along path states [first, last).
std::optional<double> slope_along(const ScalarField& f, const GeodesicPath& path, std::size_t first,
                                  std::size_t last, std::size_t* used = nullptr);

void write_path_csv(const MetricChart& chart, const GeodesicPath& path, std::ostream& os);
void write_path_csv(const MetricChart& chart, const GeodesicPath& path, const std::string& file);

}  // namespace busekit
