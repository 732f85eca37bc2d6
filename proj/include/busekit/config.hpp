#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "busekit/busemann.hpp"
#include "busekit/eikonal.hpp"
#include "busekit/geodesic.hpp"
#include "busekit/metric.hpp"

namespace busekit {

// Objects are kept in their raw specification form; rays and lines are
// rescaled to unit g-length only once a chart exists.
struct RayObject {
  Vec2 base;
  Vec2 direction;
  double horizon = 1.0;
};

// Either explicit escaping points or `ray`: x_n = γ(t_n) over the schedule.
struct HoroObject {
  Vec2 base;
  std::vector<Vec2> points;
  std::string ray;
};

// One dl level set K_n: circle, vertical line, region above y = level, or point.
struct SetItem {
  enum class Kind { Circle, VLine, Above, Point } kind = Kind::Point;
  double a = 0.0, b = 0.0, c = 0.0;
};

// Source set recipe; vline and above items need the chart to be realized.
struct SourceObject {
  std::vector<SetItem> items;
  std::vector<Polyline> polylines;
};

struct DlObject {
  Vec2 base;
  std::vector<SetItem> sets;
};

struct SolverSettings {
  EikonalOptions eikonal;
  double dt = 0.01;
  std::vector<double> schedule;
  std::optional<double> cauchy_tol;  // absolute; default h
  double jump_threshold = 0.2;
  double tol_grad = 0.25;
  double tol_slope = 0.05;
  std::optional<double> zero_tol;  // absolute; default 4h
  std::vector<int> resolutions;    // nx values for refinement studies
  std::vector<double> shifts{-2.0, -1.0, 1.0, 2.0};
  std::vector<std::string> suites{"all"};
  bool corrupt = false;
  unsigned seed = 1;
  int foliation_cells = 32;
  int singular_checks = 24;
  std::optional<Rect> quad_region;
  std::optional<Rect> region;  // region for semi-concavity and closed-form comparisons
  std::optional<Rect> oracle;  // region for distance-solver accuracy
};

struct OutputSettings {
  std::string dir = ".";
  std::string field_csv;
  std::string pgm;
  std::string report;
  std::string report_csv;
  std::string path_csv;
};

struct ExperimentConfig {
  ChartSpec chart;
  bool ny_given = false;
  std::map<std::string, RayObject> rays;
  std::map<std::string, RayObject> lines;
  std::map<std::string, SourceObject> sources;
  std::map<std::string, HoroObject> horos;
  std::map<std::string, DlObject> dls;
  SolverSettings solver;
  OutputSettings outputs;
  std::string origin;  // file name or "<string>"

  MetricChart make_chart() const;
  MetricChart make_chart(int nx) const;  // square cells, nx columns
  TruncationSchedule schedule(const MetricChart& chart) const;
  double cauchy_tol(const MetricChart& chart) const { return solver.cauchy_tol ? *solver.cauchy_tol : chart.h(); }
  BusemannOptions busemann_options() const;
  RaySpec ray(const MetricChart& chart, const std::string& id) const;
  LineSpec line(const MetricChart& chart, const std::string& id) const;
  SourceSet source(const MetricChart& chart, const std::string& id) const;
  // Base point and escaping points, resolving ray-backed objects.
  HoroObject horo(const MetricChart& chart, const std::string& id) const;
  std::vector<SourceSet> dl_sets(const MetricChart& chart, const std::string& id) const;
  std::string output_path(const std::string& file) const;
};

/// Parses the sectioned `key = value` format. Unknown sections or keys,
/// malformed values and out-of-range tolerances throw Error(Config) naming
/// the offending key and line.
ExperimentConfig parse_config(std::istream& is, const std::string& origin = "<string>");
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace busekit
