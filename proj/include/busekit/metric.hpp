#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "busekit/types.hpp"

namespace busekit {

enum class ChartKind { Euclidean, HalfPlane, Cylinder, Paraboloid, Custom };

const char* chart_kind_name(ChartKind kind);
ChartKind parse_chart_kind(const std::string& name);

// Γ^k_{ij}, stored fully (8 reals) and symmetric in the lower pair.
struct Christoffel {
  std::array<double, 8> values{};

  double operator()(int k, int i, int j) const { return values[static_cast<std::size_t>(4 * k + 2 * i + j)]; }
  void set(int k, int i, int j, double v) {
    values[static_cast<std::size_t>(4 * k + 2 * i + j)] = v;
    values[static_cast<std::size_t>(4 * k + 2 * j + i)] = v;
  }
  // Geodesic acceleration -Γ^k_{ij} v^i v^j.
  Vec2 acceleration(Vec2 v) const;
};

// Everything needed to rebuild a chart; what the experiment config describes.
struct ChartSpec {
  ChartKind kind = ChartKind::Euclidean;
  Rect domain{};
  int nx = 65;
  int ny = 65;
  bool periodic_x = false;
  std::string g11, g12, g22;  // custom kind only
};

using TensorFn = std::function<Mat2(Vec2)>;

/// Rectangular coordinate chart carrying an SPD metric tensor field and a
/// node grid. Immutable after construction; every evaluator is pure.
///
/// Grid nodes sit at x_min + i*hx, y_min + j*hy. Along a periodic x axis the
/// node x_max is identified with x_min, so hx = width/nx; otherwise
/// hx = width/(nx-1).
class MetricChart {
 public:
  static MetricChart euclidean(Rect domain, int nx, int ny);
  static MetricChart half_plane(Rect domain, int nx, int ny);
  static MetricChart cylinder(Rect domain, int nx, int ny);
  static MetricChart paraboloid(Rect domain, int nx, int ny);
  static MetricChart custom(Rect domain, int nx, int ny, bool periodic_x, TensorFn tensor,
                            std::string description);
  static MetricChart from_spec(const ChartSpec& spec);

  MetricChart with_resolution(int nx, int ny) const;
  // nx = n, ny chosen so that cells are as close to square as possible.
  MetricChart with_square_cells(int nx) const;

  Mat2 metric_at(Vec2 p) const;
  Mat2 inverse_metric_at(Vec2 p) const { return metric_at(p).inverse(); }
  Christoffel christoffel_at(Vec2 p) const;
  double gnorm_covector(Vec2 p, Covector c) const;
  double gnorm(Vec2 p, Vec2 v) const;
  // Raise an index: g^{-1} c.
  Vec2 sharp(Vec2 p, Covector c) const;

  // Tensor without domain checks; callers guarantee p is in the domain.
  Mat2 tensor_unchecked(Vec2 p) const { return tensor_(p); }

  bool contains(Vec2 p) const;
  Vec2 wrap(Vec2 p) const;
  // Chart-coordinate displacement b - a, taking the shortest periodic image.
  Vec2 displacement(Vec2 a, Vec2 b) const;

  ChartKind kind() const { return kind_; }
  const Rect& domain() const { return domain_; }
  bool periodic_x() const { return periodic_x_; }
  double period() const { return domain_.width(); }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double h() const { return hx_ > hy_ ? hx_ : hy_; }
  double h_min() const { return hx_ < hy_ ? hx_ : hy_; }
  Vec2 node(int i, int j) const { return {domain_.x_min + i * hx_, domain_.y_min + j * hy_}; }
  // Human-readable chart identity used in reports.
  std::string id() const;
  const ChartSpec& spec() const { return spec_; }

 private:
  MetricChart(ChartKind kind, Rect domain, int nx, int ny, bool periodic_x, TensorFn tensor,
              std::string description);
  void validate_nodes() const;

  ChartKind kind_;
  Rect domain_;
  int nx_;
  int ny_;
  bool periodic_x_;
  double hx_;
  double hy_;
  TensorFn tensor_;
  std::string description_;
  ChartSpec spec_;
};

}  // namespace busekit
