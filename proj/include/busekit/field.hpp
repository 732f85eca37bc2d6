#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "busekit/metric.hpp"

namespace busekit {

enum class FieldTag { Distance, Busemann, Horo, Dl, Barrier, Generic };

const char* field_tag_name(FieldTag tag);
FieldTag parse_field_tag(const std::string& name);

struct GridGeometry {
  int nx = 0;
  int ny = 0;
  Vec2 origin{};
  double hx = 1.0;
  double hy = 1.0;
  bool periodic_x = false;

  static GridGeometry of(const MetricChart& chart);
  bool same_grid(const GridGeometry& o) const;
  Vec2 node(int i, int j) const { return {origin.x + i * hx, origin.y + j * hy}; }
  double h() const { return hx > hy ? hx : hy; }
};

/// Node-sampled real field over a chart with a per-node validity mask.
/// Values are stored row-major: index = j * nx + i.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridGeometry geometry, FieldTag tag, std::string source = "");

  const GridGeometry& geometry() const { return geo_; }
  int nx() const { return geo_.nx; }
  int ny() const { return geo_.ny; }
  double h() const { return geo_.h(); }
  Vec2 node(int i, int j) const { return geo_.node(i, j); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * geo_.nx + i; }

  double& at(int i, int j) { return values_[index(i, j)]; }
  double at(int i, int j) const { return values_[index(i, j)]; }
  bool valid(int i, int j) const { return mask_[index(i, j)] != 0; }
  void set_valid(int i, int j, bool v) { mask_[index(i, j)] = v ? 1 : 0; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<std::uint8_t>& mask() { return mask_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  FieldTag tag() const { return tag_; }
  void set_tag(FieldTag t) { tag_ = t; }
  const std::string& source() const { return source_; }
  void set_source(std::string s) { source_ = std::move(s); }

  // Resolves a possibly-wrapped column index; -1 if outside a non-periodic grid.
  int column(int i) const;

  // Bilinear interpolation. Empty if p is off-grid or touches an invalid node
  // with non-zero weight.
  std::optional<double> sample(Vec2 p) const;
  bool valid_at(Vec2 p) const { return sample(p).has_value(); }
  // Nearest node (with periodic wrap); empty if outside the grid.
  std::optional<std::pair<int, int>> nearest_node(Vec2 p) const;

  double valid_fraction() const;
  std::size_t valid_count() const;
  double min_valid() const;
  double max_valid() const;

 private:
  GridGeometry geo_{};
  FieldTag tag_ = FieldTag::Generic;
  std::string source_;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

// Pointwise a + sign_b * b on the intersection of the masks.
ScalarField combine(const ScalarField& a, const ScalarField& b, double sign_b, FieldTag tag);
// Oscillation (max - min) of a - b over common valid nodes; empty if none.
std::optional<double> difference_oscillation(const ScalarField& a, const ScalarField& b);

// CSV grid: header names line `nx,ny,x0,y0,hx,hy,tag`, a values line for the
// header, ny rows of nx values (row-major, %.17g), then ny rows of 0/1 mask.
void write_field_csv(const ScalarField& f, std::ostream& os);
void write_field_csv(const ScalarField& f, const std::string& path);
ScalarField read_field_csv(std::istream& is, bool periodic_x = false);
ScalarField read_field_csv(const std::string& path, bool periodic_x = false);
// 8-bit binary PGM, min-max normalized over valid nodes; invalid nodes are 0.
void write_field_pgm(const ScalarField& f, const std::string& path);

}  // namespace busekit
