#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace busekit {

enum class ErrorCode {
  Domain,          // point outside the chart
  Validation,      // non-SPD tensor, malformed input data
  Precondition,    // operation called outside its contract
  Boundary,        // finite-difference stencil leaves the chart
  Convergence,     // iterative solver did not converge
  EmptyPath,       // geodesic left the domain immediately
  InsufficientHorizon,
  Data,            // masked / missing field data
  CorayValidation,
  Schedule,
  Inconsistency,   // a structural lemma failed beyond tolerance
  Coverage,
  Config,
  Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, double defect = 0.0)
      : std::runtime_error(what), code_(code), defect_(defect) {}

  ErrorCode code() const { return code_; }
  // Measured violation carried by validation-style errors (coray slope, ...).
  double defect() const { return defect_; }

 private:
  ErrorCode code_;
  double defect_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Components of a differential (du_x, du_y). Kept distinct from Vec2 so that
// index raising through g^{-1} is always explicit.
struct Covector {
  double dx = 0.0;
  double dy = 0.0;

  constexpr Covector operator+(Covector o) const { return {dx + o.dx, dy + o.dy}; }
  constexpr Covector operator-(Covector o) const { return {dx - o.dx, dy - o.dy}; }
  constexpr Covector operator*(double s) const { return {dx * s, dy * s}; }
  constexpr bool operator==(const Covector&) const = default;
};

// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Mat2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  constexpr double det() const { return xx * yy - xy * xy; }
  constexpr double trace() const { return xx + yy; }
  Mat2 inverse() const {
    const double d = det();
    return {yy / d, -xy / d, xx / d};
  }
  constexpr Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
  constexpr double quad(Vec2 v) const { return xx * v.x * v.x + 2.0 * xy * v.x * v.y + yy * v.y * v.y; }
  constexpr double quad(Covector c) const {
    return xx * c.dx * c.dx + 2.0 * xy * c.dx * c.dy + yy * c.dy * c.dy;
  }
  double min_eigenvalue() const {
    const double m = 0.5 * trace();
    const double r = std::hypot(0.5 * (xx - yy), xy);
    return m - r;
  }
  constexpr Mat2 operator+(const Mat2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  constexpr Mat2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
};

struct Rect {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(Vec2 p, double slack = 0.0) const {
    return p.x >= x_min - slack && p.x <= x_max + slack && p.y >= y_min - slack &&
           p.y <= y_max + slack;
  }
};

}  // namespace busekit
