#include "busekit/metric.hpp"

#include <cmath>
#include <sstream>

#include "busekit/expression.hpp"

namespace busekit {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::Boundary: return "boundary";
    case ErrorCode::Convergence: return "convergence";
    case ErrorCode::EmptyPath: return "empty-path";
    case ErrorCode::InsufficientHorizon: return "insufficient-horizon";
    case ErrorCode::Data: return "data";
    case ErrorCode::CorayValidation: return "coray-validation";
    case ErrorCode::Schedule: return "schedule";
    case ErrorCode::Inconsistency: return "inconsistency";
    case ErrorCode::Coverage: return "coverage";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

const char* chart_kind_name(ChartKind kind) {
  switch (kind) {
    case ChartKind::Euclidean: return "euclidean";
    case ChartKind::HalfPlane: return "half_plane";
    case ChartKind::Cylinder: return "cylinder";
    case ChartKind::Paraboloid: return "paraboloid";
    case ChartKind::Custom: return "custom";
  }
  return "unknown";
}

ChartKind parse_chart_kind(const std::string& name) {
  if (name == "euclidean") return ChartKind::Euclidean;
  if (name == "half_plane") return ChartKind::HalfPlane;
  if (name == "cylinder") return ChartKind::Cylinder;
  if (name == "paraboloid") return ChartKind::Paraboloid;
  if (name == "custom") return ChartKind::Custom;
  throw Error(ErrorCode::Config, "unknown chart kind '" + name + "'");
}

Vec2 Christoffel::acceleration(Vec2 v) const {
  Vec2 a;
  a.x = -((*this)(0, 0, 0) * v.x * v.x + 2.0 * (*this)(0, 0, 1) * v.x * v.y + (*this)(0, 1, 1) * v.y * v.y);
  a.y = -((*this)(1, 0, 0) * v.x * v.x + 2.0 * (*this)(1, 0, 1) * v.x * v.y + (*this)(1, 1, 1) * v.y * v.y);
  return a;
}

MetricChart::MetricChart(ChartKind kind, Rect domain, int nx, int ny, bool periodic_x,
                         TensorFn tensor, std::string description)
    : kind_(kind),
      domain_(domain),
      nx_(nx),
      ny_(ny),
      periodic_x_(periodic_x),
      tensor_(std::move(tensor)),
      description_(std::move(description)) {
  if (nx < 3 || ny < 3) throw Error(ErrorCode::Validation, "chart resolution must be at least 3x3");
  if (!(domain.x_max > domain.x_min) || !(domain.y_max > domain.y_min))
    throw Error(ErrorCode::Validation, "chart domain must have positive extent");
  hx_ = periodic_x ? domain.width() / nx : domain.width() / (nx - 1);
  hy_ = domain.height() / (ny - 1);
  spec_.kind = kind;
  spec_.domain = domain;
  spec_.nx = nx;
  spec_.ny = ny;
  spec_.periodic_x = periodic_x;
}

MetricChart MetricChart::euclidean(Rect domain, int nx, int ny) {
  return MetricChart(ChartKind::Euclidean, domain, nx, ny, false, [](Vec2) { return Mat2{}; }, "");
}

MetricChart MetricChart::half_plane(Rect domain, int nx, int ny) {
  if (!(domain.y_min > 0.0))
    throw Error(ErrorCode::Validation, "half_plane chart requires y_min > 0");
  return MetricChart(ChartKind::HalfPlane, domain, nx, ny, false,
                     [](Vec2 p) {
                       const double s = 1.0 / (p.y * p.y);
                       return Mat2{s, 0.0, s};
                     },
                     "");
}

MetricChart MetricChart::cylinder(Rect domain, int nx, int ny) {
  return MetricChart(ChartKind::Cylinder, domain, nx, ny, true, [](Vec2) { return Mat2{}; }, "");
}

MetricChart MetricChart::paraboloid(Rect domain, int nx, int ny) {
  // induced metric of z = (x^2 + y^2)/2: I + grad f grad f^T
  return MetricChart(ChartKind::Paraboloid, domain, nx, ny, false,
                     [](Vec2 p) { return Mat2{1.0 + p.x * p.x, p.x * p.y, 1.0 + p.y * p.y}; }, "");
}

MetricChart MetricChart::custom(Rect domain, int nx, int ny, bool periodic_x, TensorFn tensor,
                                std::string description) {
  MetricChart chart(ChartKind::Custom, domain, nx, ny, periodic_x, std::move(tensor),
                    std::move(description));
  chart.validate_nodes();
  return chart;
}

MetricChart MetricChart::from_spec(const ChartSpec& spec) {
  switch (spec.kind) {
    case ChartKind::Euclidean: return euclidean(spec.domain, spec.nx, spec.ny);
    case ChartKind::HalfPlane: return half_plane(spec.domain, spec.nx, spec.ny);
    case ChartKind::Cylinder: return cylinder(spec.domain, spec.nx, spec.ny);
    case ChartKind::Paraboloid: return paraboloid(spec.domain, spec.nx, spec.ny);
    case ChartKind::Custom: {
      if (spec.g11.empty() || spec.g22.empty())
        throw Error(ErrorCode::Config, "custom chart requires g11 and g22 expressions");
      const Expression g11 = Expression::parse(spec.g11);
      const Expression g12 = Expression::parse(spec.g12.empty() ? "0" : spec.g12);
      const Expression g22 = Expression::parse(spec.g22);
      MetricChart chart = custom(
          spec.domain, spec.nx, spec.ny, spec.periodic_x,
          [g11, g12, g22](Vec2 p) { return Mat2{g11(p.x, p.y), g12(p.x, p.y), g22(p.x, p.y)}; },
          "g11=" + spec.g11 + ";g12=" + (spec.g12.empty() ? "0" : spec.g12) + ";g22=" + spec.g22);
      chart.spec_.g11 = spec.g11;
      chart.spec_.g12 = spec.g12;
      chart.spec_.g22 = spec.g22;
      return chart;
    }
  }
  throw Error(ErrorCode::Config, "unknown chart kind");
}

MetricChart MetricChart::with_resolution(int nx, int ny) const {
  MetricChart copy(kind_, domain_, nx, ny, periodic_x_, tensor_, description_);
  copy.spec_.g11 = spec_.g11;
  copy.spec_.g12 = spec_.g12;
  copy.spec_.g22 = spec_.g22;
  if (kind_ == ChartKind::Custom) copy.validate_nodes();
  return copy;
}

MetricChart MetricChart::with_square_cells(int nx) const {
  const double hx = periodic_x_ ? domain_.width() / nx : domain_.width() / (nx - 1);
  const int ny = static_cast<int>(std::lround(domain_.height() / hx)) + 1;
  return with_resolution(nx, ny < 3 ? 3 : ny);
}

void MetricChart::validate_nodes() const {
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      const Vec2 p = node(i, j);
      const Mat2 g = tensor_(p);
      if (!std::isfinite(g.xx) || !std::isfinite(g.xy) || !std::isfinite(g.yy) ||
          !(g.min_eigenvalue() > 1e-12)) {
        std::ostringstream os;
        os << "metric tensor is not SPD at node (" << i << "," << j << ") = (" << p.x << ","
           << p.y << ")";
        throw Error(ErrorCode::Validation, os.str());
      }
    }
  }
}

bool MetricChart::contains(Vec2 p) const {
  const double slack = 1e-9 * (domain_.width() + domain_.height());
  if (periodic_x_) return p.y >= domain_.y_min - slack && p.y <= domain_.y_max + slack;
  return domain_.contains(p, slack);
}

Vec2 MetricChart::wrap(Vec2 p) const {
  if (!periodic_x_) return p;
  const double L = period();
  double x = std::fmod(p.x - domain_.x_min, L);
  if (x < 0.0) x += L;
  return {domain_.x_min + x, p.y};
}

Vec2 MetricChart::displacement(Vec2 a, Vec2 b) const {
  Vec2 d = b - a;
  if (periodic_x_) {
    const double L = period();
    d.x -= L * std::round(d.x / L);
  }
  return d;
}

Mat2 MetricChart::metric_at(Vec2 p) const {
  if (!contains(p)) {
    std::ostringstream os;
    os << "point (" << p.x << "," << p.y << ") outside chart " << id();
    throw Error(ErrorCode::Domain, os.str());
  }
  const Mat2 g = tensor_(wrap(p));
  if (kind_ == ChartKind::Custom &&
      !(std::isfinite(g.xx) && std::isfinite(g.xy) && std::isfinite(g.yy) && g.min_eigenvalue() > 0.0)) {
    std::ostringstream os;
    os << "custom metric is not SPD at (" << p.x << "," << p.y << ")";
    throw Error(ErrorCode::Validation, os.str());
  }
  return g;
}

Christoffel MetricChart::christoffel_at(Vec2 p) const {
  Christoffel c;
  switch (kind_) {
    case ChartKind::Euclidean:
    case ChartKind::Cylinder:
      return c;
    case ChartKind::HalfPlane: {
      if (!contains(p)) throw Error(ErrorCode::Domain, "christoffel_at: point outside chart");
      const double iy = 1.0 / p.y;
      c.set(0, 0, 1, -iy);
      c.set(1, 0, 0, iy);
      c.set(1, 1, 1, -iy);
      return c;
    }
    case ChartKind::Paraboloid: {
      if (!contains(p)) throw Error(ErrorCode::Domain, "christoffel_at: point outside chart");
      // Γ^k_ij = f_k f_ij / (1 + |∇f|^2) with f_ij = δ_ij
      const double w = 1.0 / (1.0 + p.x * p.x + p.y * p.y);
      c.set(0, 0, 0, p.x * w);
      c.set(0, 1, 1, p.x * w);
      c.set(1, 0, 0, p.y * w);
      c.set(1, 1, 1, p.y * w);
      return c;
    }
    case ChartKind::Custom:
      break;
  }

  const double h = h_min() / 4.0;
  const Vec2 ex{h, 0.0};
  const Vec2 ey{0.0, h};
  auto inside = [&](Vec2 q) {
    if (periodic_x_) return q.y >= domain_.y_min && q.y <= domain_.y_max;
    return domain_.contains(q);
  };
  if (!inside(p + ex) || !inside(p - ex) || !inside(p + ey) || !inside(p - ey)) {
    std::ostringstream os;
    os << "christoffel_at: finite-difference stencil at (" << p.x << "," << p.y
       << ") leaves the chart";
    throw Error(ErrorCode::Boundary, os.str());
  }
  const Mat2 gx_p = metric_at(p + ex), gx_m = metric_at(p - ex);
  const Mat2 gy_p = metric_at(p + ey), gy_m = metric_at(p - ey);
  // dg[l] = ∂_l g  (l = 0: x, 1: y)
  const Mat2 dg[2] = {(gx_p + gx_m * -1.0) * (0.5 / h), (gy_p + gy_m * -1.0) * (0.5 / h)};
  auto comp = [](const Mat2& m, int i, int j) {
    if (i == 0 && j == 0) return m.xx;
    if (i == 1 && j == 1) return m.yy;
    return m.xy;
  };
  const Mat2 ginv = metric_at(p).inverse();
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = i; j < 2; ++j) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l) {
          const double first = comp(dg[i], l, j) + comp(dg[j], l, i) - comp(dg[l], i, j);
          s += 0.5 * comp(ginv, k, l) * first;
        }
        c.set(k, i, j, s);
      }
    }
  }
  return c;
}

double MetricChart::gnorm_covector(Vec2 p, Covector c) const {
  const double q = metric_at(p).inverse().quad(c);
  return std::sqrt(q > 0.0 ? q : 0.0);
}

double MetricChart::gnorm(Vec2 p, Vec2 v) const {
  const double q = metric_at(p).quad(v);
  return std::sqrt(q > 0.0 ? q : 0.0);
}

Vec2 MetricChart::sharp(Vec2 p, Covector c) const {
  const Mat2 gi = metric_at(p).inverse();
  return {gi.xx * c.dx + gi.xy * c.dy, gi.xy * c.dx + gi.yy * c.dy};
}

std::string MetricChart::id() const {
  std::ostringstream os;
  os << chart_kind_name(kind_) << "[" << domain_.x_min << "," << domain_.x_max << "]x["
     << domain_.y_min << "," << domain_.y_max << "]@" << nx_ << "x" << ny_;
  if (periodic_x_) os << ",periodic";
  if (!description_.empty()) os << "{" << description_ << "}";
  return os.str();
}

}  // namespace busekit
