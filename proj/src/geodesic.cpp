#include "busekit/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "busekit/gradients.hpp"

namespace busekit {

namespace {

struct Deriv {
  Vec2 dp;
  Vec2 dv;
};

Deriv rhs(const MetricChart& chart, Vec2 p, Vec2 v) {
  return {v, chart.christoffel_at(chart.wrap(p)).acceleration(v)};
}

double default_tol(const MetricChart& chart, double dt) { return 2.0 * std::max(chart.h(), dt); }

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 0 || !(hi > 0.0)) return out;
  lo = std::min(lo, hi);
  if (n == 1) return {hi};
  const double r = std::log(hi / lo);
  for (int k = 0; k < n; ++k) out.push_back(lo * std::exp(r * k / (n - 1)));
  return out;
}

}  // namespace

std::optional<GeodesicState> GeodesicPath::at(const MetricChart& chart, double t) const {
  if (states.empty()) return std::nullopt;
  const double u = (t - t0) / dt;
  const double last = static_cast<double>(states.size() - 1);
  if (u < -1e-9 || u > last + 1e-9) return std::nullopt;
  if (states.size() == 1) return states.front();
  std::size_t k = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, last - 1.0));
  const double s = std::clamp(u - static_cast<double>(k), 0.0, 1.0);
  const GeodesicState& a = states[k];
  const GeodesicState& b = states[k + 1];
  const Vec2 p1 = a.p + chart.displacement(a.p, b.p);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const Vec2 p = a.p * h00 + a.v * (h10 * dt) + p1 * h01 + b.v * (h11 * dt);
  const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1, d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
  const Vec2 v = (a.p * d00 + p1 * d01) / dt + a.v * d10 + b.v * d11;
  return GeodesicState{chart.wrap(p), v};
}

double GeodesicPath::speed_drift(const MetricChart& chart) const {
  double worst = 0.0;
  for (const auto& s : states) worst = std::max(worst, std::abs(chart.gnorm(s.p, s.v) - 1.0));
  return worst;
}

RaySpec RaySpec::unit(const MetricChart& chart, Vec2 base, Vec2 direction, double horizon) {
  const double n = chart.gnorm(base, direction);
  if (!(n > 0.0)) throw Error(ErrorCode::Precondition, "ray direction must be non-zero");
  return {base, direction / n, horizon};
}

void RaySpec::validate(const MetricChart& chart) const {
  if (!(horizon > 0.0)) throw Error(ErrorCode::Precondition, "ray horizon must be positive");
  const double n = chart.gnorm(base, direction);
  if (std::abs(n - 1.0) > 1e-9)
    throw Error(ErrorCode::Precondition, "ray direction is not unit length in g", std::abs(n - 1.0));
}

LineSpec LineSpec::through(const MetricChart& chart, Vec2 base, Vec2 direction, double horizon) {
  const RaySpec plus = RaySpec::unit(chart, base, direction, horizon);
  return {plus, RaySpec{plus.base, -plus.direction, horizon}};
}

void LineSpec::validate(const MetricChart& chart) const {
  plus.validate(chart);
  minus.validate(chart);
  if (!(plus.base == minus.base) || !(plus.direction == -minus.direction))
    throw Error(ErrorCode::Precondition, "line halves must share the base and have opposite directions");
}

GeodesicPath integrate_geodesic(const MetricChart& chart, Vec2 base, Vec2 v0, double horizon, double dt) {
  if (!(dt > 0.0) || dt > horizon) throw Error(ErrorCode::Precondition, "integrate_geodesic: need 0 < dt <= horizon");
  const double speed = chart.gnorm(base, v0);
  if (std::abs(speed - 1.0) > 1e-9)
    throw Error(ErrorCode::Precondition, "integrate_geodesic: initial velocity is not unit length",
                std::abs(speed - 1.0));
  GeodesicPath path;
  path.dt = dt;
  path.states.push_back({chart.wrap(base), v0});
  const auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  for (std::size_t k = 0; k < steps; ++k) {
    const GeodesicState s = path.states.back();
    GeodesicState next{};
    try {
      const Deriv k1 = rhs(chart, s.p, s.v);
      const Deriv k2 = rhs(chart, s.p + k1.dp * (dt / 2), s.v + k1.dv * (dt / 2));
      const Deriv k3 = rhs(chart, s.p + k2.dp * (dt / 2), s.v + k2.dv * (dt / 2));
      const Deriv k4 = rhs(chart, s.p + k3.dp * dt, s.v + k3.dv * dt);
      next.p = s.p + (k1.dp + k2.dp * 2.0 + k3.dp * 2.0 + k4.dp) * (dt / 6);
      next.v = s.v + (k1.dv + k2.dv * 2.0 + k3.dv * 2.0 + k4.dv) * (dt / 6);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Domain && e.code() != ErrorCode::Boundary) throw;
      path.truncated = true;
      break;
    }
    if (!chart.contains(next.p) && !(chart.periodic_x() && chart.contains(chart.wrap(next.p)))) {
      path.truncated = true;
      break;
    }
    next.p = chart.wrap(next.p);
    path.states.push_back(next);
  }
  if (path.states.size() < 2) throw Error(ErrorCode::EmptyPath, "integrate_geodesic: path leaves the chart immediately");
  return path;
}

GeodesicPath integrate_ray(const MetricChart& chart, const RaySpec& ray, double dt) {
  ray.validate(chart);
  return integrate_geodesic(chart, ray.base, ray.direction, ray.horizon, std::min(dt, ray.horizon));
}

std::size_t confident_extent(const MetricChart& chart, const GeodesicPath& path, int margin) {
  const Rect& d = chart.domain();
  const double mx = margin * chart.hx(), my = margin * chart.hy();
  std::size_t k = 0;
  for (; k < path.states.size(); ++k) {
    const Vec2 p = path.states[k].p;
    if (p.y < d.y_min + my || p.y > d.y_max - my) break;
    if (!chart.periodic_x() && (p.x < d.x_min + mx || p.x > d.x_max - mx)) break;
  }
  return k;
}

DistanceOracle::DistanceOracle(const MetricChart& chart, EikonalOptions options)
    : chart_(chart), options_(options) {}

const ScalarField& DistanceOracle::field_from(Vec2 anchor) {
  const auto key = std::make_pair(anchor.x, anchor.y);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, solve_distance(chart_, SourceSet::point(anchor), options_)).first;
  return it->second;
}

std::optional<double> DistanceOracle::distance(Vec2 a, Vec2 b) { return field_from(a).sample(b); }

std::ostream& operator<<(std::ostream& os, const VerdictReport& v) {
  char buf[64];
  os << v.check << ": " << (v.pass ? "pass" : "fail");
  std::snprintf(buf, sizeof buf, " violation=%.6g tol=%.6g", v.violation, v.tolerance);
  os << buf;
  if (!v.detail.empty()) os << " (" << v.detail << ")";
  return os;
}

VerdictReport is_ray(const MetricChart& chart, const GeodesicPath& path, DistanceOracle& oracle,
                     const RayTestOptions& options) {
  if (path.empty() || path.t0 != 0.0) throw Error(ErrorCode::Precondition, "is_ray: path must start at t = 0");
  const std::size_t ext = confident_extent(chart, path, options.margin_cells + 1);
  const double t_ext = ext > 0 ? path.t_at(ext - 1) : 0.0;
  double T = t_ext;
  if (options.horizon > 0.0) {
    if (t_ext + 1e-9 < options.horizon) {
      std::ostringstream os;
      os << "is_ray: path trusted only up to t=" << t_ext << ", requested " << options.horizon;
      throw Error(ErrorCode::InsufficientHorizon, os.str(), options.horizon - t_ext);
    }
    T = options.horizon;
  }
  const double dmin = std::max(2.0 * chart.h(), path.dt);
  if (T <= dmin) throw Error(ErrorCode::InsufficientHorizon, "is_ray: trusted path shorter than two cells");
  VerdictReport rep;
  rep.check = "is_ray";
  rep.tolerance = options.tol > 0.0 ? options.tol : default_tol(chart, path.dt);
  const int anchors = std::max(1, options.anchors);
  const int per = std::max(1, options.pairs / anchors);
  double worst = -1e300;
  int tested = 0;
  for (int a = 0; a < anchors; ++a) {
    const double ta = T * a / (2.0 * anchors);
    const Vec2 pa = path.at(chart, ta)->p;
    for (double delta : log_spaced(dmin, T - ta, per)) {
      const auto q = path.at(chart, ta + delta);
      if (!q) continue;
      const auto d = oracle.distance(pa, q->p);
      if (!d) continue;
      worst = std::max(worst, delta - *d);
      ++tested;
    }
  }
  if (tested == 0) throw Error(ErrorCode::Data, "is_ray: no pair could be evaluated");
  rep.violation = std::max(0.0, worst);
  rep.pass = rep.violation <= rep.tolerance;
  rep.detail = std::to_string(tested) + " pairs up to t=" + std::to_string(T);
  return rep;
}

const char* glue_status_name(GlueStatus s) {
  switch (s) {
    case GlueStatus::Accepted: return "accepted";
    case GlueStatus::NotGeodesic: return "not-a-geodesic";
    case GlueStatus::NotMinimizing: return "not-minimizing";
  }
  return "?";
}

GlueResult glue_line(const MetricChart& chart, const GeodesicPath& plus, const GeodesicPath& minus,
                     DistanceOracle& oracle, const GlueOptions& options) {
  if (plus.empty() || minus.empty()) throw Error(ErrorCode::Precondition, "glue_line: empty half");
  if (std::abs(plus.dt - minus.dt) > 1e-12) throw Error(ErrorCode::Precondition, "glue_line: halves use different dt");
  GlueResult res;
  res.tolerance = options.tol > 0.0 ? options.tol : default_tol(chart, plus.dt);
  const GeodesicState& p0 = plus.states.front();
  const GeodesicState& m0 = minus.states.front();
  if (chart.displacement(p0.p, m0.p).norm() > 1e-9)
    throw Error(ErrorCode::Precondition, "glue_line: halves do not share a base point");
  const double mismatch = chart.gnorm(p0.p, p0.v + m0.v);
  if (mismatch > options.tol_dir) {
    res.status = GlueStatus::NotGeodesic;
    res.defect = mismatch;
    return res;
  }
  GeodesicPath& line = res.line;
  line.dt = plus.dt;
  line.t0 = -minus.t_end();
  line.truncated = plus.truncated || minus.truncated;
  for (std::size_t k = minus.size(); k-- > 1;) line.states.push_back({minus.states[k].p, -minus.states[k].v});
  line.states.insert(line.states.end(), plus.states.begin(), plus.states.end());

  const double tm = [&] {
    const std::size_t e = confident_extent(chart, minus, options.margin_cells + 1);
    return e > 0 ? minus.t_at(e - 1) : 0.0;
  }();
  const double tp = [&] {
    const std::size_t e = confident_extent(chart, plus, options.margin_cells + 1);
    return e > 0 ? plus.t_at(e - 1) : 0.0;
  }();
  const double dmin = std::max(2.0 * chart.h(), plus.dt);
  if (tm < dmin || tp < dmin) throw Error(ErrorCode::InsufficientHorizon, "glue_line: a half is shorter than two cells");
  double worst = -1e300;
  int tested = 0;
  const int anchors = std::max(1, options.anchors);
  for (int a = 0; a < anchors; ++a) {
    const double sigma = tm * (a + 1) / anchors;
    const auto pa = line.at(chart, -sigma);
    if (!pa) continue;
    for (double s1 : log_spaced(dmin, tp, options.pairs_per_anchor)) {
      const auto q = line.at(chart, s1);
      if (!q) continue;
      const auto d = oracle.distance(pa->p, q->p);
      if (!d) continue;
      worst = std::max(worst, (s1 + sigma) - *d);
      ++tested;
    }
  }
  if (tested == 0) throw Error(ErrorCode::Data, "glue_line: no pair could be evaluated");
  res.defect = std::max(0.0, worst);
  res.status = res.defect <= res.tolerance ? GlueStatus::Accepted : GlueStatus::NotMinimizing;
  return res;
}

std::vector<Covector> reachable_gradients(const MetricChart& chart, const ScalarField& field, Vec2 p,
                                          double jump_threshold, double tol_grad, double* diameter) {
  const auto ij = field.nearest_node(p);
  if (!ij || !field.valid(ij->first, ij->second)) return {};
  const GradientJump jump = gradient_jump(chart, field, ij->first, ij->second, jump_threshold / 2.0, tol_grad);
  if (diameter) *diameter = jump.diameter;
  std::vector<Covector> out;
  for (const auto& c : jump.clusters) out.push_back(c.representative);
  return out;
}

std::optional<double> slope_along(const ScalarField& f, const GeodesicPath& path, std::size_t first,
                                  std::size_t last, std::size_t* used) {
  double st = 0, sb = 0, stt = 0, stb = 0;
  std::size_t n = 0;
  for (std::size_t k = first; k < last && k < path.size(); ++k) {
    const auto b = f.sample(path.states[k].p);
    if (!b) break;
    const double t = path.t_at(k);
    st += t;
    sb += *b;
    stt += t * t;
    stb += t * *b;
    ++n;
  }
  if (used) *used = n;
  if (n < 3) return std::nullopt;
  const double dn = static_cast<double>(n);
  const double den = stt - st * st / dn;
  if (!(den > 0.0)) return std::nullopt;
  return (stb - st * sb / dn) / den;
}

CorayTrace trace_coray_from(const MetricChart& chart, const ScalarField& busemann, Vec2 start, Covector p,
                            double horizon, double dt, const CorayOptions& options) {
  CorayTrace tr;
  tr.chosen = p;
  Vec2 v = -chart.sharp(start, p);
  const double n = chart.gnorm(start, v);
  if (!(n > 0.0)) throw Error(ErrorCode::Data, "trace_coray: zero gradient");
  v = v / n;
  tr.path = integrate_geodesic(chart, start, v, horizon, std::min(dt, horizon));
  const std::size_t ext = confident_extent(chart, tr.path, options.margin_cells);
  const auto slope = slope_along(busemann, tr.path, 0, ext, &tr.used_states);
  if (!slope || tr.path.t_at(tr.used_states - 1) < 2.0 * chart.h())
    throw Error(ErrorCode::Data, "trace_coray: path leaves the valid region before the slope can be measured");
  tr.slope = *slope;
  tr.slope_defect = std::abs(tr.slope + 1.0);
  if (tr.slope_defect > options.tol_slope) {
    std::ostringstream os;
    os << "trace_coray: slope " << tr.slope << " along the backtrace from (" << start.x << "," << start.y
       << ") differs from -1";
    throw Error(ErrorCode::CorayValidation, os.str(), tr.slope_defect);
  }
  return tr;
}

CorayTrace trace_coray(const MetricChart& chart, const ScalarField& busemann, Vec2 start, double horizon,
                       double dt, const CorayOptions& options, std::optional<Vec2> previous) {
  if (!busemann.valid_at(start)) throw Error(ErrorCode::Data, "trace_coray: start point is masked");
  double diam = 0.0;
  const auto grads = reachable_gradients(chart, busemann, start, options.jump_threshold, options.tol_grad, &diam);
  if (grads.empty()) throw Error(ErrorCode::Data, "trace_coray: no reachable gradient at the start point");
  std::size_t pick = 0;
  if (previous) {
    const Mat2 g = chart.metric_at(start);
    double best = -2.0;
    for (std::size_t k = 0; k < grads.size(); ++k) {
      const Vec2 v = -chart.sharp(start, grads[k]);
      const double c = dot(v, g.apply(*previous)) / std::sqrt(g.quad(v) * g.quad(*previous));
      if (c > best) {
        best = c;
        pick = k;
      }
    }
  }
  CorayTrace tr = trace_coray_from(chart, busemann, start, grads[pick], horizon, dt, options);
  tr.gradients = grads;
  tr.gradient_diameter = diam;
  return tr;
}

void write_path_csv(const MetricChart& chart, const GeodesicPath& path, std::ostream& os) {
  os << "# chart=" << chart.id() << " dt=" << path.dt << " t0=" << path.t0
     << " truncated=" << (path.truncated ? 1 : 0) << "\n";
  os << "t,x,y,vx,vy\n";
  char buf[160];
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& s = path.states[k];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", path.t_at(k), s.p.x, s.p.y, s.v.x, s.v.y);
    os << buf;
  }
}

void write_path_csv(const MetricChart& chart, const GeodesicPath& path, const std::string& file) {
  std::ofstream os(file);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + file + " for writing");
  write_path_csv(chart, path, os);
}

}  // namespace busekit
