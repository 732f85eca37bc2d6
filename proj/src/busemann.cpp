#include "busekit/busemann.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "busekit/gradients.hpp"

namespace busekit {

namespace {

struct Iterate {
  double offset;  // value subtracted from the distance field
  ScalarField distance;
};

LimitField limit_of(const std::vector<Iterate>& iterates, FieldTag tag, double cauchy_tol, double monotone_tol,
                    const std::string& source) {
  LimitField out;
  const ScalarField& last_d = iterates.back().distance;
  const GridGeometry& geo = last_d.geometry();
  ScalarField prev;
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    ScalarField cur(geo, tag, source);
    const ScalarField& d = iterates[k].distance;
    for (std::size_t c = 0; c < cur.values().size(); ++c) {
      cur.values()[c] = d.values()[c] - iterates[k].offset;
      cur.mask()[c] = d.mask()[c];
    }
    TruncationStep step;
    step.t = iterates[k].offset;
    if (k > 0) {
      std::size_t common = 0, over = 0;
      for (std::size_t c = 0; c < cur.values().size(); ++c) {
        if (!cur.mask()[c] || !prev.mask()[c]) continue;
        const double diff = cur.values()[c] - prev.values()[c];
        ++common;
        step.max_defect = std::max(step.max_defect, std::abs(diff));
        step.monotone_violation = std::max(step.monotone_violation, diff);
        if (cauchy_tol >= 0.0 && std::abs(diff) > cauchy_tol) ++over;
      }
      step.masked_fraction = common ? static_cast<double>(over) / static_cast<double>(common) : 0.0;
      out.report.max_monotone_violation = std::max(out.report.max_monotone_violation, step.monotone_violation);
    }
    out.report.steps.push_back(step);
    if (k + 1 == iterates.size()) {
      out.defect = ScalarField(geo, FieldTag::Generic, source + " cauchy defect");
      std::size_t valid = 0, masked = 0;
      for (std::size_t c = 0; c < cur.values().size(); ++c) {
        double def = 0.0;
        if (k > 0) def = prev.mask()[c] ? std::abs(cur.values()[c] - prev.values()[c]) : INFINITY;
        out.defect.values()[c] = def;
        out.defect.mask()[c] = cur.mask()[c];
        if (!cur.mask()[c]) continue;
        ++valid;
        if (cauchy_tol >= 0.0 && def > cauchy_tol) {
          cur.mask()[c] = 0;
          ++masked;
        }
      }
      out.report.masked_fraction = valid ? static_cast<double>(masked) / static_cast<double>(valid) : 0.0;
      out.field = std::move(cur);
    } else {
      prev = std::move(cur);
    }
  }
  if (monotone_tol >= 0.0 && out.report.max_monotone_violation > monotone_tol) {
    std::ostringstream os;
    os << "truncated Busemann iterates increase by " << out.report.max_monotone_violation
       << " (tolerance " << monotone_tol << "): ray or solver inconsistent";
    throw Error(ErrorCode::Inconsistency, os.str(), out.report.max_monotone_violation);
  }
  return out;
}

}  // namespace

void TruncationSchedule::validate() const {
  if (t_values.empty()) throw Error(ErrorCode::Config, "truncation schedule is empty");
  for (std::size_t k = 0; k < t_values.size(); ++k) {
    if (!(t_values[k] > 0.0)) throw Error(ErrorCode::Config, "truncation parameters must be positive");
    if (k > 0 && !(t_values[k] > t_values[k - 1]))
      throw Error(ErrorCode::Config, "truncation schedule must be strictly increasing");
  }
  if (!(cauchy_tol > 0.0)) throw Error(ErrorCode::Config, "cauchy_tol must be positive");
}

std::string ConvergenceReport::text() const {
  std::ostringstream os;
  char buf[160];
  for (const auto& s : steps) {
    std::snprintf(buf, sizeof buf, "  t=%-10g max_cauchy_defect=%-12.6g masked=%.4f monotone_violation=%.3g\n", s.t,
                  s.max_defect, s.masked_fraction, s.monotone_violation);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "  final masked fraction %.4f\n", masked_fraction);
  os << buf;
  return os.str();
}

LimitField busemann_field(const MetricChart& chart, const RaySpec& ray, const TruncationSchedule& schedule,
                          const BusemannOptions& options) {
  schedule.validate();
  ray.validate(chart);
  const double t_max = schedule.t_values.back();
  if (t_max > ray.horizon + 1e-12) throw Error(ErrorCode::Schedule, "truncation schedule exceeds the ray horizon");
  const GeodesicPath path = integrate_geodesic(chart, ray.base, ray.direction, t_max, std::min(options.dt, t_max));
  std::vector<Iterate> its;
  for (double t : schedule.t_values) {
    const auto s = path.at(chart, t);
    if (!s || path.t_end() + 1e-9 < t) {
      std::ostringstream os;
      os << "ray point at t=" << t << " lies outside the chart (path ends at t=" << path.t_end() << ")";
      throw Error(ErrorCode::Schedule, os.str());
    }
    its.push_back({t, solve_distance(chart, SourceSet::point(s->p), options.eikonal)});
  }
  std::ostringstream src;
  src << "busemann ray(" << ray.base.x << "," << ray.base.y << ";" << ray.direction.x << "," << ray.direction.y << ")";
  return limit_of(its, FieldTag::Busemann, schedule.cauchy_tol, options.monotone_tol_cells * chart.h(), src.str());
}

LimitField horofunction_field(const MetricChart& chart, const std::vector<Vec2>& points, Vec2 base,
                              double cauchy_tol, const BusemannOptions& options) {
  if (points.empty()) throw Error(ErrorCode::Precondition, "horofunction_field: no points");
  std::vector<Iterate> its;
  double last = -INFINITY;
  for (const Vec2& x : points) {
    ScalarField d = solve_distance(chart, SourceSet::point(x), options.eikonal);
    const auto c = d.sample(base);
    if (!c) throw Error(ErrorCode::Precondition, "horofunction_field: base point is masked");
    if (!(*c > last))
      throw Error(ErrorCode::Precondition, "horofunction_field: d(base, x_n) is not increasing");
    last = *c;
    its.push_back({*c, std::move(d)});
  }
  return limit_of(its, FieldTag::Horo, cauchy_tol, -1.0, "horofunction");
}

LimitField dl_field(const MetricChart& chart, const std::vector<SourceSet>& sets, Vec2 base, double cauchy_tol,
                    const BusemannOptions& options) {
  if (sets.empty()) throw Error(ErrorCode::Precondition, "dl_field: no source sets");
  std::vector<Iterate> its;
  double last = -INFINITY;
  for (const SourceSet& k : sets) {
    ScalarField d = solve_distance(chart, k, options.eikonal);
    const auto c = d.sample(base);
    if (!c) throw Error(ErrorCode::Precondition, "dl_field: base point is masked");
    if (!(*c > last)) throw Error(ErrorCode::Precondition, "dl_field: d(base, K_n) is not increasing");
    last = *c;
    its.push_back({*c, std::move(d)});
  }
  return limit_of(its, FieldTag::Dl, cauchy_tol, -1.0, "dl-function");
}

SourceSet circle_source(Vec2 center, double radius, int segments) {
  std::vector<Vec2> pts;
  for (int k = 0; k <= segments; ++k) {
    const double a = 2.0 * M_PI * k / segments;
    pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  SourceSet s = SourceSet::polyline(std::move(pts));
  std::ostringstream os;
  os << "circle(" << center.x << "," << center.y << ";r=" << radius << ")";
  s.description = os.str();
  return s;
}

SourceSet vertical_line_source(const MetricChart& chart, double x) {
  SourceSet s = SourceSet::polyline({{x, chart.domain().y_min}, {x, chart.domain().y_max}});
  s.description = "vline(x=" + std::to_string(x) + ")";
  return s;
}

SourceSet region_above_source(const MetricChart& chart, double level) {
  const Rect& d = chart.domain();
  SourceSet s = SourceSet::polyline({{d.x_min, level}, {d.x_max, level}});
  for (int j = 0; j < chart.ny(); ++j)
    for (int i = 0; i < chart.nx(); ++i)
      if (chart.node(i, j).y >= level) s.nodes.emplace_back(i, j);
  s.description = "above(y=" + std::to_string(level) + ")";
  return s;
}

Superdifferential superdifferential(const MetricChart& chart, const ScalarField& field, Vec2 p, double radius,
                                    const SingularityOptions& options) {
  if (radius < 2.0 * chart.h() - 1e-12) throw Error(ErrorCode::Precondition, "superdifferential: radius below 2h");
  const auto c = field.nearest_node(p);
  if (!c || !field.valid(c->first, c->second)) throw Error(ErrorCode::Data, "superdifferential: point is masked");
  const double cut = options.jump_threshold / 2.0;
  std::vector<Covector> samples = gradient_jump(chart, field, c->first, c->second, cut, options.tol_grad).samples;
  const int ri = static_cast<int>(std::ceil(radius / field.geometry().hx));
  const int rj = static_cast<int>(std::ceil(radius / field.geometry().hy));
  const Vec2 pc = field.node(c->first, c->second);
  for (int dj = -rj; dj <= rj; ++dj) {
    for (int di = -ri; di <= ri; ++di) {
      if (di == 0 && dj == 0) continue;
      const int i = field.column(c->first + di);
      const int j = c->second + dj;
      if (i < 0 || j < 0 || j >= field.ny() || !field.valid(i, j)) continue;
      if (chart.displacement(pc, field.node(i, j)).norm() > radius + 1e-12) continue;
      const GradientJump gj = gradient_jump(chart, field, i, j, cut, options.tol_grad);
      samples.insert(samples.end(), gj.samples.begin(), gj.samples.end());
    }
  }
  Superdifferential out;
  out.samples = samples.size();
  const Mat2 ginv = chart.metric_at(chart.wrap(pc)).inverse();
  out.clusters = cluster_gradients(samples, ginv, cut);
  std::vector<Covector> pts;
  for (const auto& cl : out.clusters) pts.push_back(cl.representative);
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      out.diameter = std::max(out.diameter, std::sqrt(std::max(0.0, ginv.quad(pts[a] - pts[b]))));
  // monotone chain convex hull
  std::sort(pts.begin(), pts.end(), [](Covector a, Covector b) { return a.dx < b.dx || (a.dx == b.dx && a.dy < b.dy); });
  if (pts.size() <= 2) {
    out.hull = pts;
    return out;
  }
  auto cross = [](Covector o, Covector a, Covector b) {
    return (a.dx - o.dx) * (b.dy - o.dy) - (a.dy - o.dy) * (b.dx - o.dx);
  };
  std::vector<Covector> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  out.hull = h;
  return out;
}

std::size_t SingularMask::count() const {
  return static_cast<std::size_t>(std::count(marked.begin(), marked.end(), std::uint8_t{1}));
}

SingularMask singular_set(const MetricChart& chart, const ScalarField& field, const SingularityOptions& options) {
  SingularMask m;
  m.nx = field.nx();
  m.ny = field.ny();
  m.marked.assign(field.values().size(), 0);
  m.diameter.assign(field.values().size(), 0.0);
  const double cut = options.jump_threshold / 2.0;
  std::vector<std::vector<Covector>> samples(field.values().size());
  std::vector<std::pair<int, int>> candidates;
  for (int j = 0; j < field.ny(); ++j) {
    for (int i = 0; i < field.nx(); ++i) {
      if (!field.valid(i, j)) continue;
      GradientJump gj = gradient_jump(chart, field, i, j, cut, options.tol_grad);
      const std::size_t k = field.index(i, j);
      m.diameter[k] = gj.diameter;
      if (gj.clusters.size() >= 2 && gj.diameter > options.jump_threshold) candidates.push_back({i, j});
      samples[k] = std::move(gj.samples);
    }
  }
  // A split seen by one node's stencil is confirmed only if the gradients of
  // the surrounding 2-cell block do not chain into a single cluster; smooth
  // but strongly curved fields pass the first test and fail this one.
  for (auto [i, j] : candidates) {
    std::vector<Covector> pool;
    for (int dj = -2; dj <= 2; ++dj)
      for (int di = -2; di <= 2; ++di) {
        const int ii = field.column(i + di), jj = j + dj;
        if (ii < 0 || jj < 0 || jj >= field.ny()) continue;
        const auto& s = samples[field.index(ii, jj)];
        pool.insert(pool.end(), s.begin(), s.end());
      }
    const Mat2 ginv = chart.metric_at(chart.wrap(field.node(i, j))).inverse();
    const auto clusters = cluster_gradients(pool, ginv, cut);
    double diam = 0.0;
    for (std::size_t a = 0; a < clusters.size(); ++a)
      for (std::size_t b = a + 1; b < clusters.size(); ++b)
        diam = std::max(diam, std::sqrt(std::max(0.0, ginv.quad(clusters[a].representative - clusters[b].representative))));
    const std::size_t k = field.index(i, j);
    if (clusters.size() >= 2 && diam > options.jump_threshold) {
      m.marked[k] = 1;
      m.diameter[k] = std::max(m.diameter[k], diam);
    }
  }
  return m;
}

SemiconcavityEstimate semiconcavity_constant(const MetricChart& chart, const ScalarField& field, const Rect& region) {
  const GridGeometry& g = field.geometry();
  const int i0 = static_cast<int>(std::ceil((region.x_min - g.origin.x) / g.hx - 1e-9));
  const int i1 = static_cast<int>(std::floor((region.x_max - g.origin.x) / g.hx + 1e-9));
  const int j0 = std::max(0, static_cast<int>(std::ceil((region.y_min - g.origin.y) / g.hy - 1e-9)));
  const int j1 = std::min(g.ny - 1, static_cast<int>(std::floor((region.y_max - g.origin.y) / g.hy + 1e-9)));
  if (i1 - i0 < 2 || j1 - j0 < 2) throw Error(ErrorCode::Precondition, "semiconcavity_constant: region smaller than 3x3 cells");
  SemiconcavityEstimate est;
  est.chart = chart.id();
  const int off[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  double best = 0.0;
  for (int j = j0; j <= j1; ++j) {
    for (int ii = i0; ii <= i1; ++ii) {
      const int i = field.column(ii);
      if (i < 0 || !field.valid(i, j)) continue;
      bool counted = false;
      for (const auto& o : off) {
        const int ip = field.column(ii + o[0]), im = field.column(ii - o[0]);
        const int jp = j + o[1], jm = j - o[1];
        if (ip < 0 || im < 0 || jp < 0 || jm < 0 || jp >= g.ny || jm >= g.ny) continue;
        if (!field.valid(ip, jp) || !field.valid(im, jm)) continue;
        const double e2 = std::pow(o[0] * g.hx, 2) + std::pow(o[1] * g.hy, 2);
        const double q = (field.at(ip, jp) + field.at(im, jm) - 2.0 * field.at(i, j)) / e2;
        counted = true;
        if (q > best) {
          best = q;
          est.argmax = field.node(i, j);
        }
      }
      if (counted) ++est.cells;
    }
  }
  if (est.cells == 0) throw Error(ErrorCode::Data, "semiconcavity_constant: no valid cells in region");
  est.constant = best;
  return est;
}

}  // namespace busekit
