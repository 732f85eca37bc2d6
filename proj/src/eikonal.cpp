#include "busekit/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "busekit/gradients.hpp"

namespace busekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDi[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDj[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// Minimize u0 + s (u1 - u0) + |(1-s) e0 + s e1|_G over s in (0,1).
// Returns +inf when the minimizer is not interior (edge updates cover it).
inline double simplex_update(double u0, double u1, Vec2 e0, Vec2 e1, const Mat2& G, double* s_out) {
  const Vec2 d = e1 - e0;
  const double a = G.quad(d);
  const Vec2 Gd = G.apply(d);
  const double b = dot(e0, Gd);
  const double c = G.quad(e0);
  const double delta = u1 - u0;
  const double a_eff = a - delta * delta;
  if (a_eff <= 0.0) return kInf;
  double disc = (a * c - b * b) / a_eff;
  if (disc < 0.0) disc = 0.0;
  const double s = (-b - delta * std::sqrt(disc)) / a;
  if (!(s > 0.0 && s < 1.0)) return kInf;
  const double q = a * s * s + 2.0 * b * s + c;
  *s_out = s;
  return u0 + s * delta + std::sqrt(q > 0.0 ? q : 0.0);
}

class Sweeper {
 public:
  Sweeper(const MetricChart& chart, const EikonalOptions& opt)
      : chart_(chart), opt_(opt), nx_(chart.nx()), ny_(chart.ny()),
        n_(static_cast<std::size_t>(nx_) * ny_), u_(n_, kInf), fixed_(n_, 0), active_(n_, 1),
        metric_(n_) {
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) metric_[idx(i, j)] = chart.tensor_unchecked(chart.node(i, j));
    for (int k = 0; k < 8; ++k) offset_[k] = Vec2{kDi[k] * chart.hx(), kDj[k] * chart.hy()};
  }

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

  int col(int i) const {
    if (chart_.periodic_x()) return i < 0 ? i + nx_ : (i >= nx_ ? i - nx_ : i);
    return (i < 0 || i >= nx_) ? -1 : i;
  }

  void fix(int i, int j, double v) {
    const std::size_t k = idx(i, j);
    if (v < u_[k]) u_[k] = v;
    fixed_[k] = 1;
  }

  double simpson_length(Vec2 a, Vec2 d) const {
    const Mat2 g0 = chart_.tensor_unchecked(chart_.wrap(a));
    const Mat2 g1 = chart_.tensor_unchecked(chart_.wrap(a + d * 0.5));
    const Mat2 g2 = chart_.tensor_unchecked(chart_.wrap(a + d));
    return (std::sqrt(g0.quad(d)) + 4.0 * std::sqrt(g1.quad(d)) + std::sqrt(g2.quad(d))) / 6.0;
  }

  void init_point(Vec2 s) {
    const double r_cells = opt_.collar_cells * chart_.h();
    const double lam = chart_.tensor_unchecked(s).min_eigenvalue();
    const double r_chart =
        std::min(std::max(r_cells, 1.5 * opt_.point_collar_radius / std::sqrt(lam)), 64.0 * chart_.h());
    const int ri = static_cast<int>(std::ceil(r_chart / chart_.hx())) + 1;
    const int rj = static_cast<int>(std::ceil(r_chart / chart_.hy())) + 1;
    const int ci = static_cast<int>(std::lround((s.x - chart_.domain().x_min) / chart_.hx()));
    const int cj = static_cast<int>(std::lround((s.y - chart_.domain().y_min) / chart_.hy()));
    for (int dj = -rj; dj <= rj; ++dj) {
      const int j = cj + dj;
      if (j < 0 || j >= ny_) continue;
      for (int di = -ri; di <= ri; ++di) {
        const int i = col(ci + di);
        if (i < 0) continue;
        const Vec2 d = chart_.displacement(s, chart_.node(i, j));
        if (d.norm() > r_chart + 1e-12) continue;
        const double len = simpson_length(s, d);
        if (d.norm() <= r_cells + 1e-12 || len <= opt_.point_collar_radius) fix(i, j, len);
      }
    }
  }

  void init_segment(Vec2 a, Vec2 b) {
    const double r = opt_.collar_cells * chart_.h();
    const double x_lo = std::min(a.x, b.x) - r, x_hi = std::max(a.x, b.x) + r;
    const double y_lo = std::min(a.y, b.y) - r, y_hi = std::max(a.y, b.y) + r;
    const Rect& dom = chart_.domain();
    const int i0 = static_cast<int>(std::floor((x_lo - dom.x_min) / chart_.hx()));
    const int i1 = static_cast<int>(std::ceil((x_hi - dom.x_min) / chart_.hx()));
    const int j0 = std::max(0, static_cast<int>(std::floor((y_lo - dom.y_min) / chart_.hy())));
    const int j1 = std::min(ny_ - 1, static_cast<int>(std::ceil((y_hi - dom.y_min) / chart_.hy())));
    const Vec2 ab = b - a;
    for (int j = j0; j <= j1; ++j) {
      for (int ii = i0; ii <= i1; ++ii) {
        const int i = col(ii);
        if (i < 0) continue;
        // unwrapped node position next to the segment
        const Vec2 nodep{dom.x_min + ii * chart_.hx(), dom.y_min + j * chart_.hy()};
        const Mat2 G = metric_[idx(i, j)];
        const double len2 = G.quad(ab);
        double t = len2 > 0.0 ? dot(nodep - a, G.apply(ab)) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const Vec2 foot = a + ab * t;
        const Vec2 d = nodep - foot;
        if (d.norm() > r + 1e-12) continue;
        fix(i, j, simpson_length(foot, d));
      }
    }
  }

  // Length of the chart segment xp -> xp + w by Simpson's rule on the metric
  // norm; g_end is the (interpolated) metric at the far end.
  double segment_length(Vec2 xp, const Mat2& g_p, Vec2 w, const Mat2& g_end) const {
    const Mat2 g_mid = chart_.tensor_unchecked(chart_.wrap(xp + w * 0.5));
    return (std::sqrt(g_p.quad(w)) + 4.0 * std::sqrt(g_mid.quad(w)) + std::sqrt(g_end.quad(w))) / 6.0;
  }

  // One node evaluation. Returns the new value (<= old).
  double evaluate(int i, int j) const {
    const std::size_t p = idx(i, j);
    double nbv[8];
    int nbi[8];
    bool any = false;
    for (int k = 0; k < 8; ++k) {
      const int ii = col(i + kDi[k]);
      const int jj = j + kDj[k];
      if (ii < 0 || jj < 0 || jj >= ny_) {
        nbi[k] = -1;
        nbv[k] = kInf;
        continue;
      }
      nbi[k] = static_cast<int>(idx(ii, jj));
      nbv[k] = u_[static_cast<std::size_t>(nbi[k])];
      any = any || nbv[k] < kInf;
    }
    double best = u_[p];
    if (!any) return best;
    const Mat2& Gp = metric_[p];
    const Vec2 xp = chart_.node(i, j);
    for (int k = 0; k < 8; ++k) {
      if (!(nbv[k] < best)) continue;
      const double cand = nbv[k] + segment_length(xp, Gp, offset_[k], metric_[static_cast<std::size_t>(nbi[k])]);
      if (cand < best) best = cand;
    }
    for (int k = 0; k < 8; ++k) {
      const int k1 = (k + 1) & 7;
      const double u0 = nbv[k], u1 = nbv[k1];
      if (!(u0 < kInf && u1 < kInf)) continue;
      if (u0 >= best && u1 >= best) continue;
      double s = 0.0;
      if (!(simplex_update(u0, u1, offset_[k], offset_[k1], Gp, &s) < kInf)) continue;
      // refine with the metric averaged along the characteristic segment
      const Mat2 Gq = metric_[static_cast<std::size_t>(nbi[k])] * (1.0 - s) +
                      metric_[static_cast<std::size_t>(nbi[k1])] * s;
      double s2 = s;
      if (simplex_update(u0, u1, offset_[k], offset_[k1], (Gp + Gq) * 0.5, &s2) < kInf) s = s2;
      const Vec2 w = offset_[k] * (1.0 - s) + offset_[k1] * s;
      const Mat2 Gw = metric_[static_cast<std::size_t>(nbi[k])] * (1.0 - s) +
                      metric_[static_cast<std::size_t>(nbi[k1])] * s;
      const double cand = u0 + s * (u1 - u0) + segment_length(xp, Gp, w, Gw);
      if (cand < best) best = cand;
    }
    return best;
  }

  void mark_neighbours(int i, int j) {
    for (int k = 0; k < 8; ++k) {
      const int ii = col(i + kDi[k]);
      const int jj = j + kDj[k];
      if (ii < 0 || jj < 0 || jj >= ny_) continue;
      active_[idx(ii, jj)] = 1;
    }
  }

  // Returns the largest decrease in this sweep (+inf if a node went from inf to finite).
  double sweep(int order) {
    const bool rev_i = (order & 1) != 0;
    const bool rev_j = (order & 2) != 0;
    double max_change = 0.0;
    for (int jj = 0; jj < ny_; ++jj) {
      const int j = rev_j ? ny_ - 1 - jj : jj;
      for (int ii = 0; ii < nx_; ++ii) {
        const int i = rev_i ? nx_ - 1 - ii : ii;
        const std::size_t p = idx(i, j);
        if (!active_[p]) continue;
        active_[p] = 0;
        if (fixed_[p]) continue;
        const double old = u_[p];
        const double v = evaluate(i, j);
        if (v < old) {
          const double change = (old == kInf) ? kInf : old - v;
          u_[p] = v;
          if (change > max_change) max_change = change;
          mark_neighbours(i, j);
        }
      }
    }
    return max_change;
  }

  void run(SolveStats* stats) {
    // fixed nodes propagate their values on the first sweep
    for (std::size_t p = 0; p < n_; ++p) active_[p] = 1;
    int sweeps = 0;
    double last = kInf;
    for (;;) {
      double iter_change = 0.0;
      for (int order = 0; order < 4; ++order) {
        if (sweeps >= opt_.max_sweeps) {
          std::ostringstream os;
          os << "solve_distance: no convergence within " << opt_.max_sweeps
             << " sweeps (last max update " << last << ")";
          throw Error(ErrorCode::Convergence, os.str(), last);
        }
        iter_change = std::max(iter_change, sweep(order));
        ++sweeps;
      }
      last = iter_change;
      double umax = 1.0;
      for (double v : u_)
        if (v < kInf && v > umax) umax = v;
      if (iter_change <= opt_.eps_sweep * umax) break;
    }
    if (stats) {
      stats->sweeps = sweeps;
      stats->last_update = last;
    }
  }

  const std::vector<double>& values() const { return u_; }

 private:
  const MetricChart& chart_;
  EikonalOptions opt_;
  int nx_, ny_;
  std::size_t n_;
  std::vector<double> u_;
  std::vector<std::uint8_t> fixed_;
  std::vector<std::uint8_t> active_;
  std::vector<Mat2> metric_;
  Vec2 offset_[8];
};

}  // namespace

SourceSet SourceSet::point(Vec2 p) {
  SourceSet s;
  s.points.push_back(p);
  return s;
}

SourceSet SourceSet::polyline(std::vector<Vec2> pts) {
  SourceSet s;
  s.polylines.push_back(Polyline{std::move(pts)});
  return s;
}

SourceSet& SourceSet::merge(const SourceSet& other) {
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  points.insert(points.end(), other.points.begin(), other.points.end());
  polylines.insert(polylines.end(), other.polylines.begin(), other.polylines.end());
  if (!other.description.empty())
    description = description.empty() ? other.description : description + " | " + other.description;
  return *this;
}

std::string SourceSet::describe() const {
  if (!description.empty()) return description;
  std::ostringstream os;
  os << "source{";
  bool first = true;
  for (const Vec2& p : points) {
    os << (first ? "" : ";") << "point(" << p.x << "," << p.y << ")";
    first = false;
  }
  for (const Polyline& l : polylines) {
    os << (first ? "" : ";") << "polyline[" << l.points.size() << "]";
    first = false;
  }
  if (!nodes.empty()) os << (first ? "" : ";") << "nodes[" << nodes.size() << "]";
  os << "}";
  return os.str();
}

ScalarField solve_distance(const MetricChart& chart, const SourceSet& source,
                           const EikonalOptions& options, SolveStats* stats) {
  if (source.empty()) throw Error(ErrorCode::Precondition, "solve_distance: empty source set");
  Sweeper sw(chart, options);
  for (const auto& [i, j] : source.nodes) {
    if (i < 0 || i >= chart.nx() || j < 0 || j >= chart.ny())
      throw Error(ErrorCode::Precondition, "solve_distance: source node outside grid");
    sw.fix(i, j, 0.0);
  }
  for (const Vec2& p : source.points) {
    if (!chart.contains(p)) {
      std::ostringstream os;
      os << "solve_distance: source point (" << p.x << "," << p.y << ") outside chart";
      throw Error(ErrorCode::Precondition, os.str());
    }
    sw.init_point(chart.wrap(p));
  }
  for (const Polyline& line : source.polylines) {
    if (line.points.empty()) throw Error(ErrorCode::Precondition, "solve_distance: empty polyline");
    for (const Vec2& p : line.points)
      if (!chart.contains(p)) throw Error(ErrorCode::Precondition, "solve_distance: polyline vertex outside chart");
    if (line.points.size() == 1) sw.init_point(chart.wrap(line.points.front()));
    for (std::size_t k = 0; k + 1 < line.points.size(); ++k) sw.init_segment(line.points[k], line.points[k + 1]);
  }
  sw.run(stats);

  ScalarField f(GridGeometry::of(chart), FieldTag::Distance, source.describe());
  const int m = options.margin_cells;
  for (int j = 0; j < chart.ny(); ++j) {
    for (int i = 0; i < chart.nx(); ++i) {
      const double v = sw.values()[sw.idx(i, j)];
      f.at(i, j) = v;
      bool ok = std::isfinite(v);
      if (j < m || j >= chart.ny() - m) ok = false;
      if (!chart.periodic_x() && (i < m || i >= chart.nx() - m)) ok = false;
      f.set_valid(i, j, ok);
    }
  }
  return f;
}

std::optional<Covector> upwind_gradient(const ScalarField& f, int i, int j) {
  if (!f.valid(i, j)) return std::nullopt;
  const double u = f.at(i, j);
  auto axis = [&](int il, int jl, int ir, int jr, double h) -> std::optional<double> {
    const bool has_l = il >= 0 && jl >= 0 && jl < f.ny() && f.valid(il, jl);
    const bool has_r = ir >= 0 && jr >= 0 && jr < f.ny() && f.valid(ir, jr);
    if (!has_l || !has_r) return std::nullopt;
    const double ul = f.at(il, jl);
    const double ur = f.at(ir, jr);
    if (ul <= ur) {
      return ul < u ? (u - ul) / h : 0.0;
    }
    return ur < u ? (ur - u) / h : 0.0;
  };
  const auto dx = axis(f.column(i - 1), j, f.column(i + 1), j, f.geometry().hx);
  const auto dy = axis(i, j - 1, i, j + 1, f.geometry().hy);
  if (!dx || !dy) return std::nullopt;
  return Covector{*dx, *dy};
}

std::array<std::optional<Covector>, 4> sector_gradients(const ScalarField& f, int i, int j) {
  std::array<std::optional<Covector>, 4> out{};
  if (!f.valid(i, j)) return out;
  const double u0 = f.at(i, j);
  auto one_sided_x = [&](int s) -> std::optional<double> {
    const int i1 = f.column(i + s), i2 = f.column(i + 2 * s);
    if (i1 < 0 || i2 < 0 || !f.valid(i1, j) || !f.valid(i2, j)) return std::nullopt;
    return s * (-3.0 * u0 + 4.0 * f.at(i1, j) - f.at(i2, j)) / (2.0 * f.geometry().hx);
  };
  auto one_sided_y = [&](int s) -> std::optional<double> {
    const int j1 = j + s, j2 = j + 2 * s;
    if (j1 < 0 || j2 < 0 || j1 >= f.ny() || j2 >= f.ny() || !f.valid(i, j1) || !f.valid(i, j2))
      return std::nullopt;
    return s * (-3.0 * u0 + 4.0 * f.at(i, j1) - f.at(i, j2)) / (2.0 * f.geometry().hy);
  };
  const std::optional<double> xp = one_sided_x(+1), xm = one_sided_x(-1);
  const std::optional<double> yp = one_sided_y(+1), ym = one_sided_y(-1);
  if (xp && yp) out[0] = Covector{*xp, *yp};
  if (xm && yp) out[1] = Covector{*xm, *yp};
  if (xm && ym) out[2] = Covector{*xm, *ym};
  if (xp && ym) out[3] = Covector{*xp, *ym};
  return out;
}

ResidualStats eikonal_residual(const MetricChart& chart, const ScalarField& field,
                               const ResidualOptions& options) {
  if (!field.geometry().same_grid(GridGeometry::of(chart)))
    throw Error(ErrorCode::Precondition, "eikonal_residual: field does not live on this chart");
  std::vector<double> res;
  res.reserve(field.values().size());
  std::size_t interior = 0;
  std::size_t excluded = 0;
  for (int j = 0; j < field.ny(); ++j) {
    for (int i = 0; i < field.nx(); ++i) {
      const auto du = upwind_gradient(field, i, j);
      if (!du) continue;
      ++interior;
      const std::size_t k = field.index(i, j);
      const bool is_source = field.tag() == FieldTag::Distance && field.at(i, j) == 0.0;
      bool skip = is_source || (!options.exclude.empty() && options.exclude[k]);
      if (!skip && options.exclude_singular) {
        const GradientJump jump = gradient_jump(chart, field, i, j, options.jump_threshold / 2.0, options.tol_grad);
        skip = jump.clusters.size() >= 2 && jump.diameter > options.jump_threshold;
      }
      if (skip) {
        ++excluded;
        continue;
      }
      const Vec2 p = field.node(i, j);
      const double n = std::sqrt(std::max(0.0, chart.tensor_unchecked(chart.wrap(p)).inverse().quad(*du)));
      res.push_back(std::abs(n - 1.0));
    }
  }
  if (res.empty()) throw Error(ErrorCode::Data, "eikonal_residual: no measurable interior cells");
  ResidualStats st;
  st.counted = res.size();
  st.excluded_fraction = interior ? static_cast<double>(excluded) / static_cast<double>(interior) : 0.0;
  st.max = *std::max_element(res.begin(), res.end());
  st.mean = std::accumulate(res.begin(), res.end(), 0.0) / static_cast<double>(res.size());
  std::nth_element(res.begin(), res.begin() + static_cast<long>(res.size() / 2), res.end());
  st.median = res[res.size() / 2];
  return st;
}

}  // namespace busekit
