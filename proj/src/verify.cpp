#include "busekit/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "busekit/barrier.hpp"

namespace busekit {

namespace {

// id, suite, statement, tolerance (value, absolute, text)
const Claim kClaims[] = {
    {"metric.spd", "distance", "The metric tensor is symmetric positive definite at every node", {1e-12, true, "min eigenvalue > 1e-12"}},
    {"distance.accuracy", "distance", "Point-source distance fields approach the closed-form distance", {0, false, "informational, error / h per resolution"}},
    {"distance.convergence", "distance", "Distance error decays at first order under refinement", {0.3, true, "log-log slope in [0.7, 1.3]"}},
    {"distance.viscosity", "distance", "Distance fields solve |du|_g = 1 off their singular set", {5, false, "median residual <= 5h"}},
    {"ray.minimizing", "busemann", "Configured rays minimize distance between their points", {2, false, "d(γ(s), γ(t)) >= |t - s| - 2 max(h, dt)"}},
    {"line.minimizing", "barrier", "Configured lines glue from two rays and minimize across the joint", {2, false, "d(γ(s), γ(s')) >= s' - s - 2 max(h, dt)"}},
    {"busemann.monotone", "busemann", "Truncated Busemann iterates are non-increasing in t", {3, false, "b_{t2} <= b_{t1} + 3h"}},
    {"busemann.lower_bound", "busemann", "Busemann functions are bounded below by minus the distance to the base", {3, false, "b >= -d(., γ(0)) - 3h"}},
    {"busemann.closed_form", "busemann", "Busemann fields match the closed form on model charts", {2, false, "max error <= 2h (euclidean, cylinder), 4h (half-plane)"}},
    {"field.lipschitz", "busemann", "Produced fields are 1-Lipschitz for the metric distance", {3, false, "|u(p) - u(q)| <= d(p, q) + 3h"}},
    {"field.viscosity", "busemann", "Busemann, horo- and dl-fields solve |du|_g = 1 off their singular set", {5, false, "median residual <= 5h"}},
    {"field.semiconcavity", "busemann", "Semi-concavity constants are finite and stable under refinement", {2, true, "ratio of the two finest estimates <= 2, or both <= 0.05"}},
    {"singular.location", "singular", "Singular cells lie where corays branch in the model geometry", {2, true, "within 2 cells of the expected locus"}},
    {"singular.coray_branching", "singular", "Every singular cell emits two validated corays", {0.95, true, "fraction of checked cells >= 0.95"}},
    {"singular.gradient_split", "singular", "Cells with two separated gradient clusters are marked singular", {0, true, "no unmarked split cell beyond 2 cells of the mask"}},
    {"barrier.nonnegative", "barrier", "Barrier fields are nonnegative", {3, false, "B >= -3h"}},
    {"barrier.vanishes_on_line", "barrier", "Barrier fields vanish along their line", {3, false, "|B| <= 3h within one cell of the line"}},
    {"barrier.shift_invariant", "barrier", "Barrier fields do not depend on the line's time origin", {6, false, "|B_τ - B| <= 6h"}},
    {"barrier.reversal_invariant", "barrier", "Barrier fields do not depend on the line's orientation", {6, false, "|B_{-γ} - B| <= 6h"}},
    {"barrier.foliation", "barrier", "The zero set of a barrier is foliated by glued lines", {0.95, true, "glued fraction >= 0.95 on two-dimensional zero sets"}},
    {"barrier.quadratic_bound", "barrier", "Barrier fields grow at most quadratically in the distance to the line", {0.15, true, "|C - C_exact| <= 0.15 on model charts"}},
    {"barrier.semiconcavity_sum", "barrier", "The barrier is as semi-concave as its two Busemann parts", {6, false, "C(B) <= C(b+) + C(b-) + 6h"}},
    {"relation.barrier_monotone", "relations", "A line preceding another has the smaller barrier", {6, false, "B_γ <= B_γ' + 6h whenever γ' precedes γ"}},
    {"relation.transitive", "relations", "Precedence is transitive", {0, true, "no counterexample triple"}},
    {"relation.equivalence_routes", "relations", "Mutual precedence agrees with constant Busemann differences", {0, true, "no disagreeing pair"}},
    {"relation.barrier_difference", "relations", "Among lines preceding a fixed line, equivalence means equal barriers", {6, false, "equivalent iff osc(B_1 - B_2) <= 6h"}},
    {"relation.pseudo_distance", "relations", "The barrier pseudo-distance vanishes exactly on equivalent pairs", {6, false, "value <= 6h iff equivalent"}},
    {"relation.classes", "relations", "Equivalence classes of the configured line family", {0, true, "informational"}},
    {"line.sum_test", "relations", "Two rays form a line iff their Busemann sum is nonnegative", {6, false, "min(b1 + b2) >= -6h agrees with the gluing test"}},
    {"coray.comparison", "comparison", "A coray's Busemann function dominates the ray's, normalized at the coray base", {6, false, "b(x) - b(x0) <= b_c(x) + 6h"}},
    {"horo.matches_busemann", "horo", "The horofunction of points along a ray equals its Busemann function", {4, false, "max |h - b| <= 4h"}},
    {"dl.closed_form", "dl", "dl-functions match the closed form on model charts", {3, false, "max error <= 3h away from the kink"}},
    {"report.complete", "all", "Every registry claim has at least one record", {0, true, "no missing claim"}},
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string resolution_of(const MetricChart& c) { return std::to_string(c.nx()) + "x" + std::to_string(c.ny()); }

bool near(Vec2 a, Vec2 b) { return std::abs(a.x - b.x) < 1e-9 && std::abs(a.y - b.y) < 1e-9; }

// Closed-form point distance on the model charts; empty where none is coded.
std::optional<std::function<double(Vec2)>> point_distance(const MetricChart& c, Vec2 s) {
  switch (c.kind()) {
    case ChartKind::Euclidean:
      return [s](Vec2 p) { return std::hypot(p.x - s.x, p.y - s.y); };
    case ChartKind::HalfPlane:
      return [s](Vec2 p) {
        return std::acosh(1.0 + ((p.x - s.x) * (p.x - s.x) + (p.y - s.y) * (p.y - s.y)) / (2.0 * p.y * s.y));
      };
    case ChartKind::Cylinder: {
      const double L = c.period();
      return [s, L](Vec2 p) {
        double best = INFINITY;
        for (int k = -2; k <= 2; ++k) best = std::min(best, std::hypot(p.x - s.x + k * L, p.y - s.y));
        return best;
      };
    }
    default:
      return std::nullopt;
  }
}

struct ClosedForm {
  std::function<double(Vec2)> f;
  double tol_cells;
};

std::optional<ClosedForm> busemann_closed_form(const MetricChart& c, const RaySpec& r) {
  const Vec2 o = r.base, v = r.direction;
  switch (c.kind()) {
    case ChartKind::Euclidean:
      return ClosedForm{[o, v](Vec2 p) { return -((p.x - o.x) * v.x + (p.y - o.y) * v.y); }, 2};
    case ChartKind::Cylinder:
      if (std::abs(v.x) > 1e-12) return std::nullopt;
      return ClosedForm{[o, v](Vec2 p) { return -(p.y - o.y) * v.y; }, 2};
    case ChartKind::HalfPlane:
      if (std::abs(v.x) > 1e-12) return std::nullopt;
      if (v.y > 0) return ClosedForm{[o](Vec2 p) { return -std::log(p.y / o.y); }, 4};
      return ClosedForm{[o](Vec2 p) { return std::log(((p.x - o.x) * (p.x - o.x) + p.y * p.y) / (p.y * o.y)); }, 4};
    default:
      return std::nullopt;
  }
}

// Exact barrier of a line on the model charts.
std::optional<std::function<double(Vec2)>> barrier_closed_form(const MetricChart& c, const LineSpec& l) {
  const Vec2 v = l.plus.direction;
  if (c.kind() == ChartKind::Euclidean) return [](Vec2) { return 0.0; };
  if (std::abs(v.x) > 1e-12) return std::nullopt;
  if (c.kind() == ChartKind::Cylinder) return [](Vec2) { return 0.0; };
  if (c.kind() == ChartKind::HalfPlane) {
    const double x0 = l.plus.base.x;
    return [x0](Vec2 p) { return std::log1p((p.x - x0) * (p.x - x0) / (p.y * p.y)); };
  }
  return std::nullopt;
}

std::optional<std::function<double(Vec2)>> line_distance_closed_form(const MetricChart& c, const LineSpec& l) {
  const Vec2 v = l.plus.direction, o = l.plus.base;
  if (c.kind() == ChartKind::Euclidean) {
    const double n = std::hypot(v.x, v.y);
    return [o, v, n](Vec2 p) { return std::abs((p.x - o.x) * v.y - (p.y - o.y) * v.x) / n; };
  }
  if (std::abs(v.x) > 1e-12) return std::nullopt;
  if (c.kind() == ChartKind::Cylinder) {
    const double L = c.period();
    return [o, L](Vec2 p) {
      const double d = std::fmod(std::abs(p.x - o.x), L);
      return std::min(d, L - d);
    };
  }
  if (c.kind() == ChartKind::HalfPlane) return [o](Vec2 p) { return std::asinh(std::abs(p.x - o.x) / p.y); };
  return std::nullopt;
}

std::optional<ClosedForm> dl_closed_form(const MetricChart& c, const DlObject& d) {
  using K = SetItem::Kind;
  const Vec2 b = d.base;
  bool circles = true, vlines = true, above = true;
  for (const auto& s : d.sets) {
    circles &= s.kind == K::Circle && near({s.a, s.b}, {d.sets[0].a, d.sets[0].b});
    vlines &= s.kind == K::VLine && s.a > b.x;
    above &= s.kind == K::Above && s.a > b.y;
  }
  if (c.kind() == ChartKind::Euclidean && circles) {
    const Vec2 ctr{d.sets[0].a, d.sets[0].b};
    return ClosedForm{[ctr, b](Vec2 p) { return std::hypot(b.x - ctr.x, b.y - ctr.y) - std::hypot(p.x - ctr.x, p.y - ctr.y); }, 3};
  }
  if (c.kind() == ChartKind::Euclidean && vlines) return ClosedForm{[b](Vec2 p) { return b.x - p.x; }, 3};
  if (c.kind() == ChartKind::HalfPlane && above) return ClosedForm{[b](Vec2 p) { return std::log(b.y / p.y); }, 4};
  return std::nullopt;
}

// Chart-coordinate distance to a segment or ray.
double segment_distance(Vec2 p, Vec2 a, Vec2 dir, double length) {
  double t = (p.x - a.x) * dir.x + (p.y - a.y) * dir.y;
  t = std::clamp(t, 0.0, length);
  return std::hypot(p.x - a.x - t * dir.x, p.y - a.y - t * dir.y);
}

struct Locus {
  std::string name;
  std::function<double(Vec2)> distance;  // chart-coordinate distance; +inf: empty locus
};

struct Ctx {
  const ExperimentConfig& cfg;
  MetricChart chart;
  SuiteReport& rep;
  std::string chart_id;
  std::string res;
  double h;
  DistanceOracle oracle;
  std::map<std::string, RaySpec> rays;
  std::map<std::string, LimitField> ray_fields;
  std::map<std::string, LineFields> lines;
  std::map<std::string, BarrierField> barriers;
  std::vector<std::pair<std::string, ScalarField>> eikonal_fields;  // busemann, horo and dl fields

  Ctx(const ExperimentConfig& c, SuiteReport& r)
      : cfg(c),
        chart(c.make_chart()),
        rep(r),
        chart_id(chart.id()),
        res(resolution_of(chart)),
        h(chart.h()),
        oracle(chart, c.solver.eikonal) {}

  void add(const std::string& claim, const std::string& check, Outcome o, double measured, double tol,
           const std::string& detail, Clock::time_point t0, const std::string& resolution = "") {
    rep.records.push_back({claim, check, chart_id, resolution.empty() ? res : resolution, o, measured, tol,
                           seconds_since(t0), detail});
  }

  void verdict(const std::string& claim, const std::string& check, bool pass, double measured, double tol,
               const std::string& detail, Clock::time_point t0) {
    add(claim, check, pass ? Outcome::Pass : Outcome::Fail, measured, tol, detail, t0);
  }

  void skip(const std::string& claim, const std::string& check, const std::string& why) {
    add(claim, check, Outcome::Skip, 0, 0, why, Clock::now());
  }

  double tol(const std::string& claim) const {
    const auto& p = find_claim(claim).policy;
    return p.absolute ? p.value : p.value * h;
  }

  // Runs `body`; a thrown Error becomes an Error record (Fail for a failed
  // structural lemma) on every listed claim.
  template <class F>
  bool guard(const std::vector<std::string>& claims, const std::string& check, F&& body) {
    const auto t0 = Clock::now();
    try {
      body();
      return true;
    } catch (const Error& e) {
      const Outcome o = e.code() == ErrorCode::Inconsistency ? Outcome::Fail : Outcome::Error;
      for (const auto& c : claims)
        add(c, check, o, e.defect(), 0, std::string(error_code_name(e.code())) + ": " + e.what(), t0);
      return false;
    }
  }

  LineFieldOptions line_options() const { return {cfg.busemann_options(), cfg.schedule(chart)}; }

  Rect region() const {
    if (cfg.solver.region) return *cfg.solver.region;
    const Rect& d = chart.domain();
    return {d.x_min + 0.25 * d.width(), d.x_max - 0.25 * d.width(), d.y_min + 0.25 * d.height(),
            d.y_max - 0.25 * d.height()};
  }
};

bool enabled(const ExperimentConfig& cfg, const std::string& suite) {
  const auto& s = cfg.solver.suites;
  return std::find(s.begin(), s.end(), "all") != s.end() || std::find(s.begin(), s.end(), suite) != s.end();
}

template <class F>
void for_valid(const ScalarField& f, F&& fn) {
  for (int j = 0; j < f.ny(); ++j)
    for (int i = 0; i < f.nx(); ++i)
      if (f.valid(i, j)) fn(i, j, f.node(i, j));
}

bool inside(const Rect& r, Vec2 p) {
  return p.x >= r.x_min - 1e-12 && p.x <= r.x_max + 1e-12 && p.y >= r.y_min - 1e-12 && p.y <= r.y_max + 1e-12;
}

// ---------------------------------------------------------------- distance

void metric_suite(Ctx& c) {
  const auto t0 = Clock::now();
  double lmin = INFINITY;
  for (int j = 0; j < c.chart.ny(); ++j)
    for (int i = 0; i < c.chart.nx(); ++i) {
      const Mat2 g = c.chart.metric_at(c.chart.node(i, j));
      const double tr = g.trace(), det = g.det();
      lmin = std::min(lmin, 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det)));
    }
  c.verdict("metric.spd", "grid nodes", lmin > 1e-12, lmin, 1e-12, "smallest eigenvalue over the grid", t0);
}

Vec2 distance_source(const Ctx& c) {
  for (const auto& [id, s] : c.cfg.sources)
    if (s.items.size() == 1 && s.items[0].kind == SetItem::Kind::Point && s.polylines.empty())
      return {s.items[0].a, s.items[0].b};
  const Rect& d = c.chart.domain();
  return {0.5 * (d.x_min + d.x_max), 0.5 * (d.y_min + d.y_max)};
}

void distance_suite(Ctx& c) {
  const Vec2 src = distance_source(c);
  std::vector<int> levels = c.cfg.solver.resolutions;
  if (levels.empty()) levels.push_back(c.chart.nx());
  const auto exact = point_distance(c.chart, src);
  std::vector<double> hs, errs;
  std::optional<ScalarField> finest;
  std::optional<MetricChart> finest_chart;
  for (int n : levels) {
    const auto t0 = Clock::now();
    try {
      const MetricChart ch = c.cfg.make_chart(n);
      ScalarField u = solve_distance(ch, SourceSet::point(src), c.cfg.solver.eikonal);
      if (exact) {
        double err = 0.0;
        for_valid(u, [&](int i, int j, Vec2 p) {
          if (!c.cfg.solver.oracle || inside(*c.cfg.solver.oracle, p)) err = std::max(err, std::abs(u.at(i, j) - (*exact)(p)));
        });
        hs.push_back(ch.h());
        errs.push_back(err);
        c.add("distance.accuracy", "point (" + fmt("%g", src.x) + ", " + fmt("%g", src.y) + ")", Outcome::Info, err,
              0, "max error = " + fmt("%.4g", err / ch.h()) + " h", t0, resolution_of(ch));
      }
      finest = std::move(u);
      finest_chart = ch;
    } catch (const Error& e) {
      c.add("distance.accuracy", "solve", Outcome::Error, 0, 0, std::string(error_code_name(e.code())) + ": " + e.what(),
            t0, std::to_string(n));
    }
  }
  if (!exact) c.skip("distance.accuracy", "point", "no closed-form distance for this chart kind");
  {
    const auto t0 = Clock::now();
    if (hs.size() >= 2) {
      // least-squares slope of log err against log h
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double n = static_cast<double>(hs.size());
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const double x = std::log(hs[k]), y = std::log(errs[k]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
      }
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      double cmax = 0.0;
      for (std::size_t k = 0; k < hs.size(); ++k) cmax = std::max(cmax, errs[k] / hs[k]);
      c.verdict("distance.convergence", "point source", slope >= 0.7 && slope <= 1.3, slope, 0.3,
                "fitted order over " + std::to_string(hs.size()) + " levels, C = " + fmt("%.4g", cmax), t0);
    } else {
      c.skip("distance.convergence", "point source", "needs a closed form and two or more resolutions");
    }
  }
  if (finest) {
    c.guard({"distance.viscosity"}, "point source", [&] {
      const auto t0 = Clock::now();
      ResidualOptions ro;
      ro.jump_threshold = c.cfg.solver.jump_threshold;
      ro.tol_grad = c.cfg.solver.tol_grad;
      const auto r = eikonal_residual(*finest_chart, *finest, ro);
      const double tol = 5.0 * finest_chart->h();
      c.add("distance.viscosity", "point source", r.median <= tol ? Outcome::Pass : Outcome::Fail, r.median, tol,
            "max " + fmt("%.4g", r.max) + ", excluded " + fmt("%.4g", r.excluded_fraction), t0,
            resolution_of(*finest_chart));
    });
  } else {
    c.skip("distance.viscosity", "point source", "no distance field was produced");
  }
}

// ---------------------------------------------------------------- fields

void residual_record(Ctx& c, const std::string& claim, const std::string& name, const ScalarField& f) {
  c.guard({claim}, name, [&] {
    const auto t0 = Clock::now();
    ResidualOptions ro;
    ro.jump_threshold = c.cfg.solver.jump_threshold;
    ro.tol_grad = c.cfg.solver.tol_grad;
    const auto r = eikonal_residual(c.chart, f, ro);
    const double tol = c.tol(claim);
    c.verdict(claim, name, r.median <= tol, r.median, tol,
              "max " + fmt("%.4g", r.max) + ", mean " + fmt("%.4g", r.mean) + ", excluded " +
                  fmt("%.4g", r.excluded_fraction),
              t0);
  });
}

void lipschitz_record(Ctx& c, const std::string& name, const ScalarField& f) {
  c.guard({"field.lipschitz"}, name, [&] {
    const auto t0 = Clock::now();
    const double tol = c.tol("field.lipschitz");
    const auto v = lipschitz_check(c.chart, f, 3, c.cfg.solver.seed, tol, c.cfg.solver.eikonal);
    c.verdict("field.lipschitz", name, v.pass, v.violation, tol, v.detail, t0);
  });
}

// Semi-concavity on the configured region at the chart resolution and at
// half of it.
void semiconcavity_record(Ctx& c, const std::string& name, const ScalarField& fine,
                          const std::function<ScalarField(const MetricChart&)>& recompute) {
  c.guard({"field.semiconcavity"}, name, [&] {
    const auto t0 = Clock::now();
    const Rect reg = c.region();
    const auto a = semiconcavity_constant(c.chart, fine, reg);
    const MetricChart coarse = c.chart.with_square_cells((c.chart.nx() + 1) / 2);
    const auto b = semiconcavity_constant(coarse, recompute(coarse), reg);
    const double lo = std::min(a.constant, b.constant), hi = std::max(a.constant, b.constant);
    const bool stable = std::isfinite(hi) && (hi <= 0.05 || hi <= 2.0 * lo);
    c.verdict("field.semiconcavity", name, stable, a.constant, 2.0,
              "C = " + fmt("%.4g", a.constant) + " at " + resolution_of(c.chart) + ", " + fmt("%.4g", b.constant) +
                  " at " + resolution_of(coarse),
              t0);
  });
}

void eikonal_field_checks(Ctx& c, const std::string& name, const ScalarField& f,
                          const std::function<ScalarField(const MetricChart&)>& recompute) {
  residual_record(c, "field.viscosity", name, f);
  lipschitz_record(c, name, f);
  semiconcavity_record(c, name, f, recompute);
  c.eikonal_fields.push_back({name, f});
}

void closed_form_record(Ctx& c, const std::string& claim, const std::string& name, const ScalarField& f,
                        const ClosedForm& cf, const std::function<bool(Vec2)>& keep = {}) {
  const auto t0 = Clock::now();
  double err = 0.0;
  std::size_t n = 0;
  for_valid(f, [&](int i, int j, Vec2 p) {
    if (keep && !keep(p)) return;
    err = std::max(err, std::abs(f.at(i, j) - cf.f(p)));
    ++n;
  });
  const double tol = cf.tol_cells * c.h;
  if (n == 0) {
    c.add(claim, name, Outcome::Error, 0, tol, "no valid cell to compare", t0);
    return;
  }
  c.verdict(claim, name, err <= tol, err, tol, std::to_string(n) + " cells", t0);
}

LimitField ray_field(const Ctx& c, const MetricChart& ch, const std::string& id) {
  return busemann_field(ch, c.cfg.ray(ch, id), c.cfg.schedule(ch), c.cfg.busemann_options());
}

void busemann_suite(Ctx& c) {
  if (c.cfg.rays.empty()) {
    for (const char* k : {"ray.minimizing", "busemann.monotone", "busemann.lower_bound", "busemann.closed_form",
                          "field.lipschitz", "field.viscosity", "field.semiconcavity"})
      c.skip(k, "rays", "no rays configured");
    return;
  }
  for (const auto& [id, obj] : c.cfg.rays) {
    (void)obj;
    const std::string name = "ray " + id;
    c.guard({"ray.minimizing"}, name, [&] {
      const auto t0 = Clock::now();
      const RaySpec r = c.cfg.ray(c.chart, id);
      const GeodesicPath p = integrate_ray(c.chart, r, c.cfg.solver.dt);
      const auto v = is_ray(c.chart, p, c.oracle);
      c.verdict("ray.minimizing", name, v.pass, v.violation, v.tolerance, v.detail, t0);
    });
    bool ok = c.guard({"busemann.monotone", "busemann.lower_bound", "busemann.closed_form", "field.lipschitz",
                         "field.viscosity", "field.semiconcavity"},
                        name, [&] {
      const auto t0 = Clock::now();
      const RaySpec r = c.cfg.ray(c.chart, id);
      LimitField lf = ray_field(c, c.chart, id);
      c.rays.emplace(id, r);
      const double tol = c.tol("busemann.monotone");
      c.verdict("busemann.monotone", name, lf.report.max_monotone_violation <= tol, lf.report.max_monotone_violation,
                tol, "masked " + fmt("%.4g", lf.report.masked_fraction), t0);
      c.ray_fields.emplace(id, std::move(lf));
    });
    if (!ok) continue;
    const LimitField& lf = c.ray_fields.at(id);
    c.guard({"busemann.lower_bound"}, name, [&] {
      const auto t0 = Clock::now();
      const ScalarField& d0 = c.oracle.field_from(c.rays.at(id).base);
      double worst = -INFINITY;
      for_valid(lf.field, [&](int i, int j, Vec2) {
        if (d0.valid(i, j)) worst = std::max(worst, -d0.at(i, j) - lf.field.at(i, j));
      });
      const double tol = c.tol("busemann.lower_bound");
      c.verdict("busemann.lower_bound", name, worst <= tol, worst, tol, "max of -d(x, γ(0)) - b(x)", t0);
    });
    if (const auto cf = busemann_closed_form(c.chart, c.rays.at(id)))
      closed_form_record(c, "busemann.closed_form", name, lf.field, *cf);
    else
      c.skip("busemann.closed_form", name, "no closed form for this ray");
    eikonal_field_checks(c, name, lf.field, [&](const MetricChart& ch) { return ray_field(c, ch, id).field; });
  }
}

void horo_suite(Ctx& c) {
  if (c.cfg.horos.empty()) {
    c.skip("horo.matches_busemann", "horofunctions", "no horofunctions configured");
    return;
  }
  for (const auto& [id, obj] : c.cfg.horos) {
    const std::string name = "horo " + id;
    c.guard({"field.viscosity", "horo.matches_busemann"}, name, [&] {
      const double tol_c = c.cfg.cauchy_tol(c.chart);
      auto make = [&](const MetricChart& ch) {
        const HoroObject h = c.cfg.horo(ch, id);
        return horofunction_field(ch, h.points, h.base, tol_c, c.cfg.busemann_options()).field;
      };
      const ScalarField f = make(c.chart);
      if (!obj.ray.empty()) {
        const auto t0 = Clock::now();
        const auto it = c.ray_fields.find(obj.ray);
        if (it == c.ray_fields.end()) {
          c.add("horo.matches_busemann", name, Outcome::Error, 0, 0, "Busemann field of ray " + obj.ray + " unavailable", t0);
        } else {
          double worst = 0.0;
          std::size_t n = 0;
          for_valid(f, [&](int i, int j, Vec2) {
            if (!it->second.field.valid(i, j)) return;
            worst = std::max(worst, std::abs(f.at(i, j) - it->second.field.at(i, j)));
            ++n;
          });
          const double tol = c.tol("horo.matches_busemann");
          c.verdict("horo.matches_busemann", name, n > 0 && worst <= tol, worst, tol,
                    std::to_string(n) + " common cells with ray " + obj.ray, t0);
        }
      } else {
        c.skip("horo.matches_busemann", name, "escaping points are not tied to a ray");
      }
      eikonal_field_checks(c, name, f, make);
    });
  }
}

void dl_suite(Ctx& c) {
  if (c.cfg.dls.empty()) {
    c.skip("dl.closed_form", "dl-functions", "no dl-functions configured");
    return;
  }
  for (const auto& [id, obj] : c.cfg.dls) {
    const std::string name = "dl " + id;
    c.guard({"field.viscosity", "dl.closed_form"}, name, [&] {
      const double tol_c = c.cfg.cauchy_tol(c.chart);
      auto make = [&](const MetricChart& ch) {
        return dl_field(ch, c.cfg.dl_sets(ch, id), obj.base, tol_c, c.cfg.busemann_options()).field;
      };
      const ScalarField f = make(c.chart);
      if (const auto cf = dl_closed_form(c.chart, obj)) {
        // circles: keep clear of the kink at the common center
        std::function<bool(Vec2)> keep;
        if (obj.sets[0].kind == SetItem::Kind::Circle) {
          const Vec2 ctr{obj.sets[0].a, obj.sets[0].b};
          const double r = 3.0 * c.h;
          keep = [ctr, r](Vec2 p) { return std::hypot(p.x - ctr.x, p.y - ctr.y) > r; };
        }
        closed_form_record(c, "dl.closed_form", name, f, *cf, keep);
      } else {
        c.skip("dl.closed_form", name, "no closed form for these sets");
      }
      eikonal_field_checks(c, name, f, make);
      c.ray_fields.emplace("dl:" + id, LimitField{f, {}, {}});
    });
  }
}

// ---------------------------------------------------------------- singular

std::optional<Locus> expected_locus(const Ctx& c, const std::string& key) {
  if (key.rfind("dl:", 0) == 0) {
    const DlObject& d = c.cfg.dls.at(key.substr(3));
    bool circles = c.chart.kind() == ChartKind::Euclidean;
    for (const auto& s : d.sets) circles &= s.kind == SetItem::Kind::Circle && near({s.a, s.b}, {d.sets[0].a, d.sets[0].b});
    if (!circles) return std::nullopt;
    const Vec2 ctr{d.sets[0].a, d.sets[0].b};
    return Locus{"circle center", [ctr](Vec2 p) { return std::max(std::abs(p.x - ctr.x), std::abs(p.y - ctr.y)); }};
  }
  const RaySpec& r = c.rays.at(key);
  const bool axial = c.chart.kind() == ChartKind::Cylinder && std::abs(r.direction.x) < 1e-12;
  if (c.chart.kind() == ChartKind::Euclidean || axial) return Locus{"empty", [](Vec2) { return INFINITY; }};
  if (c.chart.kind() == ChartKind::Paraboloid && near(r.base, {0, 0})) {
    const double n = std::hypot(r.direction.x, r.direction.y);
    const Vec2 u{-r.direction.x / n, -r.direction.y / n};
    return Locus{"opposite meridian", [u](Vec2 p) { return segment_distance(p, {0, 0}, u, 1e300); }};
  }
  return std::nullopt;
}

void singular_suite(Ctx& c) {
  const SingularityOptions so{c.cfg.solver.jump_threshold, c.cfg.solver.tol_grad};
  CorayOptions co;
  co.tol_slope = c.cfg.solver.tol_slope;
  co.jump_threshold = so.jump_threshold;
  co.tol_grad = so.tol_grad;
  co.margin_cells = c.cfg.solver.eikonal.margin_cells;
  bool any = false;
  for (const auto& [key, lf] : c.ray_fields) {
    any = true;
    const std::string name = key.rfind("dl:", 0) == 0 ? "dl " + key.substr(3) : "ray " + key;
    c.guard({"singular.location", "singular.coray_branching", "singular.gradient_split"}, name, [&] {
      auto t0 = Clock::now();
      const SingularMask m = singular_set(c.chart, lf.field, so);
      std::vector<std::pair<int, int>> marked;
      for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i)
          if (m.at(i, j)) marked.push_back({i, j});
      const double hx = c.chart.hx(), hy = c.chart.hy();
      if (const auto loc = expected_locus(c, key)) {
        double worst = 0.0;
        for (auto [i, j] : marked) worst = std::max(worst, loc->distance(c.chart.node(i, j)) / std::min(hx, hy));
        const double tol = c.tol("singular.location");
        c.verdict("singular.location", name, worst <= tol + 1e-9, marked.empty() ? 0.0 : worst, tol,
                  std::to_string(marked.size()) + " marked cells, expected locus: " + loc->name, t0);
      } else {
        c.add("singular.location", name, Outcome::Info, static_cast<double>(marked.size()), 0,
              "marked cells; no expected locus for this field", t0);
      }
      // Two validated corays from each checked singular cell. Fields with a
      // point-like kink (dl of circles) have no corays leaving the kink itself.
      t0 = Clock::now();
      const bool has_corays = key.rfind("dl:", 0) != 0;
      if (marked.empty() || !has_corays) {
        c.skip("singular.coray_branching", name, marked.empty() ? "no singular cells" : "field is not a Busemann function");
      } else {
        const std::size_t want = std::min<std::size_t>(marked.size(), std::max(1, c.cfg.solver.singular_checks));
        std::size_t good = 0;
        std::string first_bad;
        const double horizon = c.rays.at(key).horizon;
        for (std::size_t k = 0; k < want; ++k) {
          const auto [i, j] = marked[k * marked.size() / want];
          const Vec2 p = c.chart.node(i, j);
          // Same neighbourhood as the 5x5 confirmation block of the mask.
          const Superdifferential sd = superdifferential(c.chart, lf.field, p, 2.0 * std::sqrt(2.0) * c.h, so);
          std::size_t ok = 0;
          for (const auto& cl : sd.clusters) {
            try {
              trace_coray_from(c.chart, lf.field, p, cl.representative, horizon, c.cfg.solver.dt, co);
              ++ok;
            } catch (const Error& e) {
              if (first_bad.empty()) first_bad = "(" + fmt("%.3f", p.x) + ", " + fmt("%.3f", p.y) + "): " + e.what();
            }
          }
          if (ok >= 2) ++good;
          else if (first_bad.empty())
            first_bad = "(" + fmt("%.3f", p.x) + ", " + fmt("%.3f", p.y) + "): " + std::to_string(sd.clusters.size()) + " clusters";
        }
        const double frac = static_cast<double>(good) / want;
        c.verdict("singular.coray_branching", name, frac >= c.tol("singular.coray_branching"), frac,
                  c.tol("singular.coray_branching"),
                  std::to_string(good) + "/" + std::to_string(want) + " cells" + (first_bad.empty() ? "" : ", first miss " + first_bad), t0);
      }
      // Converse inclusion on a seeded sample of unmarked cells away from the mask.
      t0 = Clock::now();
      std::mt19937 rng(c.cfg.solver.seed);
      std::vector<std::pair<int, int>> cand;
      for_valid(lf.field, [&](int i, int j, Vec2) {
        if (m.at(i, j)) return;
        for (auto [a, b] : marked)
          if (std::abs(a - i) <= 2 && std::abs(b - j) <= 2) return;
        cand.push_back({i, j});
      });
      std::shuffle(cand.begin(), cand.end(), rng);
      cand.resize(std::min<std::size_t>(cand.size(), 200));
      std::sort(cand.begin(), cand.end());
      std::size_t bad = 0;
      for (auto [i, j] : cand) {
        const GradientJump g = gradient_jump(c.chart, lf.field, i, j, 0.5 * so.jump_threshold, so.tol_grad);
        if (g.clusters.size() >= 2 && g.diameter > so.jump_threshold) ++bad;
      }
      c.verdict("singular.gradient_split", name, bad == 0, static_cast<double>(bad), 0,
                std::to_string(cand.size()) + " sampled unmarked cells", t0);
    });
  }
  if (!any)
    for (const char* k : {"singular.location", "singular.coray_branching", "singular.gradient_split"})
      c.skip(k, "fields", "no Busemann or dl fields were produced");
}

// ---------------------------------------------------------------- barrier

void barrier_suite(Ctx& c) {
  static const char* kBarrierClaims[] = {"line.minimizing",        "barrier.nonnegative", "barrier.vanishes_on_line",
                                         "barrier.shift_invariant", "barrier.reversal_invariant", "barrier.foliation",
                                         "barrier.quadratic_bound", "barrier.semiconcavity_sum"};
  if (c.cfg.lines.empty()) {
    for (const char* k : kBarrierClaims) c.skip(k, "lines", "no lines configured");
    return;
  }
  const auto lo = c.line_options();
  bool first = true;
  for (const auto& [id, obj] : c.cfg.lines) {
    (void)obj;
    const std::string name = "line " + id;
    const bool ok = c.guard({"line.minimizing", "barrier.nonnegative", "barrier.vanishes_on_line"}, name, [&] {
      auto t0 = Clock::now();
      LineFields lf = compute_line_fields(c.chart, c.cfg.line(c.chart, id), lo, id);
      GlueOptions go;
      go.margin_cells = c.cfg.solver.eikonal.margin_cells;
      const GlueResult g = glue_line(c.chart, lf.plus_path, lf.minus_path, c.oracle, go);
      c.verdict("line.minimizing", name, g.accepted(), g.defect, g.tolerance, glue_status_name(g.status), t0);
      t0 = Clock::now();
      const BarrierOptions loose{INFINITY, INFINITY, c.cfg.solver.eikonal.margin_cells};
      BarrierField bf = barrier_field(c.chart, lf, loose);
      const double tn = c.tol("barrier.nonnegative"), tl = c.tol("barrier.vanishes_on_line");
      c.verdict("barrier.nonnegative", name, bf.min_value >= -tn, bf.min_value, tn, "min B", t0);
      c.verdict("barrier.vanishes_on_line", name, bf.max_on_line <= tl, bf.max_on_line, tl, "max |B| near the line", t0);
      c.lines.emplace(id, std::move(lf));
      c.barriers.emplace(id, std::move(bf));
    });
    if (!ok) continue;
    const LineFields& lf = c.lines.at(id);
    const BarrierField& bf = c.barriers.at(id);
    // invariance and foliation are costly; the first line carries them
    if (first) {
      first = false;
      c.guard({"barrier.shift_invariant", "barrier.reversal_invariant"}, name, [&] {
        const auto t0 = Clock::now();
        InvarianceOptions inv;
        inv.shifts = c.cfg.solver.shifts;
        for (const auto& v : barrier_invariance(c.chart, lf, bf, lo, inv)) {
          const bool rev = v.check == "barrier_reversal";
          c.verdict(rev ? "barrier.reversal_invariant" : "barrier.shift_invariant",
                    name + (rev ? "" : " " + v.check.substr(v.check.find('('))), v.pass, v.violation, v.tolerance,
                    v.detail, t0);
        }
      });
      c.guard({"barrier.foliation"}, name, [&] {
        const auto t0 = Clock::now();
        ZeroSetOptions zo;
        if (c.cfg.solver.zero_tol) zo.zero_tol = *c.cfg.solver.zero_tol;
        zo.max_checked = c.cfg.solver.foliation_cells;
        zo.dt = c.cfg.solver.dt;
        zo.coray.tol_slope = c.cfg.solver.tol_slope;
        zo.coray.jump_threshold = c.cfg.solver.jump_threshold;
        zo.coray.tol_grad = c.cfg.solver.tol_grad;
        zo.coray.margin_cells = zo.glue.margin_cells = c.cfg.solver.eikonal.margin_cells;
        const ZeroSetResult z = zero_set(c.chart, bf, c.oracle, zo);
        // A zero set that is only a collar of the line is a grid artifact of a
        // one-dimensional G; foliation is asserted only on two-dimensional ones,
        // recognized by keeping 90% of its cells when the threshold is halved.
        const std::size_t valid = bf.field.valid_count();
        std::size_t strict = 0;
        for_valid(bf.field, [&](int i, int j, Vec2) { strict += bf.field.at(i, j) <= 0.5 * z.tol; });
        const bool two_dim = z.marked > 0 && strict >= 0.9 * static_cast<double>(z.marked);
        const std::string detail = std::to_string(z.glued) + "/" + std::to_string(z.checks.size()) + " glued, " +
                                   std::to_string(z.marked) + " of " + std::to_string(valid) + " cells marked";
        if (z.checks.empty())
          c.skip("barrier.foliation", name, "no marked cell off the line");
        else if (two_dim)
          c.verdict("barrier.foliation", name, z.glued_fraction() >= c.tol("barrier.foliation"), z.glued_fraction(),
                    c.tol("barrier.foliation"), detail, t0);
        else
          c.add("barrier.foliation", name, Outcome::Info, z.glued_fraction(), c.tol("barrier.foliation"),
                detail + "; zero set is a collar of the line", t0);
      });
    }
    if (c.cfg.solver.quad_region) {
      c.guard({"barrier.quadratic_bound"}, name, [&] {
        const auto t0 = Clock::now();
        const Rect reg = *c.cfg.solver.quad_region;
        const QuadBound q = quad_bound_constant(c.chart, bf, reg, 2.0, c.cfg.solver.eikonal);
        const auto bx = barrier_closed_form(c.chart, lf.line);
        const auto dx = line_distance_closed_form(c.chart, lf.line);
        std::string detail = "C = " + fmt("%.4g", q.constant) + " at (" + fmt("%.3f", q.argmax.x) + ", " +
                             fmt("%.3f", q.argmax.y) + "), " + std::to_string(q.counted) + " cells";
        if (bx && dx) {
          double exact = 0.0;
          for (int j = 0; j < c.chart.ny(); ++j)
            for (int i = 0; i < c.chart.nx(); ++i) {
              const Vec2 p = c.chart.node(i, j);
              const double d = (*dx)(p);
              if (inside(reg, p) && d >= 2.0 * c.h) exact = std::max(exact, (*bx)(p) / (d * d));
            }
          const double tol = c.tol("barrier.quadratic_bound");
          c.verdict("barrier.quadratic_bound", name, std::abs(q.constant - exact) <= tol, q.constant, tol,
                    detail + ", exact " + fmt("%.4g", exact), t0);
        } else {
          c.add("barrier.quadratic_bound", name, std::isfinite(q.constant) ? Outcome::Info : Outcome::Fail, q.constant,
                0, detail + ", no closed form", t0);
        }
      });
    }
    c.guard({"barrier.semiconcavity_sum"}, name, [&] {
      const auto t0 = Clock::now();
      const Rect reg = c.region();
      const double cb = semiconcavity_constant(c.chart, bf.field, reg).constant;
      const double cp = semiconcavity_constant(c.chart, lf.plus.field, reg).constant;
      const double cm = semiconcavity_constant(c.chart, lf.minus.field, reg).constant;
      const double tol = c.tol("barrier.semiconcavity_sum");
      c.verdict("barrier.semiconcavity_sum", name, cb <= cp + cm + tol, cb - cp - cm, tol,
                "C(B) = " + fmt("%.4g", cb) + ", C(b+) = " + fmt("%.4g", cp) + ", C(b-) = " + fmt("%.4g", cm), t0);
    });
  }
  if (!c.cfg.solver.quad_region) c.skip("barrier.quadratic_bound", "lines", "no quad_region configured");
  if (c.barriers.empty()) {
    for (const char* k : {"barrier.shift_invariant", "barrier.reversal_invariant", "barrier.foliation"})
      c.skip(k, "lines", "no barrier field was produced");
  }
}

// ---------------------------------------------------------------- relations

void relation_suite(Ctx& c) {
  static const char* kRel[] = {"relation.barrier_monotone", "relation.transitive", "relation.equivalence_routes",
                               "relation.barrier_difference", "relation.pseudo_distance", "relation.classes"};
  std::vector<std::string> ids;
  for (const auto& [id, lf] : c.lines) ids.push_back(id);
  const std::size_t n = ids.size();
  if (n < 2) {
    for (const char* k : kRel) c.skip(k, "lines", "fewer than two barrier fields");
  } else {
    RelationOptions ro;
    if (c.cfg.solver.zero_tol) ro.zero_tol = *c.cfg.solver.zero_tol;
    ro.tol_slope = c.cfg.solver.tol_slope;
    ro.margin_cells = c.cfg.solver.eikonal.margin_cells;
    auto t0 = Clock::now();
    // P[a][b]: a precedes b; nullopt where undecidable
    std::vector<std::vector<std::optional<bool>>> P(n, std::vector<std::optional<bool>>(n));
    std::size_t errors = 0;
    std::string first_error;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        try {
          P[a][b] = precedes(c.chart, c.lines.at(ids[a]), c.lines.at(ids[b]), c.barriers.at(ids[b]), ro).holds;
        } catch (const Error& e) {
          ++errors;
          if (first_error.empty()) first_error = ids[a] + " vs " + ids[b] + ": " + e.what();
        }
      }
    const double pt = seconds_since(t0);
    auto report_errors = [&](const std::string& claim) {
      if (errors)
        c.add(claim, "precedes", Outcome::Error, static_cast<double>(errors), 0,
              std::to_string(errors) + " undecided pairs, first " + first_error, t0);
    };
    // monotonicity of barriers along precedence
    {
      const double tol = c.tol("relation.barrier_monotone");
      double worst = -INFINITY;
      std::size_t pairs = 0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          if (a == b || !P[a][b].value_or(false)) continue;
          ++pairs;
          const ScalarField& Bb = c.barriers.at(ids[b]).field;
          const ScalarField& Ba = c.barriers.at(ids[a]).field;
          for_valid(Bb, [&](int i, int j, Vec2) {
            if (Ba.valid(i, j)) worst = std::max(worst, Bb.at(i, j) - Ba.at(i, j));
          });
        }
      if (pairs == 0)
        c.skip("relation.barrier_monotone", "family", "no preceding pair");
      else
        c.verdict("relation.barrier_monotone", "family", worst <= tol, worst, tol,
                  std::to_string(pairs) + " preceding pairs", t0);
      report_errors("relation.barrier_monotone");
    }
    {
      std::size_t bad = 0, triples = 0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t d = 0; d < n; ++d)
            if (P[b][a].value_or(false) && P[d][b].value_or(false) && P[d][a].has_value()) {
              ++triples;
              if (!*P[d][a]) ++bad;
            }
      c.rep.records.push_back({"relation.transitive", "family", c.chart_id, c.res,
                               bad == 0 ? Outcome::Pass : Outcome::Fail, static_cast<double>(bad), 0, pt,
                               std::to_string(triples) + " chained triples over " + std::to_string(n) + " lines"});
      report_errors("relation.transitive");
    }
    t0 = Clock::now();
    std::vector<std::vector<bool>> E(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a) E[a][a] = true;
    std::size_t disagree = 0, decided = 0, eq_errors = 0;
    std::string eq_first;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        try {
          const RelationVerdict v = equivalent(c.chart, c.lines.at(ids[a]), c.barriers.at(ids[a]), c.lines.at(ids[b]),
                                               c.barriers.at(ids[b]), ro);
          ++decided;
          E[a][b] = E[b][a] = v.holds;
          if (!v.routes_agree) ++disagree;
        } catch (const Error& e) {
          ++eq_errors;
          if (eq_first.empty()) eq_first = ids[a] + " vs " + ids[b] + ": " + e.what();
        }
      }
    if (decided)
      c.verdict("relation.equivalence_routes", "family", disagree == 0, static_cast<double>(disagree), 0,
                std::to_string(decided) + " pairs decided", t0);
    if (eq_errors)
      c.add("relation.equivalence_routes", "family", Outcome::Error, static_cast<double>(eq_errors), 0,
            std::to_string(eq_errors) + " undecided pairs, first " + eq_first, t0);
    // equivalence among lines preceding a common reference
    t0 = Clock::now();
    {
      const double tol = c.tol("relation.barrier_difference");
      std::size_t bad = 0, tested = 0, pd_bad = 0, pd_tested = 0;
      std::string pd_first;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = a + 1; b < n; ++b) {
            if (!P[a][r].value_or(false) || !P[b][r].value_or(false)) continue;
            const auto osc = difference_oscillation(c.barriers.at(ids[a]).field, c.barriers.at(ids[b]).field);
            if (!osc) continue;
            ++tested;
            if ((*osc <= tol) != E[a][b]) ++bad;
            try {
              const PseudoDistance pd = pseudo_distance(c.chart, c.lines.at(ids[a]), c.barriers.at(ids[a]),
                                                        c.lines.at(ids[b]), c.barriers.at(ids[b]),
                                                        c.lines.at(ids[r]).plus.field, E[a][b]);
              ++pd_tested;
              if (!pd.consistent) {
                ++pd_bad;
                if (pd_first.empty())
                  pd_first = ids[a] + ", " + ids[b] + " under " + ids[r] + ": " + fmt("%.4g", pd.value);
              }
            } catch (const Error& e) {
              ++pd_bad;
              if (pd_first.empty()) pd_first = ids[a] + ", " + ids[b] + ": " + e.what();
            }
          }
      if (tested)
        c.verdict("relation.barrier_difference", "family", bad == 0, static_cast<double>(bad), tol,
                  std::to_string(tested) + " pairs with a common reference", t0);
      else
        c.skip("relation.barrier_difference", "family", "no pair of lines precedes a common reference");
      if (pd_tested || pd_bad)
        c.verdict("relation.pseudo_distance", "family", pd_bad == 0, static_cast<double>(pd_bad), tol,
                  std::to_string(pd_tested) + " pairs" + (pd_first.empty() ? "" : ", first inconsistent " + pd_first), t0);
      else
        c.skip("relation.pseudo_distance", "family", "no pair of lines precedes a common reference");
    }
    std::ostringstream cls;
    const auto classes = classify(E);
    for (std::size_t k = 0; k < classes.size(); ++k) {
      cls << (k ? " | " : "");
      for (std::size_t m = 0; m < classes[k].size(); ++m) cls << (m ? " " : "") << ids[classes[k][m]];
    }
    c.add("relation.classes", "family", Outcome::Info, static_cast<double>(classes.size()), 0, cls.str(), Clock::now());
  }

  // ray pairs sharing a base, including the halves of each line
  struct Pair {
    std::string name;
    RaySpec r1, r2;
    const ScalarField* b1;
    const ScalarField* b2;
  };
  std::vector<Pair> pairs;
  for (auto a = c.ray_fields.begin(); a != c.ray_fields.end(); ++a) {
    if (!c.rays.count(a->first)) continue;
    for (auto b = std::next(a); b != c.ray_fields.end(); ++b)
      if (c.rays.count(b->first) && near(c.rays.at(a->first).base, c.rays.at(b->first).base))
        pairs.push_back({"rays " + a->first + "+" + b->first, c.rays.at(a->first), c.rays.at(b->first),
                         &a->second.field, &b->second.field});
  }
  for (const auto& [id, lf] : c.lines)
    pairs.push_back({"line " + id + " halves", lf.line.plus, lf.line.minus, &lf.plus.field, &lf.minus.field});
  if (pairs.empty()) c.skip("line.sum_test", "rays", "no ray pair shares a base point");
  for (const auto& p : pairs) {
    c.guard({"line.sum_test"}, p.name, [&] {
      const auto t0 = Clock::now();
      GlueOptions go;
      go.margin_cells = c.cfg.solver.eikonal.margin_cells;
      const LineSumResult r = line_sum_test(c.chart, p.r1, p.r2, *p.b1, *p.b2, c.oracle, c.cfg.solver.dt, go);
      c.verdict("line.sum_test", p.name, r.agree, r.field_test.violation, r.field_test.tolerance,
                std::string("sum test ") + (r.field_test.pass ? "line" : "not a line") + ", glue " +
                    glue_status_name(r.glue.status),
                t0);
    });
  }
}

// ---------------------------------------------------------------- comparison

void comparison_suite(Ctx& c) {
  CorayOptions co;
  co.tol_slope = c.cfg.solver.tol_slope;
  co.jump_threshold = c.cfg.solver.jump_threshold;
  co.tol_grad = c.cfg.solver.tol_grad;
  co.margin_cells = c.cfg.solver.eikonal.margin_cells;
  const int margin = c.cfg.solver.eikonal.margin_cells + 2;
  bool any = false;
  for (const auto& [id, r] : c.rays) {
    const LimitField& lf = c.ray_fields.at(id);
    std::vector<std::pair<int, int>> cand;
    for_valid(lf.field, [&](int i, int j, Vec2) {
      const bool roomy = (c.chart.periodic_x() || (i >= margin && i < c.chart.nx() - margin)) && j >= margin &&
                         j < c.chart.ny() - margin;
      if (roomy) cand.push_back({i, j});
    });
    std::mt19937 rng(c.cfg.solver.seed + 17);
    std::shuffle(cand.begin(), cand.end(), rng);
    int done = 0;
    for (std::size_t k = 0; k < cand.size() && done < 3 && k < 24; ++k) {
      const Vec2 start = c.chart.node(cand[k].first, cand[k].second);
      const std::string name = "ray " + id + " coray from (" + fmt("%.3f", start.x) + ", " + fmt("%.3f", start.y) + ")";
      CorayTrace tr;
      try {
        tr = trace_coray(c.chart, lf.field, start, r.horizon, c.cfg.solver.dt, co);
      } catch (const Error&) {
        continue;  // not a validated coray; only validated ones enter the comparison
      }
      const std::size_t ext = confident_extent(c.chart, tr.path, c.cfg.solver.eikonal.margin_cells);
      if (ext < 2) continue;
      const double T = tr.path.t_at(ext - 1);
      const auto base_sched = c.cfg.schedule(c.chart);
      const double scale = T / base_sched.t_values.back();
      if (scale < 0.25) continue;
      ++done;
      any = true;
      c.guard({"coray.comparison"}, name, [&] {
        const auto t0 = Clock::now();
        TruncationSchedule s = base_sched;
        for (double& t : s.t_values) t *= std::min(1.0, scale);
        const RaySpec coray{start, tr.path.states.front().v, T};
        const LimitField bc = busemann_field(c.chart, coray, s, c.cfg.busemann_options());
        const VerdictReport v = lemma41_check(c.chart, coray, lf.field, bc.field);
        c.verdict("coray.comparison", name, v.pass, v.violation, v.tolerance, v.detail, t0);
      });
    }
  }
  if (!any) c.skip("coray.comparison", "rays", "no validated coray with room for a Busemann field");
}

// ---------------------------------------------------------------- injector

void injector_suite(Ctx& c) {
  if (c.eikonal_fields.empty()) return;
  const auto& [name, f] = c.eikonal_fields.front();
  const ScalarField bad = corrupt_field(f);
  residual_record(c, "field.viscosity", "corrupted " + name, bad);
  lipschitz_record(c, "corrupted " + name, bad);
}

}  // namespace

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "PASS";
    case Outcome::Fail: return "FAIL";
    case Outcome::Error: return "ERROR";
    case Outcome::Info: return "INFO";
    case Outcome::Skip: return "SKIP";
  }
  return "?";
}

const std::vector<Claim>& claim_registry() {
  static const std::vector<Claim> reg(std::begin(kClaims), std::end(kClaims));
  return reg;
}

const Claim& find_claim(const std::string& id) {
  for (const auto& c : claim_registry())
    if (c.id == id) return c;
  throw Error(ErrorCode::Precondition, "unknown claim id '" + id + "'");
}

std::size_t SuiteReport::count(Outcome o) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [o](const CheckRecord& r) { return r.outcome == o; }));
}

std::vector<std::string> SuiteReport::missing_claims() const {
  std::vector<std::string> out;
  for (const auto& c : claim_registry())
    if (std::none_of(records.begin(), records.end(), [&](const CheckRecord& r) { return r.claim == c.id; }))
      out.push_back(c.id);
  return out;
}

bool SuiteReport::pass() const {
  return count(Outcome::Fail) == 0 && count(Outcome::Error) == 0 && missing_claims().empty();
}

void SuiteReport::write_text(std::ostream& os, bool with_runtime) const {
  for (const auto& r : records) {
    os << outcome_name(r.outcome) << "  " << r.claim << "  [" << r.check << "]  chart=" << r.chart
       << " res=" << r.resolution << " measured=" << fmt("%.6g", r.measured) << " tol=" << fmt("%.6g", r.tolerance);
    if (with_runtime) os << " runtime=" << fmt("%.3f", r.runtime) << "s";
    if (!r.detail.empty()) os << "  " << r.detail;
    os << "\n";
  }
  os << "summary: " << count(Outcome::Pass) << " pass, " << count(Outcome::Fail) << " fail, " << count(Outcome::Error)
     << " error, " << count(Outcome::Info) << " info, " << count(Outcome::Skip) << " skip; overall "
     << (pass() ? "PASS" : "FAIL") << "\n";
}

namespace {
std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}
}  // namespace

void SuiteReport::write_csv(std::ostream& os, bool with_runtime) const {
  os << "claim,statement,check,chart,resolution,outcome,measured,tolerance,policy";
  if (with_runtime) os << ",runtime_s";
  os << ",detail\n";
  for (const auto& r : records) {
    const Claim& c = find_claim(r.claim);
    os << r.claim << "," << csv_quote(c.statement) << "," << csv_quote(r.check) << "," << csv_quote(r.chart) << ","
       << r.resolution << "," << outcome_name(r.outcome) << "," << fmt("%.17g", r.measured) << ","
       << fmt("%.17g", r.tolerance) << "," << csv_quote(c.policy.text);
    if (with_runtime) os << "," << fmt("%.3f", r.runtime);
    os << "," << csv_quote(r.detail) << "\n";
  }
}

std::string SuiteReport::text(bool with_runtime) const {
  std::ostringstream os;
  write_text(os, with_runtime);
  return os.str();
}

std::string SuiteReport::csv(bool with_runtime) const {
  std::ostringstream os;
  write_csv(os, with_runtime);
  return os.str();
}

ScalarField corrupt_field(const ScalarField& field, double amplitude) {
  ScalarField out = field;
  for (int j = 1; j + 1 < out.ny(); ++j)
    for (int i = 1; i + 1 < out.nx(); ++i)
      if (out.valid(i, j) && (i + j) % 2 == 0) out.at(i, j) += amplitude;
  return out;
}

VerdictReport lipschitz_check(const MetricChart& chart, const ScalarField& field, int anchors, unsigned seed,
                              double tol, const EikonalOptions& eikonal) {
  std::vector<std::pair<int, int>> nodes;
  for_valid(field, [&](int i, int j, Vec2) { nodes.push_back({i, j}); });
  if (nodes.empty()) throw Error(ErrorCode::Data, "lipschitz_check: field has no valid cells");
  std::mt19937 rng(seed);
  std::shuffle(nodes.begin(), nodes.end(), rng);
  VerdictReport v;
  v.check = "lipschitz";
  v.tolerance = tol;
  double worst = -INFINITY;
  std::size_t pairs = 0;
  for (int a = 0; a < anchors && a < static_cast<int>(nodes.size()); ++a) {
    const auto [pi, pj] = nodes[static_cast<std::size_t>(a)];
    const ScalarField d = solve_distance(chart, SourceSet::point(field.node(pi, pj)), eikonal);
    const double up = field.at(pi, pj);
    for_valid(field, [&](int i, int j, Vec2) {
      if (!d.valid(i, j) || (i == pi && j == pj)) return;
      worst = std::max(worst, std::abs(field.at(i, j) - up) - d.at(i, j));
      ++pairs;
    });
    // the anchor's immediate neighbours see a point-source collar; compare
    // them against the local metric length as well
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int i = pi + di, j = pj + dj;
        if ((!di && !dj) || i < 0 || j < 0 || i >= field.nx() || j >= field.ny() || !field.valid(i, j)) continue;
        const Vec2 e{di * chart.hx(), dj * chart.hy()};
        const double len = chart.gnorm(field.node(pi, pj), e);
        worst = std::max(worst, std::abs(field.at(i, j) - up) - len);
      }
  }
  v.violation = std::max(0.0, worst);
  v.pass = worst <= tol;
  v.detail = std::to_string(pairs) + " pairs from " + std::to_string(anchors) + " anchors";
  return v;
}

SuiteReport run_suite(const ExperimentConfig& config) {
  SuiteReport rep;
  Ctx c(config, rep);
  auto run = [&](const char* suite, const std::function<void()>& body) {
    if (enabled(config, suite)) {
      body();
    } else {
      for (const auto& cl : claim_registry())
        if (cl.suite == suite) c.skip(cl.id, suite, "suite disabled");
    }
  };
  run("distance", [&] {
    metric_suite(c);
    distance_suite(c);
  });
  run("busemann", [&] { busemann_suite(c); });
  run("horo", [&] { horo_suite(c); });
  run("dl", [&] { dl_suite(c); });
  run("singular", [&] { singular_suite(c); });
  run("barrier", [&] { barrier_suite(c); });
  run("relations", [&] { relation_suite(c); });
  run("comparison", [&] { comparison_suite(c); });
  if (config.solver.corrupt) injector_suite(c);
  const auto missing = rep.missing_claims();
  std::vector<std::string> really;
  for (const auto& m : missing)
    if (m != "report.complete") really.push_back(m);
  std::string detail;
  for (const auto& m : really) detail += (detail.empty() ? "missing: " : ", ") + m;
  rep.records.push_back({"report.complete", "registry", c.chart_id, c.res, really.empty() ? Outcome::Pass : Outcome::Fail,
                         static_cast<double>(really.size()), 0, 0.0, detail});
  return rep;
}

}  // namespace busekit
