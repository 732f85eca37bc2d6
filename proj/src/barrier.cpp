#include "busekit/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace busekit {

namespace {

double zero_tol_or_default(const MetricChart& chart, double tol) { return tol > 0.0 ? tol : 4.0 * chart.h(); }

// Half-open state range around the joint of a joined line path where every
// point is in the confident region and `f` is valid.
std::pair<std::size_t, std::size_t> usable_range(const MetricChart& chart, const GeodesicPath& path,
                                                 std::size_t joint, const ScalarField& f, int margin) {
  const Rect& d = chart.domain();
  const double mx = margin * chart.hx(), my = margin * chart.hy();
  auto ok = [&](std::size_t k) {
    const Vec2 p = path.states[k].p;
    if (p.y < d.y_min + my || p.y > d.y_max - my) return false;
    if (!chart.periodic_x() && (p.x < d.x_min + mx || p.x > d.x_max - mx)) return false;
    return f.valid_at(p);
  };
  if (joint >= path.size() || !ok(joint)) return {joint, joint};
  std::size_t lo = joint, hi = joint + 1;
  while (lo > 0 && ok(lo - 1)) --lo;
  while (hi < path.size() && ok(hi)) ++hi;
  return {lo, hi};
}

std::size_t joint_index(const GeodesicPath& line) {
  return static_cast<std::size_t>(std::lround(-line.t0 / line.dt));
}

// Worst |slope + 1| of f over windows along states [first, last) of `path`.
double windowed_slope_defect(const ScalarField& f, const GeodesicPath& path, std::size_t first, std::size_t last,
                             std::size_t stride, int window_steps, int windows) {
  const std::size_t span = stride * static_cast<std::size_t>(window_steps);
  if (last <= first || last - first <= span) {
    throw Error(ErrorCode::Coverage, "relation test: candidate half too short inside the valid region");
  }
  double worst = 0.0;
  const std::size_t room = last - first - span - 1;
  for (int w = 0; w < windows; ++w) {
    const std::size_t s = first + (windows > 1 ? room * static_cast<std::size_t>(w) / (windows - 1) : 0);
    double st = 0, sb = 0, stt = 0, stb = 0;
    int n = 0;
    for (int k = 0; k <= window_steps; ++k) {
      const std::size_t idx = s + static_cast<std::size_t>(k) * stride;
      const auto b = f.sample(path.states[idx].p);
      if (!b) continue;
      const double t = path.t_at(idx);
      st += t;
      sb += *b;
      stt += t * t;
      stb += t * *b;
      ++n;
    }
    if (n < 3) throw Error(ErrorCode::Coverage, "relation test: window leaves the valid region");
    const double slope = (stb - st * sb / n) / (stt - st * st / n);
    worst = std::max(worst, std::abs(slope + 1.0));
  }
  return worst;
}

// Splits path points into polylines at periodic seams.
SourceSet path_source(const MetricChart& chart, const GeodesicPath& path) {
  SourceSet s;
  std::vector<Vec2> cur;
  for (const auto& st : path.states) {
    if (!cur.empty() && std::abs(st.p.x - cur.back().x) > 0.5 * chart.period()) {
      s.polylines.push_back(Polyline{std::move(cur)});
      cur.clear();
    }
    cur.push_back(st.p);
  }
  if (!cur.empty()) s.polylines.push_back(Polyline{std::move(cur)});
  s.description = "line path";
  return s;
}

}  // namespace

LineFields compute_line_fields(const MetricChart& chart, const LineSpec& line, const LineFieldOptions& options,
                               std::string id) {
  line.validate(chart);
  LineFields lf;
  lf.id = std::move(id);
  lf.line = line;
  const double dt = options.busemann.dt;
  lf.plus_path = integrate_ray(chart, line.plus, dt);
  lf.minus_path = integrate_ray(chart, line.minus, dt);
  lf.plus = busemann_field(chart, line.plus, options.schedule, options.busemann);
  lf.minus = busemann_field(chart, line.minus, options.schedule, options.busemann);
  return lf;
}

GeodesicPath join_halves(const GeodesicPath& plus, const GeodesicPath& minus) {
  GeodesicPath line;
  line.dt = plus.dt;
  line.t0 = -minus.t_end();
  line.truncated = plus.truncated || minus.truncated;
  for (std::size_t k = minus.size(); k-- > 1;) line.states.push_back({minus.states[k].p, -minus.states[k].v});
  line.states.insert(line.states.end(), plus.states.begin(), plus.states.end());
  return line;
}

std::vector<std::uint8_t> near_path_mask(const MetricChart& chart, const GeodesicPath& path, double radius_cells) {
  const int nx = chart.nx(), ny = chart.ny();
  std::vector<std::uint8_t> m(static_cast<std::size_t>(nx) * ny, 0);
  const double rx = radius_cells * chart.hx(), ry = radius_cells * chart.hy();
  const Rect& d = chart.domain();
  for (const auto& s : path.states) {
    const int i0 = static_cast<int>(std::floor((s.p.x - rx - d.x_min) / chart.hx() - 1e-9));
    const int i1 = static_cast<int>(std::ceil((s.p.x + rx - d.x_min) / chart.hx() + 1e-9));
    const int j0 = std::max(0, static_cast<int>(std::floor((s.p.y - ry - d.y_min) / chart.hy() - 1e-9)));
    const int j1 = std::min(ny - 1, static_cast<int>(std::ceil((s.p.y + ry - d.y_min) / chart.hy() + 1e-9)));
    for (int j = j0; j <= j1; ++j) {
      for (int ii = i0; ii <= i1; ++ii) {
        int i = ii;
        if (chart.periodic_x()) i = ((ii % nx) + nx) % nx;
        else if (i < 0 || i >= nx) continue;
        const Vec2 dd = chart.displacement(s.p, chart.node(i, j));
        if (std::abs(dd.x) <= rx + 1e-12 && std::abs(dd.y) <= ry + 1e-12)
          m[static_cast<std::size_t>(j) * nx + i] = 1;
      }
    }
  }
  return m;
}

BarrierField barrier_field(const MetricChart& chart, const LineFields& lf, const BarrierOptions& options) {
  BarrierField bf;
  bf.line = lf.line;
  bf.b_plus = lf.plus.field;
  bf.b_minus = lf.minus.field;
  bf.field = combine(lf.plus.field, lf.minus.field, 1.0, FieldTag::Barrier);
  bf.field.set_source("barrier " + (lf.id.empty() ? std::string("line") : lf.id));
  bf.path = join_halves(lf.plus_path, lf.minus_path);
  if (bf.field.valid_count() == 0) throw Error(ErrorCode::Coverage, "barrier_field: Busemann fields share no valid cell");
  bf.min_value = bf.field.min_valid();
  const auto near = near_path_mask(chart, bf.path, 1.0);
  bf.max_on_line = 0.0;
  for (std::size_t k = 0; k < near.size(); ++k)
    if (near[k] && bf.field.mask()[k]) bf.max_on_line = std::max(bf.max_on_line, std::abs(bf.field.values()[k]));
  const double h = chart.h();
  if (bf.min_value < -options.nonneg_tol_cells * h) {
    std::ostringstream os;
    os << "barrier_field: nonnegativity of the barrier fails, min B = " << bf.min_value;
    throw Error(ErrorCode::Inconsistency, os.str(), -bf.min_value);
  }
  if (bf.max_on_line > options.on_line_tol_cells * h) {
    std::ostringstream os;
    os << "barrier_field: barrier does not vanish on its line, max |B| = " << bf.max_on_line;
    throw Error(ErrorCode::Inconsistency, os.str(), bf.max_on_line);
  }
  return bf;
}

LineSpec shifted_line(const MetricChart& chart, const LineSpec& line, double tau, double dt) {
  if (tau == 0.0) return line;
  const RaySpec& half = tau > 0 ? line.plus : line.minus;
  const double a = std::abs(tau);
  const double step = std::min(dt, a);
  const GeodesicPath p = integrate_geodesic(chart, half.base, half.direction, a, step);
  const auto s = p.at(chart, a);
  if (!s || p.t_end() + 1e-9 < a) throw Error(ErrorCode::Schedule, "shifted_line: shift leaves the chart");
  const Vec2 v = tau > 0 ? s->v : -s->v;
  return LineSpec::through(chart, s->p, v, line.plus.horizon);
}

std::vector<VerdictReport> barrier_invariance(const MetricChart& chart, const LineFields& lf,
                                              const BarrierField& reference, const LineFieldOptions& options,
                                              const InvarianceOptions& inv) {
  std::vector<VerdictReport> out;
  const double tol = inv.tol_cells * chart.h();
  auto compare = [&](const std::string& name, const LineSpec& other) {
    VerdictReport v;
    v.check = name;
    v.tolerance = tol;
    try {
      const LineFields of = compute_line_fields(chart, other, options, name);
      const BarrierField ob = barrier_field(chart, of);
      double worst = 0.0;
      std::size_t common = 0;
      for (std::size_t k = 0; k < ob.field.values().size(); ++k) {
        if (!ob.field.mask()[k] || !reference.field.mask()[k]) continue;
        worst = std::max(worst, std::abs(ob.field.values()[k] - reference.field.values()[k]));
        ++common;
      }
      v.violation = worst;
      v.pass = common > 0 && worst <= tol;
      v.detail = std::to_string(common) + " common cells";
    } catch (const Error& e) {
      v.pass = false;
      v.violation = e.defect();
      v.detail = std::string(error_code_name(e.code())) + ": " + e.what();
    }
    out.push_back(v);
  };
  for (double tau : inv.shifts) {
    char name[64];
    std::snprintf(name, sizeof name, "barrier_shift(%+g)", tau);
    compare(name, shifted_line(chart, lf.line, tau, options.busemann.dt));
  }
  if (inv.reversal) compare("barrier_reversal", lf.line.reversed());
  return out;
}

ZeroSetResult zero_set(const MetricChart& chart, const BarrierField& bf, DistanceOracle& oracle,
                       const ZeroSetOptions& options) {
  ZeroSetResult res;
  res.tol = zero_tol_or_default(chart, options.zero_tol);
  const ScalarField& B = bf.field;
  res.mask.assign(B.values().size(), 0);
  const auto near = near_path_mask(chart, bf.path, 1.0);
  // foliation candidates keep room for the glue test's sample pairs
  const Rect& dom = chart.domain();
  const int room = options.glue.margin_cells + 2;
  auto roomy = [&](Vec2 p) {
    if (p.y < dom.y_min + room * chart.hy() || p.y > dom.y_max - room * chart.hy()) return false;
    return chart.periodic_x() || (p.x >= dom.x_min + room * chart.hx() && p.x <= dom.x_max - room * chart.hx());
  };
  std::vector<std::size_t> off_line;
  for (std::size_t k = 0; k < B.values().size(); ++k) {
    if (!B.mask()[k] || B.values()[k] > res.tol) continue;
    res.mask[k] = 1;
    ++res.marked;
    if (near[k]) continue;
    ++res.marked_off_line;
    const int i = static_cast<int>(k % static_cast<std::size_t>(B.nx()));
    const int j = static_cast<int>(k / static_cast<std::size_t>(B.nx()));
    if (roomy(B.node(i, j))) off_line.push_back(k);
  }
  const std::size_t n_check = std::min<std::size_t>(off_line.size(), static_cast<std::size_t>(std::max(0, options.max_checked)));
  const double horizon = options.trace_horizon > 0 ? options.trace_horizon : bf.line.plus.horizon;
  for (std::size_t c = 0; c < n_check; ++c) {
    const std::size_t k = off_line[(c * off_line.size()) / n_check + off_line.size() / (2 * n_check)];
    const int i = static_cast<int>(k % static_cast<std::size_t>(B.nx()));
    const int j = static_cast<int>(k / static_cast<std::size_t>(B.nx()));
    FoliationCheck fc;
    fc.cell = B.node(i, j);
    try {
      const CorayTrace tp = trace_coray(chart, bf.b_plus, fc.cell, horizon, options.dt, options.coray,
                                        bf.line.plus.direction);
      const CorayTrace tm = trace_coray(chart, bf.b_minus, fc.cell, horizon, options.dt, options.coray,
                                        bf.line.minus.direction);
      const Vec2 vp = tp.path.states.front().v, vm = tm.path.states.front().v;
      const double opp = chart.gnorm(fc.cell, vp + vm);
      res.max_opposite_defect = std::max(res.max_opposite_defect, opp);
      if (opp > options.tol_opposite) {
        fc.reason = "coray directions not opposite";
        fc.defect = opp;
      } else {
        Vec2 w = (vp - vm) * 0.5;
        w = w / chart.gnorm(fc.cell, w);
        const GeodesicPath gp = integrate_geodesic(chart, fc.cell, w, horizon, options.dt);
        const GeodesicPath gm = integrate_geodesic(chart, fc.cell, -w, horizon, options.dt);
        const GlueResult g = glue_line(chart, gp, gm, oracle, options.glue);
        fc.glued = g.accepted();
        fc.defect = g.defect;
        res.max_glue_defect = std::max(res.max_glue_defect, g.defect);
        if (!fc.glued) fc.reason = glue_status_name(g.status);
      }
    } catch (const Error& e) {
      fc.reason = std::string(error_code_name(e.code())) + ": " + e.what();
      fc.defect = e.defect();
    }
    if (fc.glued) ++res.glued;
    res.checks.push_back(fc);
  }
  return res;
}

QuadBound quad_bound_constant(const MetricChart& chart, const BarrierField& bf, const Rect& region,
                              double exclusion_cells, const EikonalOptions& eikonal) {
  const ScalarField d = solve_distance(chart, path_source(chart, bf.path), eikonal);
  const ScalarField& B = bf.field;
  const double excl = exclusion_cells * chart.h();
  QuadBound q;
  double best = -INFINITY;
  for (int j = 0; j < B.ny(); ++j) {
    for (int i = 0; i < B.nx(); ++i) {
      const Vec2 p = B.node(i, j);
      if (!region.contains(p, 1e-9) || !B.valid(i, j) || !d.valid(i, j)) continue;
      const double dist = d.at(i, j);
      if (dist < excl) {
        ++q.excluded;
        continue;
      }
      ++q.counted;
      const double r = B.at(i, j) / (dist * dist);
      if (r > best) {
        best = r;
        q.argmax = p;
      }
    }
  }
  if (q.counted == 0) throw Error(ErrorCode::Data, "quad_bound_constant: region is degenerate, every cell excluded");
  q.constant = std::max(0.0, best);
  return q;
}

const char* relation_name(Relation r) { return r == Relation::Precedes ? "precedes" : "equivalent"; }

std::ostream& operator<<(std::ostream& os, const RelationVerdict& v) {
  char buf[256];
  os << "relation: " << relation_name(v.relation) << "\n";
  os << "candidate: " << v.candidate << "\nreference: " << v.reference << "\n";
  os << "holds: " << (v.holds ? "true" : "false") << "\n";
  if (v.relation == Relation::Precedes) {
    std::snprintf(buf, sizeof buf, "max_barrier: %.6g\nslope_defect_plus: %.6g\nslope_defect_minus: %.6g\n",
                  v.max_barrier, v.slope_defect_plus, v.slope_defect_minus);
  } else {
    std::snprintf(buf, sizeof buf, "oscillation_plus: %.6g\noscillation_minus: %.6g\nmutual_precedes: %s\nroutes_agree: %s\n",
                  v.oscillation_plus, v.oscillation_minus, v.precedes_both ? "true" : "false",
                  v.routes_agree ? "true" : "false");
  }
  os << buf;
  if (!v.detail.empty()) os << "detail: " << v.detail << "\n";
  return os;
}

RelationVerdict precedes(const MetricChart& chart, const LineFields& candidate, const LineFields& reference,
                         const BarrierField& reference_barrier, const RelationOptions& options) {
  RelationVerdict v;
  v.relation = Relation::Precedes;
  v.candidate = candidate.id;
  v.reference = reference.id;
  const double zero_tol = zero_tol_or_default(chart, options.zero_tol);
  const GeodesicPath line = join_halves(candidate.plus_path, candidate.minus_path);
  const std::size_t joint = joint_index(line);
  const auto [lo, hi] = usable_range(chart, line, joint, reference_barrier.field, options.margin_cells);
  if (hi - lo < 3) throw Error(ErrorCode::Coverage, "precedes: candidate path leaves the valid cells at its base");
  const int n = std::max(2, options.samples);
  double max_b = -INFINITY;
  for (int k = 0; k < n; ++k) {
    const std::size_t idx = lo + (hi - 1 - lo) * static_cast<std::size_t>(k) / (n - 1);
    max_b = std::max(max_b, *reference_barrier.field.sample(line.states[idx].p));
  }
  v.max_barrier = max_b;
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(chart.h() / line.dt)));
  const int windows = std::max(1, n / 2);
  // plus half: b_ref+ along candidate+, i.e. states joint..hi of the joined path
  {
    const auto [plo, phi] = usable_range(chart, line, joint, reference.plus.field, options.margin_cells);
    (void)plo;
    v.slope_defect_plus = windowed_slope_defect(reference.plus.field, line, joint, phi, stride,
                                                options.window_steps, windows);
  }
  // minus half traversed forward: reindex as its own path
  {
    const auto [mlo, mhi] = usable_range(chart, candidate.minus_path, 0, reference.minus.field, options.margin_cells);
    v.slope_defect_minus = windowed_slope_defect(reference.minus.field, candidate.minus_path, mlo, mhi, stride,
                                                 options.window_steps, windows);
  }
  v.holds = v.max_barrier <= zero_tol && v.slope_defect_plus <= options.tol_slope &&
            v.slope_defect_minus <= options.tol_slope;
  std::ostringstream os;
  os << "zero_tol=" << zero_tol << " tol_slope=" << options.tol_slope;
  v.detail = os.str();
  return v;
}

RelationVerdict equivalent(const MetricChart& chart, const LineFields& a, const BarrierField& ba, const LineFields& b,
                           const BarrierField& bb, const RelationOptions& options) {
  RelationVerdict v;
  v.relation = Relation::Equivalent;
  v.candidate = a.id;
  v.reference = b.id;
  auto osc = [&](const ScalarField& f, const ScalarField& g) {
    double lo = INFINITY, hi = -INFINITY;
    std::size_t common = 0;
    for (std::size_t k = 0; k < f.values().size(); ++k) {
      if (!f.mask()[k] || !g.mask()[k]) continue;
      const double d = f.values()[k] - g.values()[k];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      ++common;
    }
    if (static_cast<double>(common) < 0.25 * static_cast<double>(f.values().size()))
      throw Error(ErrorCode::Coverage, "equivalent: fields share less than 25% of the chart");
    return hi - lo;
  };
  v.oscillation_plus = osc(a.plus.field, b.plus.field);
  v.oscillation_minus = osc(a.minus.field, b.minus.field);
  const double tol = options.osc_tol_cells * chart.h();
  const bool by_fields = v.oscillation_plus <= tol && v.oscillation_minus <= tol;
  const RelationVerdict ab = precedes(chart, a, b, bb, options);
  const RelationVerdict ba_ = precedes(chart, b, a, ba, options);
  v.precedes_both = ab.holds && ba_.holds;
  v.routes_agree = by_fields == v.precedes_both;
  v.holds = by_fields && v.precedes_both;
  std::ostringstream os;
  os << "osc_tol=" << tol;
  if (!v.routes_agree) os << "; decision routes disagree (fields: " << by_fields << ", mutual precedes: "
                          << v.precedes_both << ")";
  v.detail = os.str();
  return v;
}

LineSumResult line_sum_test(const MetricChart& chart, const RaySpec& r1, const RaySpec& r2, const ScalarField& b1,
                            const ScalarField& b2, DistanceOracle& oracle, double dt, const GlueOptions& glue) {
  if (chart.displacement(r1.base, r2.base).norm() > 1e-9)
    throw Error(ErrorCode::Precondition, "line_sum_test: rays must share a base point");
  LineSumResult res;
  const ScalarField s = combine(b1, b2, 1.0, FieldTag::Generic);
  if (s.valid_count() == 0) throw Error(ErrorCode::Coverage, "line_sum_test: fields share no valid cell");
  const double m = s.min_valid();
  res.field_test.check = "line_sum";
  res.field_test.tolerance = 6.0 * chart.h();
  res.field_test.violation = std::max(0.0, -m);
  res.field_test.pass = m >= -res.field_test.tolerance;
  res.field_test.detail = "min(b1+b2)=" + std::to_string(m);
  const GeodesicPath p1 = integrate_ray(chart, r1, dt);
  const GeodesicPath p2 = integrate_ray(chart, r2, dt);
  res.glue = glue_line(chart, p1, p2, oracle, glue);
  res.agree = res.field_test.pass == res.glue.accepted();
  return res;
}

namespace {

// Point of the joined line path where `f` (sampled) crosses zero, closest to the joint.
Vec2 zero_crossing(const MetricChart& chart, const GeodesicPath& line, const ScalarField& f) {
  const std::size_t joint = joint_index(line);
  std::optional<Vec2> best;
  std::size_t best_dist = 0;
  for (std::size_t k = 0; k + 1 < line.size(); ++k) {
    const auto a = f.sample(line.states[k].p);
    const auto b = f.sample(line.states[k + 1].p);
    if (!a || !b) continue;
    if ((*a <= 0.0 && *b >= 0.0) || (*a >= 0.0 && *b <= 0.0)) {
      const double s = (*a == *b) ? 0.0 : *a / (*a - *b);
      const std::size_t dist = k > joint ? k - joint : joint - k;
      if (!best || dist < best_dist) {
        const Vec2 p0 = line.states[k].p;
        best = chart.wrap(p0 + chart.displacement(p0, line.states[k + 1].p) * s);
        best_dist = dist;
      }
    }
  }
  if (!best) throw Error(ErrorCode::Coverage, "pseudo_distance: line never meets the reference zero level");
  return *best;
}

}  // namespace

PseudoDistance pseudo_distance(const MetricChart& chart, const LineFields& a, const BarrierField& ba,
                               const LineFields& b, const BarrierField& bb, const ScalarField& reference_plus,
                               bool equivalent_verdict) {
  PseudoDistance pd;
  pd.base_a = zero_crossing(chart, join_halves(a.plus_path, a.minus_path), reference_plus);
  pd.base_b = zero_crossing(chart, join_halves(b.plus_path, b.minus_path), reference_plus);
  const auto x = ba.field.sample(pd.base_b);
  const auto y = bb.field.sample(pd.base_a);
  if (!x || !y) throw Error(ErrorCode::Coverage, "pseudo_distance: base point outside the valid cells");
  pd.value = std::max(0.0, *x + *y);
  pd.small = pd.value <= 6.0 * chart.h();
  pd.equivalent = equivalent_verdict;
  pd.consistent = pd.small == equivalent_verdict;
  return pd;
}

VerdictReport lemma41_check(const MetricChart& chart, const RaySpec& coray, const ScalarField& b_ray,
                            const ScalarField& b_coray, double tol_cells) {
  const auto c0 = b_ray.sample(coray.base);
  if (!c0) throw Error(ErrorCode::Coverage, "lemma41_check: coray base outside the valid cells");
  VerdictReport v;
  v.check = "busemann_comparison";
  v.tolerance = tol_cells * chart.h();
  double worst = -INFINITY;
  std::size_t common = 0, bad = 0;
  for (std::size_t k = 0; k < b_ray.values().size(); ++k) {
    if (!b_ray.mask()[k] || !b_coray.mask()[k]) continue;
    const double margin = b_ray.values()[k] - *c0 - b_coray.values()[k];
    worst = std::max(worst, margin);
    ++common;
    if (margin > v.tolerance) ++bad;
  }
  if (common == 0) throw Error(ErrorCode::Coverage, "lemma41_check: fields share no valid cell");
  v.violation = std::max(0.0, worst);
  v.pass = bad == 0;
  std::ostringstream os;
  os << "max(lhs-rhs)=" << worst << ", violating cells " << bad << "/" << common;
  v.detail = os.str();
  return v;
}

std::vector<std::vector<std::size_t>> classify(const std::vector<std::vector<bool>>& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto root = [&](std::size_t k) {
    while (parent[k] != k) k = parent[k] = parent[parent[k]];
    return k;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && m[i][j]) {
        const std::size_t a = root(i), b = root(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t> roots;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = root(k);
    auto it = std::find(roots.begin(), roots.end(), r);
    if (it == roots.end()) {
      roots.push_back(r);
      classes.push_back({k});
    } else {
      classes[static_cast<std::size_t>(it - roots.begin())].push_back(k);
    }
  }
  return classes;
}

}  // namespace busekit
