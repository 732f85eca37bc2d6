#include <cmath>
#include <memory>

#include "busekit/barrier.hpp"
#include "doctest.h"

using namespace busekit;

namespace {

// Euclidean strip with horizontal lines, shared by several cases.
struct Strip {
  MetricChart chart = MetricChart::euclidean({-66, 66, -3, 3}, 1321, 61);
  LineFieldOptions opts{{}, {{40, 50, 60}, chart.h()}};
  LineFields line(Vec2 base, Vec2 dir, const std::string& id) const {
    return compute_line_fields(chart, LineSpec::through(chart, base, dir, 62), opts, id);
  }
};

const Strip& strip() {
  static const Strip s;
  return s;
}

struct StripLines {
  LineFields axis, upper, reversed;
  BarrierField b_axis, b_upper, b_reversed;
};

const StripLines& strip_lines() {
  static const StripLines l = [] {
    const Strip& s = strip();
    StripLines out{s.line({0, 0}, {1, 0}, "axis"), s.line({0, 0.5}, {1, 0}, "upper"),
                   s.line({0, 0}, {-1, 0}, "reversed"), {}, {}, {}};
    out.b_axis = barrier_field(s.chart, out.axis);
    out.b_upper = barrier_field(s.chart, out.upper);
    out.b_reversed = barrier_field(s.chart, out.reversed);
    return out;
  }();
  return l;
}

double max_abs(const ScalarField& f, const Rect& r) {
  double m = 0.0;
  for (int j = 0; j < f.ny(); ++j)
    for (int i = 0; i < f.nx(); ++i) {
      const Vec2 p = f.node(i, j);
      if (f.valid(i, j) && p.x >= r.x_min && p.x <= r.x_max && p.y >= r.y_min && p.y <= r.y_max)
        m = std::max(m, std::abs(f.at(i, j)));
    }
  return m;
}

// Vertical half-plane line with its base at the geometric mean of the
// trusted y-range, so both truncation errors stay small at (1,1) and (2,1).
struct HalfPlane {
  MetricChart chart = MetricChart::half_plane({-2.2, 2.2, 0.05, 30}, 177, 1199);
  LineFieldOptions opts{{}, {{2.0, 2.3, 2.55}, chart.h()}};
  double base_y = std::sqrt((0.05 + 5 * chart.hy()) * (30 - 5 * chart.hy()));
  LineFields line(double x) const {
    return compute_line_fields(chart, LineSpec::through(chart, {x, base_y}, {0, 1}, 2.6), opts);
  }
};

}  // namespace

TEST_CASE("euclidean barrier vanishes") {
  const StripLines& l = strip_lines();
  const double h = strip().chart.h();
  CHECK(max_abs(l.b_axis.field, {-2, 2, -1, 1}) <= 3 * h);
  CHECK(l.b_axis.min_value >= -3 * h);
  CHECK(l.b_axis.max_on_line <= 3 * h);
  CHECK(l.b_axis.path.t0 < 0);
}

TEST_CASE("half-plane barrier matches ln(1 + x^2/y^2)") {
  const HalfPlane hp;
  const auto lf = hp.line(0.0);
  const BarrierField bf = barrier_field(hp.chart, lf);
  const double h = hp.chart.h();
  const auto b11 = bf.field.sample({1, 1});
  const auto b21 = bf.field.sample({2, 1});
  REQUIRE(b11.has_value());
  REQUIRE(b21.has_value());
  CHECK(std::abs(*b11 - std::log(2.0)) <= 3 * h);
  CHECK(std::abs(*b21 - std::log(5.0)) <= 3 * h);
  CHECK(bf.min_value >= -3 * h);

  SUBCASE("zero set is a collar of the line") {
    DistanceOracle oracle(hp.chart);
    ZeroSetOptions zo;
    zo.max_checked = 0;
    const ZeroSetResult z = zero_set(hp.chart, bf, oracle, zo);
    CHECK(z.marked > 0u);
    // B <= 4h needs |x| / y <= sqrt(exp(4h) - 1), plus a cell of slack.
    const double slope = std::sqrt(std::exp(z.tol) - 1);
    std::size_t outside = 0;
    for (int j = 0; j < hp.chart.ny(); ++j)
      for (int i = 0; i < hp.chart.nx(); ++i)
        if (z.mask[bf.field.index(i, j)]) {
          const Vec2 p = hp.chart.node(i, j);
          if (std::abs(p.x) > slope * p.y + 2 * h) ++outside;
        }
    CHECK(outside == 0u);
  }
  SUBCASE("disjoint vertical line does not precede") {
    const auto cand = hp.line(1.0);
    const RelationVerdict v = precedes(hp.chart, cand, lf, bf);
    CHECK_FALSE(v.holds);
    CHECK(v.max_barrier > 4 * h);
  }
}

TEST_CASE("join_halves and the near-path mask") {
  const StripLines& l = strip_lines();
  const MetricChart& chart = strip().chart;
  const GeodesicPath p = join_halves(l.axis.plus_path, l.axis.minus_path);
  CHECK(p.t0 == doctest::Approx(-l.axis.minus_path.t_end()));
  CHECK(p.t_end() == doctest::Approx(l.axis.plus_path.t_end()));
  const auto mask = near_path_mask(chart, p);
  CHECK(mask[chart.nx() * 30 + 660] == 1);
  CHECK(mask[chart.nx() * 40 + 660] == 0);
}

TEST_CASE("barrier invariance under shifts and reversal") {
  const StripLines& l = strip_lines();
  InvarianceOptions inv;
  inv.shifts = {-0.5, 0.5};
  const auto reports = barrier_invariance(strip().chart, l.axis, l.b_axis, strip().opts, inv);
  CHECK(reports.size() == 3u);
  for (const auto& r : reports) CHECK_MESSAGE(r.pass, r);
}

TEST_CASE("zero sets") {
  SUBCASE("euclidean line: every cell is on a parallel line") {
    const StripLines& l = strip_lines();
    DistanceOracle oracle(strip().chart);
    ZeroSetOptions zo;
    zo.max_checked = 6;
    const ZeroSetResult z = zero_set(strip().chart, l.b_axis, oracle, zo);
    CHECK(z.tol == doctest::Approx(4 * strip().chart.h()));
    CHECK(z.marked_off_line > 0u);
    CHECK(z.checks.size() == 6u);
    CHECK(z.glued_fraction() >= 0.95);
  }
  SUBCASE("cylinder axis: B vanishes identically") {
    const double L = 2 * M_PI;
    const auto chart = MetricChart::cylinder({0, L, -66, 66}, 32, 673);
    const LineFieldOptions lo{{}, {{40, 50, 60}, 0.05}};
    const auto lf = compute_line_fields(chart, LineSpec::through(chart, {1, 0}, {0, 1}, 62), lo);
    const BarrierField bf = barrier_field(chart, lf);
    CHECK(max_abs(bf.field, {0, L, -2, 2}) <= 3 * chart.h());
    DistanceOracle oracle(chart);
    ZeroSetOptions zo;
    zo.max_checked = 6;
    const ZeroSetResult z = zero_set(chart, bf, oracle, zo);
    CHECK(z.glued_fraction() >= 0.95);
    CHECK(static_cast<double>(z.marked) >= 0.9 * static_cast<double>(bf.field.valid_count()));
    CHECK(quad_bound_constant(chart, bf, {0.5, 5.5, -10, 10}).constant <= 0.05);
  }
}

TEST_CASE("quadratic bound on a flat strip") {
  const StripLines& l = strip_lines();
  const QuadBound q = quad_bound_constant(strip().chart, l.b_upper, {-2, 2, -1.5, 2.5});
  CHECK(q.counted > 100u);
  CHECK(q.excluded > 0u);
  CHECK(q.constant <= 0.1);
}

TEST_CASE("precedence") {
  const StripLines& l = strip_lines();
  const Strip& s = strip();
  SUBCASE("parallel lines") {
    const RelationVerdict v = precedes(s.chart, l.upper, l.axis, l.b_axis);
    CHECK(v.holds);
    CHECK(v.relation == Relation::Precedes);
  }
  SUBCASE("perpendicular line fails the coray clause") {
    const LineFieldOptions lo{{}, {{1.0, 1.5, 2.0}, s.chart.h()}};
    const auto cand = compute_line_fields(s.chart, LineSpec::through(s.chart, {0, 0}, {0, 1}, 2.2), lo, "cross");
    const RelationVerdict v = precedes(s.chart, cand, l.axis, l.b_axis);
    CHECK_FALSE(v.holds);
    CHECK(v.max_barrier <= 4 * s.chart.h());
    CHECK(std::max(v.slope_defect_plus, v.slope_defect_minus) > 0.5);
  }
}

TEST_CASE("equivalence") {
  const StripLines& l = strip_lines();
  const Strip& s = strip();
  const RelationVerdict par = equivalent(s.chart, l.upper, l.b_upper, l.axis, l.b_axis);
  CHECK(par.holds);
  CHECK(par.routes_agree);
  CHECK(par.precedes_both);

  const RelationVerdict rev = equivalent(s.chart, l.reversed, l.b_reversed, l.axis, l.b_axis);
  CHECK_FALSE(rev.holds);
  CHECK(rev.routes_agree);
  CHECK(rev.oscillation_plus > 1.0);

  SUBCASE("cylinder axis lines at opposite angles") {
    const double L = 2 * M_PI;
    const auto chart = MetricChart::cylinder({0, L, -66, 66}, 32, 673);
    const LineFieldOptions lo{{}, {{40, 50, 60}, 0.05}};
    const auto a = compute_line_fields(chart, LineSpec::through(chart, {0, 0}, {0, 1}, 62), lo, "a");
    const auto b = compute_line_fields(chart, LineSpec::through(chart, {M_PI, 0}, {0, 1}, 62), lo, "b");
    const RelationVerdict v = equivalent(chart, a, barrier_field(chart, a), b, barrier_field(chart, b));
    CHECK(v.holds);
    CHECK(v.routes_agree);
  }
}

TEST_CASE("line sum test") {
  SUBCASE("euclidean") {
    const MetricChart chart = MetricChart::euclidean({-8, 8, -8, 8}, 161, 161);
    const TruncationSchedule sched{{4, 5, 6}, chart.h()};
    const auto east = RaySpec::unit(chart, {0, 0}, {1, 0}, 6.5);
    const auto west = RaySpec::unit(chart, {0, 0}, {-1, 0}, 6.5);
    const auto north = RaySpec::unit(chart, {0, 0}, {0, 1}, 6.5);
    const auto be = busemann_field(chart, east, sched);
    const auto bw = busemann_field(chart, west, sched);
    const auto bn = busemann_field(chart, north, sched);
    DistanceOracle oracle(chart);
    const LineSumResult opp = line_sum_test(chart, east, west, be.field, bw.field, oracle);
    CHECK(opp.field_test.pass);
    CHECK(opp.glue.accepted());
    CHECK(opp.agree);
    const LineSumResult right = line_sum_test(chart, east, north, be.field, bn.field, oracle);
    CHECK_FALSE(right.field_test.pass);
    CHECK_FALSE(right.glue.accepted());
    CHECK(right.agree);
  }
  SUBCASE("paraboloid meridians") {
    const MetricChart chart = MetricChart::paraboloid({-5, 5, -5, 5}, 121, 121);
    const auto east = RaySpec::unit(chart, {0, 0}, {1, 0}, 40);
    const auto west = RaySpec::unit(chart, {0, 0}, {-1, 0}, 40);
    const double T = integrate_ray(chart, east, 0.01).t_end() - 0.1;
    const TruncationSchedule sched{{0.6 * T, 0.8 * T, T}, 1.0};
    const auto be = busemann_field(chart, {east.base, east.direction, T}, sched);
    const auto bw = busemann_field(chart, {west.base, west.direction, T}, sched);
    DistanceOracle oracle(chart);
    const LineSumResult r = line_sum_test(chart, {east.base, east.direction, T}, {west.base, west.direction, T},
                                          be.field, bw.field, oracle);
    CHECK_FALSE(r.field_test.pass);
    CHECK(r.field_test.violation > r.field_test.tolerance);
    CHECK_FALSE(r.glue.accepted());
    CHECK(r.agree);
  }
}

TEST_CASE("pseudo-distance") {
  const StripLines& l = strip_lines();
  const Strip& s = strip();
  const PseudoDistance pd = pseudo_distance(s.chart, l.upper, l.b_upper, l.axis, l.b_axis, l.axis.plus.field, true);
  CHECK(pd.small);
  CHECK(pd.consistent);
  CHECK(pd.value >= 0.0);
  CHECK(std::abs(pd.base_a.x) < 2 * s.chart.h());
}

TEST_CASE("Busemann comparison along a coray") {
  const StripLines& l = strip_lines();
  const Strip& s = strip();
  const auto coray = RaySpec::unit(s.chart, {-1, 0.5}, {1, 0}, 62);
  const auto bc = busemann_field(s.chart, coray, s.opts.schedule);
  const VerdictReport v = lemma41_check(s.chart, coray, l.axis.plus.field, bc.field);
  CHECK(v.pass);
  CHECK(std::abs(v.violation) <= 6 * s.chart.h());
}

TEST_CASE("classification into equivalence classes") {
  const std::vector<std::vector<bool>> e = {
      {true, false, true, false}, {false, true, false, false}, {true, false, true, false}, {false, false, false, true}};
  const auto cls = classify(e);
  REQUIRE(cls.size() == 3u);
  CHECK(cls[0] == std::vector<std::size_t>{0, 2});
  CHECK(cls[1] == std::vector<std::size_t>{1});
  CHECK(cls[2] == std::vector<std::size_t>{3});
  CHECK(std::string(relation_name(Relation::Equivalent)) == "equivalent");
}
