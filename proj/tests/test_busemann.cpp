#include <cmath>

#include "busekit/busemann.hpp"
#include "doctest.h"

using namespace busekit;

namespace {

template <class F>
ScalarField analytic(const MetricChart& chart, F f) {
  ScalarField out(GridGeometry::of(chart), FieldTag::Generic);
  for (int j = 0; j < out.ny(); ++j)
    for (int i = 0; i < out.nx(); ++i) out.at(i, j) = f(out.node(i, j));
  return out;
}

struct Compare {
  double worst = 0.0;
  std::size_t valid = 0;
  std::size_t total = 0;
};

// Worst |f - exact| over the valid nodes of `f` inside `region`.
template <class F>
Compare compare(const ScalarField& f, const Rect& region, F exact) {
  Compare c;
  for (int j = 0; j < f.ny(); ++j)
    for (int i = 0; i < f.nx(); ++i) {
      const Vec2 p = f.node(i, j);
      if (p.x < region.x_min || p.x > region.x_max || p.y < region.y_min || p.y > region.y_max) continue;
      ++c.total;
      if (!f.valid(i, j)) continue;
      ++c.valid;
      c.worst = std::max(c.worst, std::abs(f.at(i, j) - exact(p)));
    }
  return c;
}

}  // namespace

TEST_CASE("euclidean Busemann function is linear") {
  const auto chart = MetricChart::euclidean({-2, 14, -2, 2}, 257, 65);
  const double h = chart.h();
  const auto lf = busemann_field(chart, RaySpec::unit(chart, {0, 0}, {1, 0}, 12), {{4, 8, 12}, h});
  const Compare c = compare(lf.field, {-1.5, 2, -1, 1}, [](Vec2 p) { return -p.x; });
  CHECK(c.worst <= 2 * h);
  CHECK(c.valid == c.total);
  REQUIRE(lf.report.steps.size() == 3u);
  CHECK(lf.report.max_monotone_violation <= 3 * h);
  // b_t is non-increasing in t up to the scheme tolerance.
  for (const auto& s : lf.report.steps) CHECK(s.monotone_violation <= 3 * h);
  CHECK_FALSE(lf.report.text().empty());
}

TEST_CASE("half-plane Busemann function of the vertical ray") {
  const auto chart = MetricChart::half_plane({-1, 1, 0.5, 30}, 81, 1181);
  const double h = chart.h();
  const auto lf = busemann_field(chart, RaySpec::unit(chart, {0, 1}, {0, 1}, 3.1), {{2.0, 2.5, 3.0}, h});
  const Compare c = compare(lf.field, {-0.5, 0.5, 0.7, 3}, [](Vec2 p) { return -std::log(p.y); });
  CHECK(c.worst <= 3 * h);
  CHECK(c.valid == c.total);
}

TEST_CASE("schedule errors") {
  const auto chart = MetricChart::euclidean({-2, 6, -2, 2}, 81, 41);
  const auto ray = RaySpec::unit(chart, {0, 0}, {1, 0}, 20);
  try {
    busemann_field(chart, ray, {{2, 4, 9}, 0.1});
    FAIL("accepted a truncation point outside the chart");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Schedule);
  }
  CHECK_THROWS_AS(busemann_field(chart, ray, {{3, 2}, 0.1}), Error);
  CHECK_THROWS_AS(busemann_field(chart, ray, {{}, 0.1}), Error);
}

TEST_CASE("horofunctions") {
  SUBCASE("euclidean points along the axis agree with the Busemann function") {
    const auto chart = MetricChart::euclidean({-2, 14, -2, 2}, 257, 65);
    const double h = chart.h();
    const auto horo = horofunction_field(chart, {{4, 0}, {8, 0}, {12, 0}}, {0, 0}, h);
    const auto bus = busemann_field(chart, RaySpec::unit(chart, {0, 0}, {1, 0}, 12), {{4, 8, 12}, h});
    const Compare c = compare(horo.field, {-2, 2, -1, 1}, [](Vec2 p) { return -p.x; });
    CHECK(c.worst <= 2 * h);
    const auto osc = difference_oscillation(horo.field, bus.field);
    REQUIRE(osc.has_value());
    CHECK(*osc <= 4 * h);
  }
  SUBCASE("cylinder points escaping at arbitrary angles") {
    const double L = 2 * M_PI;
    const auto chart = MetricChart::cylinder({0, L, -3, 30}, 64, 337);
    const double h = chart.h();
    const auto horo = horofunction_field(chart, {{1.0, 15}, {4.0, 21}, {2.0, 27}}, {0, 0}, -1.0);
    const Compare c = compare(horo.field, {0, L, -1, 1}, [](Vec2 p) { return -p.y; });
    // Lateral error of the last point is about (π/2)² / (2 * 27).
    CHECK(c.worst <= 0.05 + 2 * h);
  }
  SUBCASE("bounded sequences are rejected") {
    const auto chart = MetricChart::euclidean({-2, 6, -2, 2}, 81, 41);
    try {
      horofunction_field(chart, {{3, 0}, {2, 0}, {4, 0}}, {0, 0}, -1.0);
      FAIL("accepted a non-escaping sequence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Precondition);
    }
  }
}

TEST_CASE("dl-functions") {
  SUBCASE("expanding circles give -|x|") {
    const auto chart = MetricChart::euclidean({-9, 9, -9, 9}, 241, 241);
    const double h = chart.h();
    const auto lf = dl_field(chart, {circle_source({0, 0}, 4), circle_source({0, 0}, 6), circle_source({0, 0}, 8)},
                             {0, 0}, -1.0);
    double worst = 0.0;
    for (int j = 0; j < lf.field.ny(); ++j)
      for (int i = 0; i < lf.field.nx(); ++i) {
        const Vec2 p = lf.field.node(i, j);
        const double r = std::hypot(p.x, p.y);
        if (r > 3 || r < 2 * h || !lf.field.valid(i, j)) continue;
        worst = std::max(worst, std::abs(lf.field.at(i, j) + r));
      }
    CHECK(worst <= 3 * h);
  }
  SUBCASE("receding vertical lines give -x") {
    const auto chart = MetricChart::euclidean({-3, 9, -2, 2}, 241, 81);
    const double h = chart.h();
    const auto lf = dl_field(chart,
                             {vertical_line_source(chart, 4), vertical_line_source(chart, 6),
                              vertical_line_source(chart, 8)},
                             {0, 0}, h);
    const Compare c = compare(lf.field, {-2, 2, -1.5, 1.5}, [](Vec2 p) { return -p.x; });
    CHECK(c.worst <= 2 * h);
    CHECK(c.valid == c.total);
  }
  SUBCASE("half-plane upper regions give -ln y") {
    const auto chart = MetricChart::half_plane({-1, 1, 0.5, 6}, 81, 221);
    const double h = chart.h();
    const auto lf = dl_field(chart,
                             {region_above_source(chart, 3), region_above_source(chart, 4),
                              region_above_source(chart, 5)},
                             {0, 1}, h);
    const Compare c = compare(lf.field, {-0.5, 0.5, 0.7, 2.5}, [](Vec2 p) { return -std::log(p.y); });
    CHECK(c.worst <= 3 * h);
    CHECK(c.valid == c.total);
  }
  SUBCASE("source helpers") {
    const auto chart = MetricChart::euclidean({-3, 3, -2, 2}, 61, 41);
    const SourceSet v = vertical_line_source(chart, 1.0);
    REQUIRE(v.polylines.size() == 1u);
    CHECK(v.polylines[0].points.front().x == 1.0);
    CHECK(circle_source({0, 0}, 2, 36).polylines[0].points.size() >= 36u);
    const SourceSet above = region_above_source(chart, 1.0);
    for (const auto& [i, j] : above.nodes) CHECK(chart.node(i, j).y >= 1.0 - 1e-12);
    CHECK_FALSE(above.nodes.empty());
  }
}

TEST_CASE("singular sets") {
  SUBCASE("euclidean Busemann function is smooth") {
    const auto chart = MetricChart::euclidean({-2, 14, -2, 2}, 257, 65);
    const auto lf = busemann_field(chart, RaySpec::unit(chart, {0, 0}, {1, 0}, 12), {{4, 8, 12}, chart.h()});
    CHECK(singular_set(chart, lf.field).count() == 0u);
  }
  SUBCASE("kink of -|x| is marked at the origin and nowhere else") {
    const auto chart = MetricChart::euclidean({-2, 2, -2, 2}, 81, 81);
    const auto f = analytic(chart, [](Vec2 p) { return -std::hypot(p.x, p.y); });
    const SingularMask m = singular_set(chart, f);
    REQUIRE(m.count() > 0u);
    double far = 0.0;
    for (int j = 0; j < m.ny; ++j)
      for (int i = 0; i < m.nx; ++i)
        if (m.at(i, j)) far = std::max(far, std::hypot(chart.node(i, j).x, chart.node(i, j).y));
    CHECK(far <= 3 * chart.h());
  }
  SUBCASE("ridge of a pointwise minimum") {
    const auto chart = MetricChart::euclidean({-2, 2, -2, 2}, 81, 81);
    const auto f = analytic(chart, [](Vec2 p) { return -std::abs(p.x); });
    const SingularMask m = singular_set(chart, f);
    for (int j = 6; j < m.ny - 6; ++j) CHECK(m.at(40, j));
    for (int j = 0; j < m.ny; ++j)
      for (int i = 0; i < m.nx; ++i)
        if (m.at(i, j)) CHECK(std::abs(i - 40) <= 2);
  }
}

TEST_CASE("paraboloid meridian ray has its singular set on the opposite meridian") {
  const auto chart = MetricChart::paraboloid({-6, 6, -6, 6}, 161, 161);
  const auto ray = RaySpec::unit(chart, {0, 0}, {1, 0}, 40);
  const auto path = integrate_ray(chart, ray, 0.01);
  const double T = path.t_end() - 0.1;
  const auto lf = busemann_field(chart, RaySpec{ray.base, ray.direction, T}, {{0.6 * T, 0.8 * T, T}, 1.0});
  const SingularMask m = singular_set(chart, lf.field);
  std::size_t on_ridge = 0, off_ridge = 0;
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      if (!m.at(i, j)) continue;
      const Vec2 p = chart.node(i, j);
      if (p.x < 0 && std::abs(p.y) <= 2 * chart.h() + 1e-9)
        ++on_ridge;
      else
        ++off_ridge;
    }
  CHECK(on_ridge > 10u);
  CHECK(off_ridge == 0u);

  // Two clusters mirrored in y on the ridge.
  const Superdifferential sd = superdifferential(chart, lf.field, {-2.5, 0}, 2 * std::sqrt(2.0) * chart.h());
  REQUIRE(sd.clusters.size() >= 2u);
  CHECK(sd.diameter > 0.2);
}

TEST_CASE("superdifferential") {
  const auto chart = MetricChart::euclidean({-2, 2, -2, 2}, 81, 81);
  const double h = chart.h();
  SUBCASE("linear field has one gradient") {
    const auto f = analytic(chart, [](Vec2 p) { return 0.6 * p.x - 0.8 * p.y; });
    const Superdifferential sd = superdifferential(chart, f, {0.3, 0.1}, 2 * h);
    REQUIRE(sd.clusters.size() == 1u);
    CHECK(sd.clusters[0].representative.dx == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(sd.clusters[0].representative.dy == doctest::Approx(-0.8).epsilon(1e-6));
    CHECK(sd.diameter < 1e-6);
  }
  SUBCASE("minimum of two point distances on their bisector") {
    const Vec2 a{-1, 0}, b{1, 0};
    const auto f = analytic(chart, [&](Vec2 p) {
      return -std::min(std::hypot(p.x - a.x, p.y - a.y), std::hypot(p.x - b.x, p.y - b.y));
    });
    // Pointwise max of two concave-type pieces: the gradients at (0, y) are
    // the unit vectors from the two points, reflected through the bisector.
    const Superdifferential sd = superdifferential(chart, f, {0, 0.5}, 2 * h);
    REQUIRE(sd.clusters.size() == 2u);
    const double gx = 1 / std::hypot(1.0, 0.5);
    CHECK(sd.diameter == doctest::Approx(2 * gx).epsilon(0.05));
    CHECK(sd.hull.size() >= 2u);
  }
}

TEST_CASE("semiconcavity constants") {
  const auto chart = MetricChart::euclidean({-2, 2, -2, 2}, 81, 81);
  SUBCASE("linear") {
    const auto f = analytic(chart, [](Vec2 p) { return p.x + 2 * p.y; });
    CHECK(semiconcavity_constant(chart, f, {-1.5, 1.5, -1.5, 1.5}).constant < 1e-9);
  }
  SUBCASE("norm on an annulus") {
    // Largest second derivative of |x| is 1 / r at r = 1 on the inner edge.
    const auto f = analytic(chart, [](Vec2 p) { return std::hypot(p.x, p.y); });
    auto g = f;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double r = std::hypot(g.node(i, j).x, g.node(i, j).y);
        g.set_valid(i, j, r >= 1.0 && r <= 1.9);
      }
    const auto est = semiconcavity_constant(chart, g, {-2, 2, -2, 2});
    CHECK(est.constant == doctest::Approx(1.0).epsilon(0.2));
  }
  SUBCASE("negated norm away from the origin") {
    const auto f = analytic(chart, [](Vec2 p) { return -std::hypot(p.x, p.y); });
    CHECK(semiconcavity_constant(chart, f, {0.5, 1.8, 0.5, 1.8}).constant < 1e-9);
  }
}
