#include <cmath>
#include <sstream>

#include "busekit/geodesic.hpp"
#include "doctest.h"

using namespace busekit;

namespace {

// Analytic field on the nodes of `chart`.
template <class F>
ScalarField analytic(const MetricChart& chart, F f, FieldTag tag = FieldTag::Busemann) {
  ScalarField out(GridGeometry::of(chart), tag);
  for (int j = 0; j < out.ny(); ++j)
    for (int i = 0; i < out.nx(); ++i) out.at(i, j) = f(out.node(i, j));
  return out;
}

}  // namespace

TEST_CASE("euclidean geodesics are straight") {
  const auto chart = MetricChart::euclidean({-1, 6, -1, 1}, 71, 21);
  const GeodesicPath p = integrate_geodesic(chart, {0, 0}, {1, 0}, 5.0, 0.01);
  REQUIRE_FALSE(p.empty());
  CHECK_FALSE(p.truncated);
  CHECK(p.t_end() == doctest::Approx(5.0));
  CHECK(p.states.back().p.x == doctest::Approx(5.0));
  CHECK(std::abs(p.states.back().p.y) < 1e-12);
  const auto mid = p.at(chart, 2.345);
  REQUIRE(mid.has_value());
  CHECK(mid->p.x == doctest::Approx(2.345));
  CHECK_FALSE(p.at(chart, 5.5).has_value());
}

TEST_CASE("half-plane geodesic follows the unit semicircle") {
  const auto chart = MetricChart::half_plane({-2, 2, 0.2, 3}, 65, 65);
  const GeodesicPath p = integrate_geodesic(chart, {0, 1}, {1, 0}, 1.0, 0.01);
  const Vec2 end = p.states.back().p;
  CHECK(end.x == doctest::Approx(std::tanh(1.0)).epsilon(1e-7));
  CHECK(end.y == doctest::Approx(1 / std::cosh(1.0)).epsilon(1e-7));
  CHECK(p.speed_drift(chart) < kTolSpeed);
}

TEST_CASE("geodesics stop at the chart boundary") {
  const auto chart = MetricChart::euclidean({-1, 1, -1, 1}, 21, 21);
  const GeodesicPath p = integrate_geodesic(chart, {0, 0}, {1, 0}, 3.0, 0.01);
  CHECK(p.truncated);
  CHECK(p.t_end() <= 1.0);
  CHECK_THROWS_AS(integrate_geodesic(chart, {0, 0}, {2, 0}, 1.0, 0.01), Error);
  CHECK(confident_extent(chart, p, 5) < p.size());
}

TEST_CASE("cylinder geodesics wrap") {
  const auto chart = MetricChart::cylinder({0, 2 * M_PI, -2, 2}, 128, 41);
  const GeodesicPath p = integrate_geodesic(chart, {6.0, 0}, {1, 0}, 1.0, 0.01);
  CHECK_FALSE(p.truncated);
  CHECK(p.states.back().p.x == doctest::Approx(7.0 - 2 * M_PI).epsilon(1e-9));
}

TEST_CASE("ray tests") {
  SUBCASE("euclidean segment is a ray") {
    const auto chart = MetricChart::euclidean({-1, 6, -2, 2}, 141, 81);
    const auto path = integrate_ray(chart, RaySpec::unit(chart, {0, 0}, {1, 0}, 5.0), 0.01);
    DistanceOracle oracle(chart);
    const VerdictReport v = is_ray(chart, path, oracle, {.horizon = 4.5});
    CHECK(v.pass);
    CHECK(v.violation <= v.tolerance);
  }
  SUBCASE("horizontal circle on the cylinder is not") {
    const auto chart = MetricChart::cylinder({0, 2 * M_PI, -2, 2}, 128, 41);
    const auto path = integrate_geodesic(chart, {1.0, 0}, {1, 0}, 5.0, 0.01);
    DistanceOracle oracle(chart);
    const VerdictReport v = is_ray(chart, path, oracle);
    CHECK_FALSE(v.pass);
    // The worst pair is about 2π - 5 apart along a 5-long arc.
    CHECK(v.violation > 1.0);
  }
  SUBCASE("vertical half-plane geodesic is a ray") {
    const auto chart = MetricChart::half_plane({-1, 1, 0.2, 6}, 65, 185);
    const auto path = integrate_geodesic(chart, {0, 1}, {0, 1}, 1.6, 0.01);
    DistanceOracle oracle(chart);
    CHECK(is_ray(chart, path, oracle).pass);
  }
  SUBCASE("requests beyond the trusted extent are errors") {
    const auto chart = MetricChart::euclidean({-1, 3, -1, 1}, 41, 21);
    const auto path = integrate_geodesic(chart, {0, 0}, {1, 0}, 2.0, 0.01);
    DistanceOracle oracle(chart);
    try {
      is_ray(chart, path, oracle, {.horizon = 2.9});
      FAIL("accepted a horizon past the path");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientHorizon);
    }
  }
}

TEST_CASE("distance oracle caches one solve per anchor") {
  const auto chart = MetricChart::euclidean({-2, 2, -2, 2}, 41, 41);
  DistanceOracle oracle(chart);
  const auto d = oracle.distance({0, 0}, {1, 1});
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  oracle.distance({0, 0}, {-1, 0.5});
  CHECK(oracle.solves() == 1u);
  oracle.distance({1, 0}, {0, 0});
  CHECK(oracle.solves() == 2u);
}

TEST_CASE("gluing rays into lines") {
  SUBCASE("euclidean opposite rays") {
    const auto chart = MetricChart::euclidean({-3, 3, -1, 1}, 121, 41);
    const auto plus = integrate_geodesic(chart, {0, 0}, {1, 0}, 2.5, 0.01);
    const auto minus = integrate_geodesic(chart, {0, 0}, {-1, 0}, 2.5, 0.01);
    DistanceOracle oracle(chart);
    const GlueResult g = glue_line(chart, plus, minus, oracle);
    CHECK(g.accepted());
    CHECK(g.line.t0 == doctest::Approx(-g.line.t_end()).epsilon(1e-9));
  }
  SUBCASE("half-plane vertical line") {
    const auto chart = MetricChart::half_plane({-1, 1, 0.2, 6}, 65, 185);
    const auto plus = integrate_geodesic(chart, {0, 1}, {0, 1}, 1.6, 0.01);
    const auto minus = integrate_geodesic(chart, {0, 1}, {0, -1}, 1.3, 0.01);
    DistanceOracle oracle(chart);
    CHECK(glue_line(chart, plus, minus, oracle).accepted());
  }
  SUBCASE("kinked joint is not a geodesic") {
    const auto chart = MetricChart::euclidean({-3, 3, -3, 3}, 61, 61);
    const auto plus = integrate_geodesic(chart, {0, 0}, {1, 0}, 2.0, 0.01);
    const auto minus = integrate_geodesic(chart, {0, 0}, {0, -1}, 2.0, 0.01);
    DistanceOracle oracle(chart);
    const GlueResult g = glue_line(chart, plus, minus, oracle);
    CHECK(g.status == GlueStatus::NotGeodesic);
  }
  SUBCASE("paraboloid meridians through the apex do not minimize") {
    const auto chart = MetricChart::paraboloid({-4, 4, -4, 4}, 121, 121);
    const auto plus = integrate_ray(chart, RaySpec::unit(chart, {0, 0}, {1, 0}, 6.0), 0.01);
    const auto minus = integrate_ray(chart, RaySpec::unit(chart, {0, 0}, {-1, 0}, 6.0), 0.01);
    DistanceOracle oracle(chart);
    const GlueResult g = glue_line(chart, plus, minus, oracle);
    CHECK(g.status == GlueStatus::NotMinimizing);
    CHECK(g.defect > g.tolerance);
  }
}

TEST_CASE("coray backtracing") {
  SUBCASE("euclidean b = -x") {
    const auto chart = MetricChart::euclidean({-1, 6, 1, 5}, 141, 81);
    const auto b = analytic(chart, [](Vec2 p) { return -p.x; });
    const CorayTrace tr = trace_coray(chart, b, {0, 3}, 4.0, 0.01);
    CHECK(std::abs(tr.slope + 1.0) < 0.01);
    CHECK(tr.chosen.dx == doctest::Approx(-1.0).epsilon(1e-6));
    const Vec2 end = tr.path.states.back().p;
    CHECK(end.x == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(end.y == doctest::Approx(3.0).epsilon(1e-6));
  }
  SUBCASE("half-plane b = -ln y climbs vertically") {
    const auto chart = MetricChart::half_plane({-0.5, 1.5, 0.5, 12}, 81, 461);
    const auto b = analytic(chart, [](Vec2 p) { return -std::log(p.y); });
    const CorayTrace tr = trace_coray(chart, b, {0.5, 1}, 2.0, 0.01);
    CHECK(std::abs(tr.slope + 1.0) < 0.05);
    const Vec2 end = tr.path.states.back().p;
    CHECK(end.x == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(end.y == doctest::Approx(std::exp(tr.path.t_end())).epsilon(1e-3));
  }
  SUBCASE("wrong slope is a validation error") {
    const auto chart = MetricChart::euclidean({-1, 6, 1, 5}, 141, 81);
    const auto b = analytic(chart, [](Vec2 p) { return -0.5 * p.x; });
    try {
      trace_coray_from(chart, b, {0, 3}, {-1, 0}, 4.0, 0.01);
      FAIL("accepted slope -1/2");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CorayValidation);
      CHECK(e.defect() == doctest::Approx(0.5).epsilon(0.02));
    }
  }
  SUBCASE("masked start is a data error") {
    const auto chart = MetricChart::euclidean({-1, 6, 1, 5}, 141, 81);
    auto b = analytic(chart, [](Vec2 p) { return -p.x; });
    for (auto& m : b.mask()) m = 0;
    try {
      trace_coray(chart, b, {0, 3}, 4.0, 0.01);
      FAIL("traced through a masked field");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Data);
    }
  }
}

TEST_CASE("path CSV") {
  const auto chart = MetricChart::euclidean({-1, 2, -1, 1}, 31, 21);
  const auto p = integrate_geodesic(chart, {0, 0}, {1, 0}, 1.0, 0.25);
  std::ostringstream os;
  write_path_csv(chart, p, os);
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  std::getline(is, line);
  CHECK(line.rfind("# chart=", 0) == 0);
  std::getline(is, line);
  CHECK(line == "t,x,y,vx,vy");
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(p.size()));
}
