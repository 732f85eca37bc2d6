#include <string>

#include "busekit/config.hpp"
#include "doctest.h"

using namespace busekit;

namespace {

const char* kBase = R"([chart]
kind = euclidean
x_min = -4
x_max = 4
y_min = -2
y_max = 2
nx = 81
ny = 41
)";

// Parses kBase + extra and returns the Config error message, or "" on success.
std::string rejection(const std::string& extra, const std::string& base = kBase) {
  try {
    parse_config_string(base + extra);
    return "";
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
}

}  // namespace

TEST_CASE("a complete config parses") {
  const ExperimentConfig cfg = parse_config_string(std::string(kBase) + R"(
# comment line
[objects]
line.a = 0 0 1 0 3.5   # trailing comment
ray.r = 0 1 1 0 3
source.s = point 0 0 ; polyline -1 -1 1 -1
horo.h = base 0 0 ; point 1 0 ; point 2 0 ; point 3 0
horo.g = ray r
dl.d = base 0 0 ; vline 1 ; vline 2 ; circle 0 0 1.5 ; above 1
[solver]
schedule = 1 2 3
cauchy_tol = 0.05
tol_grad = 0.3
shifts = -0.5 0.5
region = -1 1 -1 1
suites = busemann barrier
[outputs]
dir = out
report = r.txt
)");
  CHECK(cfg.chart.kind == ChartKind::Euclidean);
  CHECK(cfg.chart.nx == 81);
  CHECK(cfg.ny_given);
  CHECK(cfg.lines.at("a").horizon == 3.5);
  CHECK(cfg.rays.at("r").base.y == 1.0);
  CHECK(cfg.sources.at("s").polylines.size() == 1u);
  CHECK(cfg.horos.at("h").points.size() == 3u);
  CHECK(cfg.horos.at("g").ray == "r");
  REQUIRE(cfg.dls.at("d").sets.size() == 4u);
  CHECK(cfg.dls.at("d").sets[2].kind == SetItem::Kind::Circle);
  CHECK(cfg.solver.schedule == std::vector<double>{1, 2, 3});
  CHECK(cfg.solver.tol_grad == 0.3);
  REQUIRE(cfg.solver.region.has_value());
  CHECK(cfg.solver.region->x_max == 1.0);
  CHECK(cfg.solver.suites == std::vector<std::string>{"busemann", "barrier"});
  CHECK(cfg.output_path(cfg.outputs.report) == "out/r.txt");

  const MetricChart chart = cfg.make_chart();
  CHECK(chart.nx() == 81);
  const TruncationSchedule s = cfg.schedule(chart);
  CHECK(s.cauchy_tol == 0.05);
  const RaySpec r = cfg.ray(chart, "r");
  CHECK(chart.gnorm(r.base, r.direction) == doctest::Approx(1.0));
  const HoroObject h = cfg.horo(chart, "g");
  CHECK(h.points.size() == 3u);
  CHECK(h.points.back().x == doctest::Approx(3.0));
  CHECK(cfg.dl_sets(chart, "d").size() == 4u);
  CHECK(cfg.make_chart(161).ny() == 81);
}

TEST_CASE("defaults") {
  const ExperimentConfig cfg = parse_config_string(kBase);
  const MetricChart chart = cfg.make_chart();
  CHECK(cfg.cauchy_tol(chart) == chart.h());
  CHECK_FALSE(cfg.solver.zero_tol.has_value());
  CHECK(cfg.solver.jump_threshold == 0.2);
  CHECK(cfg.solver.tol_slope == 0.05);
  CHECK_THROWS_AS(cfg.schedule(chart), Error);
  CHECK_THROWS_AS(cfg.ray(chart, "missing"), Error);
}

TEST_CASE("rejections name the key and line") {
  const std::string unknown = rejection("colour = blue\n");
  CHECK(unknown.find("colour") != std::string::npos);
  CHECK(unknown.find(":9:") != std::string::npos);

  CHECK(rejection("[solver]\ntol_grad = 1.5\n").find("tol_grad") != std::string::npos);
  CHECK(rejection("[solver]\ntol_grad = 0\n").find("tol_grad") != std::string::npos);
  CHECK(rejection("nx = 12\n").find("duplicate") != std::string::npos);
  CHECK(rejection("[extras]\n").find("extras") != std::string::npos);
  CHECK(rejection("[solver]\nschedule = 3 2\n").find("schedule") != std::string::npos);
  CHECK(rejection("[solver]\nschedule = 1 two\n").find("two") != std::string::npos);
  CHECK(rejection("[solver]\nsuites = everything\n").find("everything") != std::string::npos);
  CHECK(rejection("[objects]\nray.r = 0 0 0 0 1\n").find("direction") != std::string::npos);
  CHECK(rejection("[objects]\nray.r = 0 0 1 0\n").find("5 numbers") != std::string::npos);
  CHECK(rejection("[objects]\nwidget.w = 1\n").find("widget") != std::string::npos);
  CHECK(rejection("[objects]\ndl.d = 0 0 ; vline 1\n").find("base") != std::string::npos);
  CHECK(rejection("[objects]\ndl.d = base 0 0 ; circle 0 0 -1\n").find("radius") != std::string::npos);
  CHECK(rejection("[objects]\nhoro.h = base 0 0 ; vline 1\n").find("points") != std::string::npos);
  CHECK(rejection("[solver]\nregion = 1 0 0 1\n").find("region") != std::string::npos);
  CHECK(rejection("junk\n").find("key = value") != std::string::npos);
  CHECK(rejection("[chart\n").find("section") != std::string::npos);
  CHECK(rejection("", "nx = 3\n").find("outside") != std::string::npos);

  const std::string hp = "[chart]\nkind = half_plane\nx_min = -1\nx_max = 1\ny_min = 0\ny_max = 2\nnx = 9\nny = 9\n";
  CHECK(rejection("", hp).find("y_min") != std::string::npos);
  CHECK(rejection("g11 = 1\n").find("custom") != std::string::npos);
  CHECK(rejection("kind = torus\n", "[chart]\n").find("torus") != std::string::npos);
}

TEST_CASE("custom metrics and cylinders") {
  const ExperimentConfig c = parse_config_string(R"([chart]
kind = custom
x_min = -1
x_max = 1
y_min = -1
y_max = 1
nx = 21
ny = 21
g11 = 1 + x^2
g12 = 0
g22 = 1
)");
  CHECK(c.make_chart().metric_at({0.5, 0}).xx == doctest::Approx(1.25));
  CHECK_THROWS_AS(parse_config_string("[chart]\nkind = custom\ng11 = 1 +\ng12 = 0\ng22 = 1\n").make_chart(), Error);

  const ExperimentConfig cyl = parse_config_string("[chart]\nkind = cylinder\nx_min = 0\nx_max = 6.283185307179586\n"
                                                   "y_min = -1\ny_max = 1\nnx = 32\nny = 11\n");
  CHECK(cyl.chart.periodic_x);
  CHECK(cyl.make_chart().periodic_x());
}

TEST_CASE("missing files") {
  try {
    load_config("/nonexistent/config.cfg");
    FAIL("loaded a missing file");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
}
