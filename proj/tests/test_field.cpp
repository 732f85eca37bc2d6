#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "busekit/field.hpp"
#include "doctest.h"

using namespace busekit;

namespace {

ScalarField ramp(const MetricChart& chart) {
  ScalarField f(GridGeometry::of(chart), FieldTag::Busemann, "ray r");
  for (int j = 0; j < f.ny(); ++j)
    for (int i = 0; i < f.nx(); ++i) {
      const Vec2 p = f.node(i, j);
      f.at(i, j) = 2 * p.x - p.y + 1.0 / 3.0;
    }
  return f;
}

}  // namespace

TEST_CASE("CSV round trip is bit exact") {
  const auto chart = MetricChart::half_plane({-1, 1, 0.5, 3}, 17, 11);
  ScalarField f = ramp(chart);
  f.at(3, 4) = std::nextafter(1.0, 2.0);
  f.at(5, 5) = -1e-300;
  f.set_valid(2, 7, false);
  std::stringstream ss;
  write_field_csv(f, ss);
  const ScalarField g = read_field_csv(ss);
  REQUIRE(g.geometry().same_grid(f.geometry()));
  CHECK(g.tag() == FieldTag::Busemann);
  CHECK(g.values() == f.values());
  CHECK(g.mask() == f.mask());
  CHECK_FALSE(g.valid(2, 7));

  std::stringstream again;
  write_field_csv(g, again);
  std::stringstream first;
  write_field_csv(f, first);
  CHECK(again.str() == first.str());
}

TEST_CASE("malformed CSV is rejected") {
  const auto chart = MetricChart::euclidean({0, 1, 0, 1}, 4, 3);
  std::stringstream ss;
  write_field_csv(ramp(chart), ss);
  const std::string good = ss.str();
  auto expect_data_error = [](const std::string& text) {
    std::istringstream is(text);
    try {
      read_field_csv(is);
      FAIL("accepted malformed CSV");
    } catch (const Error& e) {
      CHECK((e.code() == ErrorCode::Data || e.code() == ErrorCode::Io));
    }
  };
  expect_data_error("");
  expect_data_error("nx,ny\n4,3\n");
  expect_data_error(good.substr(0, good.size() / 2));
  std::string extra = good;
  extra.replace(extra.find("\n", extra.find("\n") + 1) + 1, 1, "x");
  expect_data_error(extra);
  CHECK_THROWS_AS(read_field_csv(std::string("/nonexistent/dir/f.csv")), Error);
}

TEST_CASE("PGM preview") {
  const auto chart = MetricChart::euclidean({0, 1, 0, 1}, 5, 4);
  ScalarField f = ramp(chart);
  f.set_valid(0, 0, false);
  const std::string path = "test_field_preview.pgm";
  write_field_pgm(f, path);
  std::ifstream is(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxv = 0;
  is >> magic >> w >> h >> maxv;
  is.get();
  CHECK(magic == "P5");
  CHECK(w == 5);
  CHECK(h == 4);
  CHECK(maxv == 255);
  std::string pixels((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  REQUIRE(pixels.size() == 20u);
  int lo = 255, hi = 0;
  for (unsigned char c : pixels) {
    lo = std::min<int>(lo, c);
    hi = std::max<int>(hi, c);
  }
  CHECK(hi == 255);
  CHECK(lo == 0);
  std::remove(path.c_str());
}

TEST_CASE("combine and difference oscillation") {
  const auto chart = MetricChart::euclidean({-1, 1, -1, 1}, 9, 9);
  ScalarField a = ramp(chart);
  ScalarField b = ramp(chart);
  for (double& v : b.values()) v += 0.75;
  b.set_valid(4, 4, false);
  const ScalarField d = combine(a, b, -1.0, FieldTag::Generic);
  CHECK_FALSE(d.valid(4, 4));
  CHECK(d.at(1, 1) == doctest::Approx(-0.75));
  CHECK(d.valid_count() == 80u);
  const auto osc = difference_oscillation(a, b);
  REQUIRE(osc.has_value());
  CHECK(*osc < 1e-12);

  ScalarField none = b;
  for (auto& m : none.mask()) m = 0;
  CHECK_FALSE(difference_oscillation(a, none).has_value());

  const auto other = MetricChart::euclidean({-1, 1, -1, 1}, 5, 5);
  CHECK_THROWS_AS(combine(a, ramp(other), 1.0, FieldTag::Generic), Error);
}

TEST_CASE("bilinear sampling respects the mask and periodicity") {
  const auto chart = MetricChart::euclidean({0, 2, 0, 2}, 5, 5);
  ScalarField f = ramp(chart);
  const auto s = f.sample({0.7, 1.3});
  REQUIRE(s.has_value());
  CHECK(*s == doctest::Approx(2 * 0.7 - 1.3 + 1.0 / 3.0));
  CHECK_FALSE(f.sample({2.5, 1.0}).has_value());
  f.set_valid(1, 2, false);
  CHECK_FALSE(f.sample({0.6, 1.1}).has_value());
  CHECK(f.sample({1.0, 1.5}).has_value());

  const double L = 2 * M_PI;
  const auto cyl = MetricChart::cylinder({0, L, -1, 1}, 16, 5);
  ScalarField c(GridGeometry::of(cyl), FieldTag::Generic);
  for (int j = 0; j < c.ny(); ++j)
    for (int i = 0; i < c.nx(); ++i) c.at(i, j) = std::cos(c.node(i, j).x);
  const double x = L - 0.5 * cyl.hx();
  const auto w = c.sample({x, 0});
  REQUIRE(w.has_value());
  CHECK(*w == doctest::Approx(std::cos(0.5 * cyl.hx())).epsilon(1e-2));
  CHECK(c.sample({x + L, 0}).has_value());
  CHECK(c.column(-1) == 15);
  const auto nn = c.nearest_node({L - 0.01, 0});
  REQUIRE(nn.has_value());
  CHECK(nn->first == 0);
}

TEST_CASE("summary statistics") {
  const auto chart = MetricChart::euclidean({0, 1, 0, 1}, 3, 3);
  ScalarField f(GridGeometry::of(chart), FieldTag::Generic);
  for (int k = 0; k < 9; ++k) f.values()[k] = k;
  f.set_valid(2, 2, false);
  f.set_valid(0, 0, false);
  CHECK(f.min_valid() == 1.0);
  CHECK(f.max_valid() == 7.0);
  CHECK(f.valid_fraction() == doctest::Approx(7.0 / 9.0));
  CHECK(parse_field_tag("barrier") == FieldTag::Barrier);
  CHECK(std::string(field_tag_name(FieldTag::Dl)) == "dl");
  CHECK_THROWS_AS(parse_field_tag("potato"), Error);
}
