#include <cmath>
#include <cstdio>
#include <string>

#include "busekit.h"
#include "doctest.h"

namespace {

const char* kConfig = R"([chart]
kind = euclidean
x_min = -26
x_max = 26
y_min = -2.5
y_max = 2.5
nx = 417
ny = 41

[objects]
line.a0 = 0 0 1 0 23
line.a1 = 0 0.5 1 0 23
line.b0 = 0 0 -1 0 23
ray.east = 0 0 1 0 23
source.origin = point 0 0

[solver]
schedule = 15 18 21
suites = distance

[outputs]
dir = /tmp
field_csv = capi_field.csv
)";

struct Config {
  bk_config* cfg = nullptr;
  Config() { REQUIRE(bk_config_parse(kConfig, &cfg) == BK_OK); }
  ~Config() { bk_config_free(cfg); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(bk_version()).size() > 0);
  CHECK(std::string(bk_status_name(BK_OK)) == "ok");
  CHECK(std::string(bk_status_name(BK_CONFIG)) == "config error");
  CHECK(std::string(bk_status_name(static_cast<bk_status>(99))).size() > 0);
}

TEST_CASE("argument and config errors") {
  bk_config* cfg = nullptr;
  CHECK(bk_config_parse(nullptr, &cfg) == BK_INVALID_ARGUMENT);
  CHECK(std::string(bk_last_error()).find("null") != std::string::npos);
  CHECK(bk_config_parse("[chart]\nshape = round\n", &cfg) == BK_CONFIG);
  CHECK(std::string(bk_last_error()).find("shape") != std::string::npos);
  CHECK(cfg == nullptr);
  CHECK(bk_config_load("/nonexistent.cfg", &cfg) == BK_CONFIG);

  // Freeing null handles is a no-op.
  bk_config_free(nullptr);
  bk_field_free(nullptr);
  bk_report_free(nullptr);

  Config c;
  bk_field* f = nullptr;
  CHECK(bk_busemann(c.cfg, "nowhere", &f) == BK_CONFIG);
  CHECK(std::string(bk_last_error()).find("nowhere") != std::string::npos);
  CHECK(bk_busemann(c.cfg, nullptr, nullptr) == BK_INVALID_ARGUMENT);
  bk_report* r = nullptr;
  CHECK(bk_relate(c.cfg, "a0", "a1", "perpendicular", &r) == BK_INVALID_ARGUMENT);
  CHECK(bk_horo(c.cfg, nullptr, &f) == BK_CONFIG);
}

TEST_CASE("fields through the C interface") {
  Config c;
  CHECK(std::string(bk_config_output(c.cfg, "field_csv")) == "/tmp/capi_field.csv");
  CHECK(std::string(bk_config_output(c.cfg, "pgm")).empty());

  bk_field* f = nullptr;
  REQUIRE(bk_busemann(c.cfg, "east", &f) == BK_OK);
  CHECK(bk_field_nx(f) == 417);
  CHECK(bk_field_ny(f) == 41);
  CHECK(std::string(bk_field_summary(f)).find("busemann") != std::string::npos);
  double v = 0;
  int valid = 0;
  REQUIRE(bk_field_value(f, 208, 20, &v, &valid) == BK_OK);
  CHECK(valid == 1);
  CHECK(std::abs(v) < 0.25);
  CHECK(bk_field_value(f, 417, 0, &v, &valid) == BK_INVALID_ARGUMENT);
  double lo = 0, hi = 0, frac = 0;
  REQUIRE(bk_field_range(f, &lo, &hi, &frac) == BK_OK);
  CHECK(lo < hi);
  CHECK(frac > 0.5);

  const std::string path = bk_config_output(c.cfg, "field_csv");
  REQUIRE(bk_field_write_csv(f, path.c_str()) == BK_OK);
  bk_field* g = nullptr;
  REQUIRE(bk_field_read_csv(path.c_str(), 0, &g) == BK_OK);
  for (int j = 0; j < bk_field_ny(f); j += 7)
    for (int i = 0; i < bk_field_nx(f); i += 13) {
      double a = 0, b = 0;
      int va = 0, vb = 0;
      bk_field_value(f, i, j, &a, &va);
      bk_field_value(g, i, j, &b, &vb);
      CHECK(va == vb);
      CHECK(a == b);
    }
  std::remove(path.c_str());
  CHECK(bk_field_write_csv(f, "/nonexistent/dir/f.csv") == BK_IO);
  CHECK(bk_field_read_csv("/nonexistent/f.csv", 0, &g) != BK_OK);
  bk_field_free(g);
  bk_field_free(f);

  REQUIRE(bk_distance(c.cfg, "origin", &f) == BK_OK);
  bk_field_value(f, 208 + 24, 20, &v, &valid);
  CHECK(v == doctest::Approx(3.0).epsilon(0.05));
  bk_field_free(f);

  REQUIRE(bk_singular(c.cfg, "east", &f) == BK_OK);
  REQUIRE(bk_field_range(f, &lo, &hi, &frac) == BK_OK);
  CHECK(hi == 0.0);
  bk_field_free(f);

  REQUIRE(bk_barrier(c.cfg, "a0", &f) == BK_OK);
  bk_field_value(f, 208, 20, &v, &valid);
  CHECK(std::abs(v) < 0.4);
  bk_field_free(f);
}

TEST_CASE("reports through the C interface") {
  Config c;
  bk_report* r = nullptr;
  REQUIRE(bk_relate(c.cfg, "a1", "a0", "equivalent", &r) == BK_OK);
  CHECK(bk_report_pass(r) == 1);
  CHECK(std::string(bk_report_text(r, 0)).find("holds: true") != std::string::npos);
  bk_report_free(r);

  REQUIRE(bk_relate(c.cfg, "b0", "a0", "precedes", &r) == BK_OK);
  CHECK(std::string(bk_report_text(r, 0)).find("holds: false") != std::string::npos);
  bk_report_free(r);

  REQUIRE(bk_classify(c.cfg, &r) == BK_OK);
  CHECK(std::string(bk_report_text(r, 0)).find("classes: 2") != std::string::npos);
  bk_report_free(r);

  REQUIRE(bk_verify(c.cfg, &r) == BK_OK);
  CHECK(bk_report_pass(r) == 1);
  CHECK(bk_report_count(r, "PASS") > 0u);
  CHECK(bk_report_count(r, "FAIL") == 0u);
  CHECK(bk_report_count(r, "bogus") == 0u);
  const std::string csv = bk_report_csv(r, 0);
  CHECK(csv.rfind("claim,", 0) == 0);
  CHECK(std::string(bk_report_text(r, 1)) != std::string(bk_report_text(r, 0)));
  bk_report_free(r);
}
