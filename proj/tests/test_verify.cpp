#include <set>
#include <sstream>

#include "busekit/verify.hpp"
#include "doctest.h"

using namespace busekit;

namespace {

const std::string kStrip = R"([chart]
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
ray.west = 0 0 -1 0 23
horo.east = ray east
dl.lines = base 0 0 ; vline 15 ; vline 18 ; vline 21
source.origin = point 0 0

[solver]
region = -4 4 -1 1
foliation_cells = 6
)";

const SuiteReport& clean_report() {
  static const SuiteReport r = run_suite(parse_config_string(kStrip + "schedule = 15 18 21\n"));
  return r;
}

const CheckRecord* find(const SuiteReport& r, const std::string& claim, const std::string& check) {
  for (const auto& rec : r.records)
    if (rec.claim == claim && rec.check == check) return &rec;
  return nullptr;
}

}  // namespace

TEST_CASE("claim registry") {
  std::set<std::string> ids;
  for (const auto& c : claim_registry()) {
    CHECK(ids.insert(c.id).second);
    CHECK_FALSE(c.statement.empty());
    CHECK_FALSE(c.suite.empty());
  }
  CHECK(ids.size() >= 30u);
  CHECK(find_claim("barrier.nonnegative").policy.value == 3);
  CHECK_FALSE(find_claim("barrier.nonnegative").policy.absolute);
  CHECK_THROWS_AS(find_claim("no.such.claim"), Error);
}

TEST_CASE("euclidean strip passes every claim") {
  const SuiteReport& r = clean_report();
  for (const auto& rec : r.records)
    CHECK_MESSAGE((rec.outcome != Outcome::Fail && rec.outcome != Outcome::Error),
                  rec.claim << " [" << rec.check << "] " << rec.detail);
  CHECK(r.pass());
  CHECK(r.missing_claims().empty());
  CHECK(r.count(Outcome::Pass) > 40u);
  const CheckRecord* eq = find(r, "relation.classes", "family");
  REQUIRE(eq != nullptr);
  CHECK(eq->detail == "a0 a1 | b0");
}

TEST_CASE("reports are deterministic without runtimes") {
  const SuiteReport again = run_suite(parse_config_string(kStrip + "schedule = 15 18 21\n"));
  CHECK(again.text(false) == clean_report().text(false));
  CHECK(again.csv(false) == clean_report().csv(false));
  std::istringstream is(again.csv(false));
  std::string header;
  std::getline(is, header);
  CHECK(header.rfind("claim,", 0) == 0);
  CHECK(header.find("runtime") == std::string::npos);
  CHECK(clean_report().csv(true).find("runtime") != std::string::npos);
}

TEST_CASE("corrupted fields fail the residual and Lipschitz claims") {
  const SuiteReport r = run_suite(parse_config_string(kStrip + "schedule = 15 18 21\ncorrupt = true\n"));
  CHECK_FALSE(r.pass());
  const CheckRecord* res = find(r, "field.viscosity", "corrupted ray east");
  const CheckRecord* lip = find(r, "field.lipschitz", "corrupted ray east");
  REQUIRE(res != nullptr);
  REQUIRE(lip != nullptr);
  CHECK(res->outcome == Outcome::Fail);
  CHECK(lip->outcome == Outcome::Fail);
  CHECK(r.count(Outcome::Error) == 0u);
  CHECK(r.count(Outcome::Fail) == 2u);
}

TEST_CASE("numerical breakdowns are errors, not failures") {
  // The last truncation point lies outside the chart.
  const SuiteReport r = run_suite(parse_config_string(kStrip + "schedule = 15 18 27\n"));
  CHECK(r.has_error());
  CHECK_FALSE(r.pass());
  const CheckRecord* mono = find(r, "busemann.monotone", "ray east");
  REQUIRE(mono != nullptr);
  CHECK(mono->outcome == Outcome::Error);
  CHECK(mono->detail.find("schedule") != std::string::npos);
}

TEST_CASE("suite selection") {
  const SuiteReport r = run_suite(parse_config_string(kStrip + "schedule = 15 18 21\nsuites = distance\n"));
  CHECK(r.pass());
  for (const auto& rec : r.records)
    if (rec.claim.rfind("barrier.", 0) == 0) CHECK(rec.outcome == Outcome::Skip);
}

TEST_CASE("corrupt_field and lipschitz_check") {
  const auto chart = MetricChart::euclidean({-2, 2, -2, 2}, 41, 41);
  ScalarField f(GridGeometry::of(chart), FieldTag::Busemann);
  for (int j = 0; j < f.ny(); ++j)
    for (int i = 0; i < f.nx(); ++i) f.at(i, j) = -f.node(i, j).x;
  const VerdictReport ok = lipschitz_check(chart, f, 2, 7, 3 * chart.h());
  CHECK(ok.pass);
  const ScalarField bad = corrupt_field(f);
  CHECK(bad.at(2, 2) == doctest::Approx(f.at(2, 2) + 0.5));
  CHECK(bad.at(3, 2) == f.at(3, 2));
  CHECK(bad.at(0, 0) == f.at(0, 0));
  const VerdictReport v = lipschitz_check(chart, bad, 2, 7, 3 * chart.h());
  CHECK_FALSE(v.pass);
  CHECK(v.violation == doctest::Approx(0.5).epsilon(0.05));
}
