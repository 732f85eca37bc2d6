#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "busekit/config.hpp"

namespace busekit {

enum class Outcome { Pass, Fail, Error, Info, Skip };
const char* outcome_name(Outcome o);

// Tolerance policy attached to a claim; scaled by the grid spacing h unless
// `absolute` is set.
struct TolerancePolicy {
  double value = 0.0;
  bool absolute = false;
  std::string text;
};

struct Claim {
  std::string id;
  std::string suite;
  std::string statement;
  TolerancePolicy policy;
};

// Built-in claim registry, loaded from the table in verify.cpp.
const std::vector<Claim>& claim_registry();
const Claim& find_claim(const std::string& id);

struct CheckRecord {
  std::string claim;
  std::string check;  // object or sub-check the measurement refers to
  std::string chart;
  std::string resolution;
  Outcome outcome = Outcome::Skip;
  double measured = 0.0;
  double tolerance = 0.0;
  double runtime = 0.0;  // seconds
  std::string detail;
};

struct SuiteReport {
  std::vector<CheckRecord> records;

  // Every record is Pass, Info or Skip and no registry claim is missing.
  bool pass() const;
  std::size_t count(Outcome o) const;
  bool has_error() const { return count(Outcome::Error) > 0; }
  std::vector<std::string> missing_claims() const;

  void write_text(std::ostream& os, bool with_runtime = true) const;
  void write_csv(std::ostream& os, bool with_runtime = true) const;
  std::string text(bool with_runtime = true) const;
  std::string csv(bool with_runtime = true) const;
};

/// Runs every enabled suite of the config on its chart and returns one
/// record per claim and object. Numerical breakdowns are recorded as Error,
/// claim violations as Fail. Sampling is seeded from the config.
SuiteReport run_suite(const ExperimentConfig& config);

// Adds +amplitude on a checkerboard of the interior valid nodes.
ScalarField corrupt_field(const ScalarField& field, double amplitude = 0.5);

// Sampled |u(p) - u(q)| <= d(p, q) + tol over all valid q, for `anchors`
// seeded anchor nodes p. Returns the worst excess over d(p, q).
VerdictReport lipschitz_check(const MetricChart& chart, const ScalarField& field, int anchors, unsigned seed,
                              double tol, const EikonalOptions& eikonal = {});

}  // namespace busekit
