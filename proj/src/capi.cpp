#include "busekit.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "busekit/barrier.hpp"
#include "busekit/config.hpp"
#include "busekit/verify.hpp"

using namespace busekit;

struct bk_config {
  ExperimentConfig cfg;
  std::map<std::string, std::string> outputs;
};

struct bk_field {
  ScalarField field;
  std::string summary;
};

struct bk_report {
  SuiteReport suite;
  std::string body;  // free text for reports that are not suite runs
  bool pass = true;
  mutable std::string text_cache;
  mutable std::string csv_cache;
};

namespace {

thread_local std::string g_last_error;

bk_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config:
      return BK_CONFIG;
    case ErrorCode::Io:
      return BK_IO;
    case ErrorCode::Domain:
    case ErrorCode::Boundary:
      return BK_DOMAIN;
    case ErrorCode::Precondition:
    case ErrorCode::Validation:
      return BK_PRECONDITION;
    case ErrorCode::Data:
      return BK_DATA;
    case ErrorCode::Inconsistency:
    case ErrorCode::CorayValidation:
      return BK_INCONSISTENCY;
    case ErrorCode::Convergence:
    case ErrorCode::EmptyPath:
    case ErrorCode::InsufficientHorizon:
    case ErrorCode::Schedule:
    case ErrorCode::Coverage:
      return BK_NUMERICAL;
  }
  return BK_INTERNAL;
}

bk_status fail(bk_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
bk_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(status_of(e.code()), std::string(error_code_name(e.code())) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    return fail(BK_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BK_INTERNAL, e.what());
  }
}

#define BK_REQUIRE(cond, what) \
  if (!(cond)) return fail(BK_INVALID_ARGUMENT, what)

template <class Map>
std::string pick(const Map& m, const char* id, const char* kind) {
  if (id && *id) return id;
  if (m.empty()) throw Error(ErrorCode::Config, std::string("no ") + kind + " in [objects]");
  return m.begin()->first;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string range_text(const ScalarField& f) {
  if (f.valid_count() == 0) return "no valid nodes";
  return "range [" + fmt("%.6g", f.min_valid()) + ", " + fmt("%.6g", f.max_valid()) + "], valid fraction " +
         fmt("%.4f", f.valid_fraction());
}

std::string chart_text(const MetricChart& c) {
  return c.id() + " (h = " + fmt("%.6g", c.h()) + ")";
}

std::string convergence_text(const ConvergenceReport& r) {
  std::string s;
  for (const auto& st : r.steps) {
    s += "; t=" + fmt("%.6g", st.t) + " defect " + fmt("%.3g", st.max_defect);
  }
  s += "; masked " + fmt("%.4f", r.masked_fraction) + ", worst monotone violation " +
       fmt("%.3g", r.max_monotone_violation);
  return s;
}

BarrierField loose_barrier(const MetricChart& chart, const LineFields& lf, const ExperimentConfig& cfg) {
  return barrier_field(chart, lf, {INFINITY, INFINITY, cfg.solver.eikonal.margin_cells});
}

RelationOptions relation_options(const ExperimentConfig& cfg) {
  RelationOptions ro;
  if (cfg.solver.zero_tol) ro.zero_tol = *cfg.solver.zero_tol;
  ro.tol_slope = cfg.solver.tol_slope;
  ro.margin_cells = cfg.solver.eikonal.margin_cells;
  return ro;
}

bk_status emit(bk_field** out, ScalarField f, std::string summary) {
  *out = new bk_field{std::move(f), std::move(summary)};
  return BK_OK;
}

}  // namespace

extern "C" {

const char* bk_version(void) { return "1.0.0"; }

const char* bk_status_name(bk_status s) {
  switch (s) {
    case BK_OK:
      return "ok";
    case BK_INVALID_ARGUMENT:
      return "invalid argument";
    case BK_CONFIG:
      return "config error";
    case BK_IO:
      return "io error";
    case BK_DOMAIN:
      return "domain error";
    case BK_PRECONDITION:
      return "precondition error";
    case BK_NUMERICAL:
      return "numerical error";
    case BK_DATA:
      return "data error";
    case BK_INCONSISTENCY:
      return "inconsistency";
    case BK_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* bk_last_error(void) { return g_last_error.c_str(); }

// ---------------------------------------------------------------- configs

static bk_status wrap_config(ExperimentConfig cfg, bk_config** out) {
  auto* c = new bk_config{std::move(cfg), {}};
  const OutputSettings& o = c->cfg.outputs;
  for (const auto& [k, v] : {std::pair<const char*, const std::string*>{"field_csv", &o.field_csv},
                             {"pgm", &o.pgm},
                             {"report", &o.report},
                             {"report_csv", &o.report_csv},
                             {"path_csv", &o.path_csv}})
    c->outputs[k] = c->cfg.output_path(*v);
  *out = c;
  return BK_OK;
}

bk_status bk_config_load(const char* path, bk_config** out) {
  BK_REQUIRE(path && out, "bk_config_load: null argument");
  return guarded([&] { return wrap_config(load_config(path), out); });
}

bk_status bk_config_parse(const char* text, bk_config** out) {
  BK_REQUIRE(text && out, "bk_config_parse: null argument");
  return guarded([&] { return wrap_config(parse_config_string(text), out); });
}

void bk_config_free(bk_config* config) { delete config; }

const char* bk_config_output(const bk_config* config, const char* key) {
  if (!config || !key) return "";
  const auto it = config->outputs.find(key);
  return it == config->outputs.end() ? "" : it->second.c_str();
}

// ---------------------------------------------------------------- fields

bk_status bk_distance(const bk_config* config, const char* source_id, bk_field** out) {
  BK_REQUIRE(config && out, "bk_distance: null argument");
  return guarded([&] {
    const ExperimentConfig& cfg = config->cfg;
    const std::string id = pick(cfg.sources, source_id, "source");
    const MetricChart chart = cfg.make_chart();
    SolveStats stats;
    ScalarField f = solve_distance(chart, cfg.source(chart, id), cfg.solver.eikonal, &stats);
    std::string s = "distance from source " + id + " on " + chart_text(chart) + ": " + range_text(f) + "; " +
                    std::to_string(stats.sweeps) + " sweeps";
    return emit(out, std::move(f), std::move(s));
  });
}

bk_status bk_busemann(const bk_config* config, const char* ray_id, bk_field** out) {
  BK_REQUIRE(config && out, "bk_busemann: null argument");
  return guarded([&] {
    const ExperimentConfig& cfg = config->cfg;
    const std::string id = pick(cfg.rays, ray_id, "ray");
    const MetricChart chart = cfg.make_chart();
    LimitField lf = busemann_field(chart, cfg.ray(chart, id), cfg.schedule(chart), cfg.busemann_options());
    std::string s = "busemann field of ray " + id + " on " + chart_text(chart) + ": " + range_text(lf.field) +
                    convergence_text(lf.report);
    return emit(out, std::move(lf.field), std::move(s));
  });
}

bk_status bk_horo(const bk_config* config, const char* horo_id, bk_field** out) {
  BK_REQUIRE(config && out, "bk_horo: null argument");
  return guarded([&] {
    const ExperimentConfig& cfg = config->cfg;
    const std::string id = pick(cfg.horos, horo_id, "horo object");
    const MetricChart chart = cfg.make_chart();
    const HoroObject h = cfg.horo(chart, id);
    LimitField lf = horofunction_field(chart, h.points, h.base, cfg.cauchy_tol(chart), cfg.busemann_options());
    std::string s = "horofunction " + id + " (" + std::to_string(h.points.size()) + " points) on " +
                    chart_text(chart) + ": " + range_text(lf.field) + convergence_text(lf.report);
    return emit(out, std::move(lf.field), std::move(s));
  });
}

bk_status bk_dl(const bk_config* config, const char* dl_id, bk_field** out) {
  BK_REQUIRE(config && out, "bk_dl: null argument");
  return guarded([&] {
    const ExperimentConfig& cfg = config->cfg;
    const std::string id = pick(cfg.dls, dl_id, "dl object");
    const MetricChart chart = cfg.make_chart();
    LimitField lf = dl_field(chart, cfg.dl_sets(chart, id), cfg.dls.at(id).base, cfg.cauchy_tol(chart),
                             cfg.busemann_options());
    std::string s = "dl-function " + id + " on " + chart_text(chart) + ": " + range_text(lf.field) +
                    convergence_text(lf.report);
    return emit(out, std::move(lf.field), std::move(s));
  });
}

bk_status bk_barrier(const bk_config* config, const char* line_id, bk_field** out) {
  BK_REQUIRE(config && out, "bk_barrier: null argument");
  return guarded([&] {
    const ExperimentConfig& cfg = config->cfg;
    const std::string id = pick(cfg.lines, line_id, "line");
    const MetricChart chart = cfg.make_chart();
    const LineFields lf =
        compute_line_fields(chart, cfg.line(chart, id), {cfg.busemann_options(), cfg.schedule(chart)}, id);
    BarrierField bf = loose_barrier(chart, lf, cfg);
    std::string s = "barrier of line " + id + " on " + chart_text(chart) + ": " + range_text(bf.field) +
                    "; min " + fmt("%.3g", bf.min_value) + ", max on line " + fmt("%.3g", bf.max_on_line) +
                    "; halves masked " + fmt("%.4f", lf.plus.report.masked_fraction) + " / " +
                    fmt("%.4f", lf.minus.report.masked_fraction);
    return emit(out, std::move(bf.field), std::move(s));
  });
}

bk_status bk_singular(const bk_config* config, const char* ray_id, bk_field** out) {
  BK_REQUIRE(config && out, "bk_singular: null argument");
  return guarded([&] {
    const ExperimentConfig& cfg = config->cfg;
    const std::string id = pick(cfg.rays, ray_id, "ray");
    const MetricChart chart = cfg.make_chart();
    const LimitField lf = busemann_field(chart, cfg.ray(chart, id), cfg.schedule(chart), cfg.busemann_options());
    const SingularMask m = singular_set(chart, lf.field, {cfg.solver.jump_threshold, cfg.solver.tol_grad});
    ScalarField f(lf.field.geometry(), FieldTag::Generic, "singular mask of ray " + id);
    double widest = 0.0;
    for (int j = 0; j < f.ny(); ++j)
      for (int i = 0; i < f.nx(); ++i) {
        f.at(i, j) = m.at(i, j) ? 1.0 : 0.0;
        f.set_valid(i, j, lf.field.valid(i, j));
        if (m.at(i, j)) widest = std::max(widest, m.diameter_at(i, j));
      }
    std::string s = "singular set of ray " + id + " on " + chart_text(chart) + ": " + std::to_string(m.count()) +
                    " marked nodes, widest gradient jump " + fmt("%.3g", widest) + ", threshold " +
                    fmt("%.3g", cfg.solver.jump_threshold) + "; valid fraction " +
                    fmt("%.4f", lf.field.valid_fraction());
    return emit(out, std::move(f), std::move(s));
  });
}

void bk_field_free(bk_field* field) { delete field; }

const char* bk_field_summary(const bk_field* field) { return field ? field->summary.c_str() : ""; }

int bk_field_nx(const bk_field* field) { return field ? field->field.nx() : 0; }

int bk_field_ny(const bk_field* field) { return field ? field->field.ny() : 0; }

bk_status bk_field_value(const bk_field* field, int i, int j, double* value, int* valid) {
  BK_REQUIRE(field && value && valid, "bk_field_value: null argument");
  const ScalarField& f = field->field;
  BK_REQUIRE(i >= 0 && j >= 0 && i < f.nx() && j < f.ny(), "bk_field_value: node index out of range");
  *value = f.at(i, j);
  *valid = f.valid(i, j) ? 1 : 0;
  return BK_OK;
}

bk_status bk_field_range(const bk_field* field, double* min, double* max, double* valid_fraction) {
  BK_REQUIRE(field && min && max && valid_fraction, "bk_field_range: null argument");
  return guarded([&] {
    const ScalarField& f = field->field;
    *valid_fraction = f.valid_fraction();
    if (f.valid_count() == 0) return fail(BK_DATA, "bk_field_range: field has no valid nodes");
    *min = f.min_valid();
    *max = f.max_valid();
    return BK_OK;
  });
}

bk_status bk_field_write_csv(const bk_field* field, const char* path) {
  BK_REQUIRE(field && path, "bk_field_write_csv: null argument");
  return guarded([&] {
    write_field_csv(field->field, std::string(path));
    return BK_OK;
  });
}

bk_status bk_field_read_csv(const char* path, int periodic_x, bk_field** out) {
  BK_REQUIRE(path && out, "bk_field_read_csv: null argument");
  return guarded([&] {
    ScalarField f = read_field_csv(std::string(path), periodic_x != 0);
    std::string s = std::string(field_tag_name(f.tag())) + " field read from " + path + ": " + range_text(f);
    return emit(out, std::move(f), std::move(s));
  });
}

bk_status bk_field_write_pgm(const bk_field* field, const char* path) {
  BK_REQUIRE(field && path, "bk_field_write_pgm: null argument");
  return guarded([&] {
    write_field_pgm(field->field, path);
    return BK_OK;
  });
}

bk_status bk_path_write_csv(const bk_config* config, const char* object_id, const char* path) {
  BK_REQUIRE(config && object_id && path, "bk_path_write_csv: null argument");
  return guarded([&] {
    const ExperimentConfig& cfg = config->cfg;
    const MetricChart chart = cfg.make_chart();
    const std::string id = object_id;
    if (cfg.rays.count(id)) {
      write_path_csv(chart, integrate_ray(chart, cfg.ray(chart, id), cfg.solver.dt), path);
    } else if (cfg.lines.count(id)) {
      const LineSpec l = cfg.line(chart, id);
      write_path_csv(chart,
                     join_halves(integrate_ray(chart, l.plus, cfg.solver.dt), integrate_ray(chart, l.minus, cfg.solver.dt)),
                     path);
    } else {
      return fail(BK_CONFIG, "no ray or line '" + id + "' in [objects]");
    }
    return BK_OK;
  });
}

// ---------------------------------------------------------------- reports

bk_status bk_relate(const bk_config* config, const char* candidate_id, const char* reference_id,
                    const char* relation, bk_report** out) {
  BK_REQUIRE(config && candidate_id && reference_id && relation && out, "bk_relate: null argument");
  const std::string rel = relation;
  BK_REQUIRE(rel == "precedes" || rel == "equivalent", "bk_relate: relation must be 'precedes' or 'equivalent'");
  return guarded([&] {
    const ExperimentConfig& cfg = config->cfg;
    const MetricChart chart = cfg.make_chart();
    const LineFieldOptions lo{cfg.busemann_options(), cfg.schedule(chart)};
    const LineFields a = compute_line_fields(chart, cfg.line(chart, candidate_id), lo, candidate_id);
    const LineFields b = compute_line_fields(chart, cfg.line(chart, reference_id), lo, reference_id);
    const BarrierField bb = loose_barrier(chart, b, cfg);
    RelationVerdict v;
    if (rel == "precedes") {
      v = precedes(chart, a, b, bb, relation_options(cfg));
    } else {
      v = equivalent(chart, a, loose_barrier(chart, a, cfg), b, bb, relation_options(cfg));
    }
    std::ostringstream os;
    os << v;
    auto* r = new bk_report;
    r->body = os.str();
    // a relation that does not hold is an answer; disagreeing routes are not
    r->pass = v.routes_agree;
    *out = r;
    return BK_OK;
  });
}

bk_status bk_classify(const bk_config* config, bk_report** out) {
  BK_REQUIRE(config && out, "bk_classify: null argument");
  return guarded([&] {
    const ExperimentConfig& cfg = config->cfg;
    if (cfg.lines.size() < 2) return fail(BK_CONFIG, "classify needs at least two lines in [objects]");
    const MetricChart chart = cfg.make_chart();
    const LineFieldOptions lo{cfg.busemann_options(), cfg.schedule(chart)};
    std::vector<std::string> ids;
    std::vector<LineFields> lfs;
    std::vector<BarrierField> bfs;
    for (const auto& [id, obj] : cfg.lines) {
      (void)obj;
      ids.push_back(id);
      lfs.push_back(compute_line_fields(chart, cfg.line(chart, id), lo, id));
      bfs.push_back(loose_barrier(chart, lfs.back(), cfg));
    }
    const std::size_t n = ids.size();
    std::vector<std::vector<bool>> eq(n, std::vector<bool>(n, false));
    bool agree = true;
    std::ostringstream os;
    for (std::size_t i = 0; i < n; ++i) {
      eq[i][i] = true;
      for (std::size_t j = i + 1; j < n; ++j) {
        const RelationVerdict v = equivalent(chart, lfs[i], bfs[i], lfs[j], bfs[j], relation_options(cfg));
        eq[i][j] = eq[j][i] = v.holds;
        agree = agree && v.routes_agree;
        os << "pair " << ids[i] << " " << ids[j] << ": " << (v.holds ? "equivalent" : "distinct")
           << (v.routes_agree ? "" : " (routes disagree)") << "\n";
      }
    }
    const auto classes = classify(eq);
    os << "classes: " << classes.size() << "\n";
    for (const auto& cl : classes) {
      os << "class:";
      for (std::size_t k : cl) os << " " << ids[k];
      os << "\n";
    }
    auto* r = new bk_report;
    r->body = os.str();
    r->pass = agree;
    *out = r;
    return BK_OK;
  });
}

bk_status bk_verify(const bk_config* config, bk_report** out) {
  BK_REQUIRE(config && out, "bk_verify: null argument");
  return guarded([&] {
    auto* r = new bk_report;
    r->suite = run_suite(config->cfg);
    r->pass = r->suite.pass();
    *out = r;
    return BK_OK;
  });
}

void bk_report_free(bk_report* report) { delete report; }

int bk_report_pass(const bk_report* report) { return report && report->pass ? 1 : 0; }

size_t bk_report_count(const bk_report* report, const char* outcome) {
  if (!report || !outcome) return 0;
  for (Outcome o : {Outcome::Pass, Outcome::Fail, Outcome::Error, Outcome::Info, Outcome::Skip})
    if (std::string(outcome_name(o)) == outcome) return report->suite.count(o);
  return 0;
}

const char* bk_report_text(const bk_report* report, int with_runtime) {
  if (!report) return "";
  report->text_cache = report->suite.records.empty() ? report->body : report->suite.text(with_runtime != 0);
  return report->text_cache.c_str();
}

const char* bk_report_csv(const bk_report* report, int with_runtime) {
  if (!report) return "";
  report->csv_cache = report->suite.csv(with_runtime != 0);
  return report->csv_cache.c_str();
}

}  // extern "C"
