// busekit: command-line front end over the C interface.
//
// Exit status: 0 success, 1 FAIL verdicts, 2 usage or config errors,
// 3 solver errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "busekit.h"

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kSolver = 3 };

int exit_for(bk_status s) {
  switch (s) {
    case BK_OK:
      return kOk;
    case BK_CONFIG:
    case BK_INVALID_ARGUMENT:
    case BK_IO:
      return kUsage;
    default:
      return kSolver;
  }
}

int report_error(const char* op, bk_status s) {
  std::cerr << "busekit " << op << ": " << bk_last_error() << "\n";
  return exit_for(s);
}

struct ConfigDeleter {
  void operator()(bk_config* c) const { bk_config_free(c); }
};
struct FieldDeleter {
  void operator()(bk_field* f) const { bk_field_free(f); }
};
struct ReportDeleter {
  void operator()(bk_report* r) const { bk_report_free(r); }
};
using ConfigPtr = std::unique_ptr<bk_config, ConfigDeleter>;
using FieldPtr = std::unique_ptr<bk_field, FieldDeleter>;
using ReportPtr = std::unique_ptr<bk_report, ReportDeleter>;

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  return static_cast<bool>(os);
}

struct Options {
  std::string config;
  std::string object;
  std::string out;
  std::string pgm;
  std::string candidate;
  std::string reference;
  std::string relation = "equivalent";
  std::string report;
  std::string report_csv;
  std::string in;
  std::string path_csv;
  bool periodic = false;
  bool no_runtime = false;
};

int load(const Options& o, ConfigPtr& cfg) {
  bk_config* c = nullptr;
  const bk_status s = bk_config_load(o.config.c_str(), &c);
  if (s != BK_OK) return report_error("config", s);
  cfg.reset(c);
  return kOk;
}

std::string pick(const std::string& flag, const bk_config* cfg, const char* key) {
  return flag.empty() ? bk_config_output(cfg, key) : flag;
}

using FieldOp = bk_status (*)(const bk_config*, const char*, bk_field**);

int run_field(const char* name, FieldOp op, const Options& o) {
  ConfigPtr cfg;
  if (int rc = load(o, cfg)) return rc;
  bk_field* raw = nullptr;
  const bk_status s = op(cfg.get(), o.object.empty() ? nullptr : o.object.c_str(), &raw);
  if (s != BK_OK) return report_error(name, s);
  FieldPtr f(raw);
  std::cout << bk_field_summary(f.get()) << "\n";
  const std::string csv = pick(o.out, cfg.get(), "field_csv");
  if (!csv.empty()) {
    if (bk_status w = bk_field_write_csv(f.get(), csv.c_str()); w != BK_OK) return report_error(name, w);
    std::cout << "wrote " << csv << "\n";
  }
  const std::string pgm = pick(o.pgm, cfg.get(), "pgm");
  if (!pgm.empty()) {
    if (bk_status w = bk_field_write_pgm(f.get(), pgm.c_str()); w != BK_OK) return report_error(name, w);
    std::cout << "wrote " << pgm << "\n";
  }
  return kOk;
}

int finish_report(const char* name, const bk_report* r, const bk_config* cfg, const Options& o, bool suite) {
  const int rt = o.no_runtime ? 0 : 1;
  // Only suite runs default to the configured report files.
  const std::string text_path = suite ? pick(o.report, cfg, "report") : std::string();
  const std::string csv_path = suite ? pick(o.report_csv, cfg, "report_csv") : std::string();
  if (text_path.empty() || !suite) std::cout << bk_report_text(r, rt);
  if (!text_path.empty()) {
    if (!write_file(text_path, bk_report_text(r, rt))) {
      std::cerr << "busekit " << name << ": cannot write " << text_path << "\n";
      return kUsage;
    }
    std::cout << "wrote " << text_path << "\n";
  }
  if (!csv_path.empty()) {
    if (!write_file(csv_path, bk_report_csv(r, rt))) {
      std::cerr << "busekit " << name << ": cannot write " << csv_path << "\n";
      return kUsage;
    }
    std::cout << "wrote " << csv_path << "\n";
  }
  if (suite) {
    std::printf("%zu pass, %zu fail, %zu error, %zu info, %zu skip; overall %s\n", bk_report_count(r, "PASS"),
                bk_report_count(r, "FAIL"), bk_report_count(r, "ERROR"), bk_report_count(r, "INFO"),
                bk_report_count(r, "SKIP"), bk_report_pass(r) ? "PASS" : "FAIL");
    if (bk_report_count(r, "ERROR") > 0) return kSolver;
  }
  return bk_report_pass(r) ? kOk : kFail;
}

int run_relate(const Options& o) {
  ConfigPtr cfg;
  if (int rc = load(o, cfg)) return rc;
  bk_report* raw = nullptr;
  const bk_status s =
      bk_relate(cfg.get(), o.candidate.c_str(), o.reference.c_str(), o.relation.c_str(), &raw);
  if (s != BK_OK) return report_error("relate", s);
  ReportPtr r(raw);
  return finish_report("relate", r.get(), cfg.get(), o, false);
}

int run_classify(const Options& o) {
  ConfigPtr cfg;
  if (int rc = load(o, cfg)) return rc;
  bk_report* raw = nullptr;
  if (bk_status s = bk_classify(cfg.get(), &raw); s != BK_OK) return report_error("classify", s);
  ReportPtr r(raw);
  return finish_report("classify", r.get(), cfg.get(), o, false);
}

int run_verify(const Options& o) {
  ConfigPtr cfg;
  if (int rc = load(o, cfg)) return rc;
  bk_report* raw = nullptr;
  if (bk_status s = bk_verify(cfg.get(), &raw); s != BK_OK) return report_error("verify", s);
  ReportPtr r(raw);
  return finish_report("verify", r.get(), cfg.get(), o, true);
}

// Re-serializes a field CSV, writes a PGM preview, or writes the path CSV of
// a configured ray or line.
int run_export(const Options& o) {
  if (!o.in.empty()) {
    bk_field* raw = nullptr;
    if (bk_status s = bk_field_read_csv(o.in.c_str(), o.periodic ? 1 : 0, &raw); s != BK_OK)
      return report_error("export", s);
    FieldPtr f(raw);
    std::cout << bk_field_summary(f.get()) << "\n";
    if (!o.out.empty()) {
      if (bk_status s = bk_field_write_csv(f.get(), o.out.c_str()); s != BK_OK) return report_error("export", s);
      std::cout << "wrote " << o.out << "\n";
    }
    if (!o.pgm.empty()) {
      if (bk_status s = bk_field_write_pgm(f.get(), o.pgm.c_str()); s != BK_OK) return report_error("export", s);
      std::cout << "wrote " << o.pgm << "\n";
    }
    return kOk;
  }
  ConfigPtr cfg;
  if (int rc = load(o, cfg)) return rc;
  const std::string path = pick(o.path_csv, cfg.get(), "path_csv");
  if (o.object.empty() || path.empty()) {
    std::cerr << "busekit export: give --in, or --config with --object and a path CSV destination\n";
    return kUsage;
  }
  if (bk_status s = bk_path_write_csv(cfg.get(), o.object.c_str(), path.c_str()); s != BK_OK)
    return report_error("export", s);
  std::cout << "wrote " << path << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance, Busemann, horo-, dl- and barrier functions on 2-D metric charts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bk_version()));
  Options o;

  auto add_config = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--config", o.config, "experiment config file")->check(CLI::ExistingFile);
    if (required) opt->required();
  };
  auto add_outputs = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "field CSV destination (default [outputs] field_csv)");
    sub->add_option("--pgm", o.pgm, "PGM preview destination (default [outputs] pgm)");
  };

  auto* distance = app.add_subcommand("distance", "distance field from a source set");
  add_config(distance);
  distance->add_option("--source", o.object, "source id (default: first source)");
  add_outputs(distance);

  auto* busemann = app.add_subcommand("busemann", "Busemann function of a ray");
  add_config(busemann);
  busemann->add_option("--ray", o.object, "ray id (default: first ray)");
  add_outputs(busemann);

  auto* horo = app.add_subcommand("horo", "horofunction of a sequence of escaping points");
  add_config(horo);
  horo->add_option("--horo", o.object, "horo object id (default: first)");
  add_outputs(horo);

  auto* dl = app.add_subcommand("dl", "dl-function of a nested family of sets");
  add_config(dl);
  dl->add_option("--dl", o.object, "dl object id (default: first)");
  add_outputs(dl);

  auto* barrier = app.add_subcommand("barrier", "barrier function of a line");
  add_config(barrier);
  barrier->add_option("--line", o.object, "line id (default: first line)");
  add_outputs(barrier);

  auto* singular = app.add_subcommand("singular", "singular set of a ray's Busemann function");
  add_config(singular);
  singular->add_option("--ray", o.object, "ray id (default: first ray)");
  add_outputs(singular);

  auto* relate = app.add_subcommand("relate", "decide precedence or equivalence of two lines");
  add_config(relate);
  relate->add_option("--candidate", o.candidate, "candidate line id")->required();
  relate->add_option("--reference", o.reference, "reference line id")->required();
  relate->add_option("--relation", o.relation, "precedes or equivalent")
      ->check(CLI::IsMember({"precedes", "equivalent"}))
      ->capture_default_str();

  auto* classify = app.add_subcommand("classify", "equivalence classes of the configured lines");
  add_config(classify);

  auto* verify = app.add_subcommand("verify", "run the enabled verification suites");
  add_config(verify);
  verify->add_option("--report", o.report, "text report destination (default [outputs] report)");
  verify->add_option("--csv", o.report_csv, "CSV report destination (default [outputs] report_csv)");
  verify->add_flag("--no-runtime", o.no_runtime, "omit runtime fields from the reports");

  auto* exp = app.add_subcommand("export", "re-serialize or preview a field CSV, or write a path CSV");
  add_config(exp, false);
  exp->add_option("--in", o.in, "field CSV to read")->check(CLI::ExistingFile);
  exp->add_flag("--periodic", o.periodic, "the CSV grid wraps in x");
  exp->add_option("--object", o.object, "ray or line id for a path CSV");
  exp->add_option("--path-csv", o.path_csv, "path CSV destination (default [outputs] path_csv)");
  add_outputs(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (distance->parsed()) return run_field("distance", bk_distance, o);
  if (busemann->parsed()) return run_field("busemann", bk_busemann, o);
  if (horo->parsed()) return run_field("horo", bk_horo, o);
  if (dl->parsed()) return run_field("dl", bk_dl, o);
  if (barrier->parsed()) return run_field("barrier", bk_barrier, o);
  if (singular->parsed()) return run_field("singular", bk_singular, o);
  if (relate->parsed()) return run_relate(o);
  if (classify->parsed()) return run_classify(o);
  if (verify->parsed()) return run_verify(o);
  if (exp->parsed()) {
    if (o.in.empty() && o.config.empty()) {
      std::cerr << "busekit export: give --in or --config\n";
      return kUsage;
    }
    return run_export(o);
  }
  return kUsage;
}
