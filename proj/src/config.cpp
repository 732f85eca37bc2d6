#include "busekit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace busekit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::vector<std::string> split_items(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ';') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
  return out;
}

class Parser {
 public:
  Parser(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::ostringstream os;
    os << origin_;
    if (line_ > 0) os << ":" << line_;
    os << ": " << (key.empty() ? "" : "key '" + key + "': ") << msg;
    throw Error(ErrorCode::Config, os.str());
  }

  double number(const std::string& key, const std::string& text) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      fail(key, "expected a number, got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) fail(key, "expected a number, got '" + text + "'");
    return v;
  }

  std::vector<double> numbers(const std::string& key, const std::string& text, std::size_t expect = 0) const {
    std::vector<double> out;
    for (const auto& w : split_ws(text)) out.push_back(number(key, w));
    if (expect && out.size() != expect) fail(key, "expected " + std::to_string(expect) + " numbers");
    return out;
  }

  int integer(const std::string& key, const std::string& text) const {
    const double v = number(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(key, "expected an integer, got '" + text + "'");
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key, const std::string& text) const {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(key, "expected true or false, got '" + text + "'");
  }

  double positive(const std::string& key, const std::string& text) const {
    const double v = number(key, text);
    if (!(v > 0.0)) fail(key, "must be positive");
    return v;
  }

  Rect rect(const std::string& key, const std::string& text) const {
    const auto v = numbers(key, text, 4);
    if (!(v[0] < v[1] && v[2] < v[3])) fail(key, "expected x_min x_max y_min y_max with min < max");
    return {v[0], v[1], v[2], v[3]};
  }

  RayObject ray(const std::string& key, const std::string& text) const {
    const auto v = numbers(key, text, 5);
    if (v[2] == 0.0 && v[3] == 0.0) fail(key, "direction must be non-zero");
    if (!(v[4] > 0.0)) fail(key, "horizon must be positive");
    return {{v[0], v[1]}, {v[2], v[3]}, v[4]};
  }

  SetItem set_item(const std::string& key, const std::string& item) const {
    const auto w = split_ws(item);
    const std::string kind = w.empty() ? "" : w[0];
    auto args = [&](std::size_t n) {
      if (w.size() != n + 1) fail(key, "'" + kind + "' takes " + std::to_string(n) + " numbers");
      std::vector<double> a;
      for (std::size_t k = 1; k < w.size(); ++k) a.push_back(number(key, w[k]));
      return a;
    };
    SetItem s;
    if (kind == "circle") {
      const auto a = args(3);
      if (!(a[2] > 0.0)) fail(key, "circle radius must be positive");
      s = {SetItem::Kind::Circle, a[0], a[1], a[2]};
    } else if (kind == "vline") {
      s = {SetItem::Kind::VLine, args(1)[0], 0, 0};
    } else if (kind == "above") {
      s = {SetItem::Kind::Above, args(1)[0], 0, 0};
    } else if (kind == "point") {
      const auto a = args(2);
      s = {SetItem::Kind::Point, a[0], a[1], 0};
    } else {
      fail(key, "unknown set item '" + kind + "'");
    }
    return s;
  }

  SourceObject source(const std::string& key, const std::string& text) const {
    SourceObject s;
    for (const auto& item : split_items(text)) {
      const auto w = split_ws(item);
      if (!w.empty() && w[0] == "polyline") {
        std::vector<double> a;
        for (std::size_t k = 1; k < w.size(); ++k) a.push_back(number(key, w[k]));
        if (a.size() < 4 || a.size() % 2) fail(key, "polyline needs an even number (>= 4) of coordinates");
        Polyline p;
        for (std::size_t k = 0; k < a.size(); k += 2) p.points.push_back({a[k], a[k + 1]});
        s.polylines.push_back(p);
      } else {
        s.items.push_back(set_item(key, item));
      }
    }
    if (s.items.empty() && s.polylines.empty()) fail(key, "empty source");
    return s;
  }

  void parse(std::istream& is, ExperimentConfig& cfg) {
    std::string raw, section;
    std::vector<std::string> seen;
    while (std::getline(is, raw)) {
      ++line_;
      const auto hash = raw.find('#');
      const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (text.empty()) continue;
      if (text.front() == '[') {
        if (text.back() != ']') fail("", "malformed section header");
        section = trim(text.substr(1, text.size() - 2));
        if (section != "chart" && section != "objects" && section != "solver" && section != "outputs")
          fail("", "unknown section [" + section + "]");
        continue;
      }
      const auto eq = text.find('=');
      if (eq == std::string::npos) fail("", "expected 'key = value'");
      const std::string key = trim(text.substr(0, eq));
      const std::string value = trim(text.substr(eq + 1));
      if (section.empty()) fail(key, "key outside of any section");
      if (value.empty()) fail(key, "empty value");
      const std::string full = section + "." + key;
      if (std::find(seen.begin(), seen.end(), full) != seen.end()) fail(key, "duplicate key");
      seen.push_back(full);
      if (section == "chart") chart_key(cfg, key, value);
      else if (section == "objects") object_key(cfg, key, value);
      else if (section == "solver") solver_key(cfg, key, value);
      else output_key(cfg, key, value);
    }
    finish(cfg);
  }

 private:
  void chart_key(ExperimentConfig& cfg, const std::string& key, const std::string& v) {
    ChartSpec& c = cfg.chart;
    if (key == "kind") {
      try {
        c.kind = parse_chart_kind(v);
      } catch (const Error&) {
        fail(key, "unknown chart kind '" + v + "'");
      }
    } else if (key == "x_min") c.domain.x_min = number(key, v);
    else if (key == "x_max") c.domain.x_max = number(key, v);
    else if (key == "y_min") c.domain.y_min = number(key, v);
    else if (key == "y_max") c.domain.y_max = number(key, v);
    else if (key == "nx") c.nx = integer(key, v);
    else if (key == "ny") {
      c.ny = integer(key, v);
      cfg.ny_given = true;
    } else if (key == "periodic") c.periodic_x = boolean(key, v);
    else if (key == "g11") c.g11 = v;
    else if (key == "g12") c.g12 = v;
    else if (key == "g22") c.g22 = v;
    else fail(key, "unknown key in [chart]");
  }

  void object_key(ExperimentConfig& cfg, const std::string& key, const std::string& v) {
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot + 1 == key.size()) fail(key, "object keys look like <type>.<id>");
    const std::string type = key.substr(0, dot), id = key.substr(dot + 1);
    if (type == "ray") cfg.rays[id] = ray(key, v);
    else if (type == "line") cfg.lines[id] = ray(key, v);
    else if (type == "source") cfg.sources[id] = source(key, v);
    else if (type == "horo" || type == "dl") {
      const auto items = split_items(v);
      if (items.empty()) fail(key, "empty object");
      if (type == "horo") {
        const auto w = split_ws(items[0]);
        if (w.size() == 2 && w[0] == "ray") {
          if (items.size() != 1) fail(key, "'ray <id>' stands alone");
          cfg.horos[id] = HoroObject{{}, {}, w[1]};
          return;
        }
      }
      const auto w = split_ws(items[0]);
      if (w.size() != 3 || w[0] != "base") fail(key, "first item must be 'base x y'");
      const Vec2 base{number(key, w[1]), number(key, w[2])};
      if (items.size() < 2) fail(key, "needs at least one escaping point or set");
      if (type == "horo") {
        HoroObject h{base, {}, ""};
        for (std::size_t k = 1; k < items.size(); ++k) {
          const SetItem s = set_item(key, items[k]);
          if (s.kind != SetItem::Kind::Point) fail(key, "horofunction items must be points");
          h.points.push_back({s.a, s.b});
        }
        cfg.horos[id] = h;
      } else {
        DlObject d{base, {}};
        for (std::size_t k = 1; k < items.size(); ++k) d.sets.push_back(set_item(key, items[k]));
        cfg.dls[id] = d;
      }
    } else {
      fail(key, "unknown object type '" + type + "'");
    }
  }

  void solver_key(ExperimentConfig& cfg, const std::string& key, const std::string& v) {
    SolverSettings& s = cfg.solver;
    if (key == "eps_sweep") s.eikonal.eps_sweep = positive(key, v);
    else if (key == "max_sweeps") {
      s.eikonal.max_sweeps = integer(key, v);
      if (s.eikonal.max_sweeps < 4) fail(key, "must be at least 4");
    } else if (key == "margin_cells") {
      s.eikonal.margin_cells = integer(key, v);
      if (s.eikonal.margin_cells < 0) fail(key, "must be non-negative");
    } else if (key == "collar_cells") s.eikonal.collar_cells = positive(key, v);
    else if (key == "point_collar_radius") {
      s.eikonal.point_collar_radius = number(key, v);
      if (s.eikonal.point_collar_radius < 0) fail(key, "must be non-negative");
    } else if (key == "dt") s.dt = positive(key, v);
    else if (key == "schedule") {
      s.schedule = numbers(key, v);
      if (s.schedule.empty()) fail(key, "empty schedule");
      for (std::size_t k = 0; k < s.schedule.size(); ++k)
        if (!(s.schedule[k] > 0) || (k && !(s.schedule[k] > s.schedule[k - 1])))
          fail(key, "must be positive and strictly increasing");
    } else if (key == "cauchy_tol") s.cauchy_tol = positive(key, v);
    else if (key == "jump_threshold") s.jump_threshold = positive(key, v);
    else if (key == "tol_grad") {
      s.tol_grad = positive(key, v);
      if (s.tol_grad >= 1.0) fail(key, "must be in (0, 1)");
    } else if (key == "tol_slope") s.tol_slope = positive(key, v);
    else if (key == "zero_tol") s.zero_tol = positive(key, v);
    else if (key == "resolutions") {
      s.resolutions.clear();
      for (double r : numbers(key, v)) {
        if (r != std::floor(r) || r < 8) fail(key, "resolutions are integers >= 8");
        if (!s.resolutions.empty() && !(r > s.resolutions.back())) fail(key, "must be strictly increasing");
        s.resolutions.push_back(static_cast<int>(r));
      }
    } else if (key == "shifts") s.shifts = numbers(key, v);
    else if (key == "suites") s.suites = split_ws(v);
    else if (key == "corrupt") s.corrupt = boolean(key, v);
    else if (key == "seed") s.seed = static_cast<unsigned>(integer(key, v));
    else if (key == "foliation_cells") s.foliation_cells = integer(key, v);
    else if (key == "singular_checks") s.singular_checks = integer(key, v);
    else if (key == "quad_region") s.quad_region = rect(key, v);
    else if (key == "region") s.region = rect(key, v);
    else if (key == "oracle_region") s.oracle = rect(key, v);
    else fail(key, "unknown key in [solver]");
  }

  void output_key(ExperimentConfig& cfg, const std::string& key, const std::string& v) {
    OutputSettings& o = cfg.outputs;
    if (key == "dir") o.dir = v;
    else if (key == "field_csv") o.field_csv = v;
    else if (key == "pgm") o.pgm = v;
    else if (key == "report") o.report = v;
    else if (key == "report_csv") o.report_csv = v;
    else if (key == "path_csv") o.path_csv = v;
    else fail(key, "unknown key in [outputs]");
  }

  void finish(ExperimentConfig& cfg) {
    line_ = 0;
    const Rect& d = cfg.chart.domain;
    if (!(d.x_min < d.x_max && d.y_min < d.y_max)) fail("chart", "domain needs x_min < x_max and y_min < y_max");
    if (cfg.chart.nx < 3 || cfg.chart.ny < 3) fail("chart", "nx and ny must be at least 3");
    if (cfg.chart.kind == ChartKind::Cylinder) cfg.chart.periodic_x = true;
    if (cfg.chart.kind == ChartKind::HalfPlane && !(d.y_min > 0.0)) fail("y_min", "half_plane charts need y_min > 0");
    if (cfg.chart.kind != ChartKind::Custom && (!cfg.chart.g11.empty() || !cfg.chart.g12.empty() || !cfg.chart.g22.empty()))
      fail("chart", "metric expressions are only allowed for kind = custom");
    static const char* known[] = {"all", "distance", "busemann", "singular", "barrier", "relations", "comparison",
                                  "horo", "dl", "injector"};
    for (const auto& s : cfg.solver.suites)
      if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return s == k; }) == std::end(known))
        fail("suites", "unknown suite '" + s + "'");
  }

  std::string origin_;
  int line_ = 0;

};

SourceSet materialize(const MetricChart& chart, const SetItem& s) {
  switch (s.kind) {
    case SetItem::Kind::Circle: return circle_source({s.a, s.b}, s.c);
    case SetItem::Kind::VLine: return vertical_line_source(chart, s.a);
    case SetItem::Kind::Above: return region_above_source(chart, s.a);
    case SetItem::Kind::Point: {
      SourceSet p = SourceSet::point({s.a, s.b});
      p.description = "point";
      return p;
    }
  }
  return {};
}

}  // namespace

ExperimentConfig parse_config(std::istream& is, const std::string& origin) {
  ExperimentConfig cfg;
  cfg.origin = origin;
  cfg.chart.domain = {-1, 1, -1, 1};
  Parser p(origin);
  p.parse(is, cfg);
  return cfg;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Config, "cannot open config file " + path);
  return parse_config(is, path);
}

MetricChart ExperimentConfig::make_chart() const {
  try {
    if (ny_given) return MetricChart::from_spec(chart);
    ChartSpec s = chart;
    s.ny = 3;
    return MetricChart::from_spec(s).with_square_cells(chart.nx);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, std::string("[chart]: ") + e.what());
  }
}

MetricChart ExperimentConfig::make_chart(int nx) const { return make_chart().with_square_cells(nx); }

TruncationSchedule ExperimentConfig::schedule(const MetricChart& c) const {
  if (solver.schedule.empty()) throw Error(ErrorCode::Config, "[solver] schedule is required for Busemann fields");
  return {solver.schedule, cauchy_tol(c)};
}

BusemannOptions ExperimentConfig::busemann_options() const {
  BusemannOptions o;
  o.eikonal = solver.eikonal;
  o.dt = solver.dt;
  return o;
}

RaySpec ExperimentConfig::ray(const MetricChart& c, const std::string& id) const {
  const auto it = rays.find(id);
  if (it == rays.end()) throw Error(ErrorCode::Config, "no ray '" + id + "' in [objects]");
  return RaySpec::unit(c, it->second.base, it->second.direction, it->second.horizon);
}

LineSpec ExperimentConfig::line(const MetricChart& c, const std::string& id) const {
  const auto it = lines.find(id);
  if (it == lines.end()) throw Error(ErrorCode::Config, "no line '" + id + "' in [objects]");
  return LineSpec::through(c, it->second.base, it->second.direction, it->second.horizon);
}

SourceSet ExperimentConfig::source(const MetricChart& c, const std::string& id) const {
  const auto it = sources.find(id);
  if (it == sources.end()) throw Error(ErrorCode::Config, "no source '" + id + "' in [objects]");
  SourceSet s;
  for (const auto& item : it->second.items) s.merge(materialize(c, item));
  s.polylines.insert(s.polylines.end(), it->second.polylines.begin(), it->second.polylines.end());
  s.description = id;
  return s;
}

HoroObject ExperimentConfig::horo(const MetricChart& c, const std::string& id) const {
  const auto it = horos.find(id);
  if (it == horos.end()) throw Error(ErrorCode::Config, "no horo '" + id + "' in [objects]");
  if (it->second.ray.empty()) return it->second;
  const RaySpec r = ray(c, it->second.ray);
  const TruncationSchedule s = schedule(c);
  const GeodesicPath path = integrate_geodesic(c, r.base, r.direction, s.t_values.back(), solver.dt);
  HoroObject h{r.base, {}, it->second.ray};
  for (double t : s.t_values) {
    const auto st = path.at(c, t);
    if (!st) throw Error(ErrorCode::Schedule, "horo '" + id + "': ray leaves the chart before t = " + std::to_string(t));
    h.points.push_back(st->p);
  }
  return h;
}

std::vector<SourceSet> ExperimentConfig::dl_sets(const MetricChart& c, const std::string& id) const {
  const auto it = dls.find(id);
  if (it == dls.end()) throw Error(ErrorCode::Config, "no dl object '" + id + "' in [objects]");
  std::vector<SourceSet> out;
  for (const auto& s : it->second.sets) out.push_back(materialize(c, s));
  return out;
}

std::string ExperimentConfig::output_path(const std::string& file) const {
  if (file.empty() || file.front() == '/' || outputs.dir.empty() || outputs.dir == ".") return file;
  return outputs.dir + "/" + file;
}

}  // namespace busekit
