#include "busekit/field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace busekit {

const char* field_tag_name(FieldTag tag) {
  switch (tag) {
    case FieldTag::Distance: return "distance";
    case FieldTag::Busemann: return "busemann";
    case FieldTag::Horo: return "horo";
    case FieldTag::Dl: return "dl";
    case FieldTag::Barrier: return "barrier";
    case FieldTag::Generic: return "generic";
  }
  return "generic";
}

FieldTag parse_field_tag(const std::string& name) {
  if (name == "distance") return FieldTag::Distance;
  if (name == "busemann") return FieldTag::Busemann;
  if (name == "horo") return FieldTag::Horo;
  if (name == "dl") return FieldTag::Dl;
  if (name == "barrier") return FieldTag::Barrier;
  if (name == "generic") return FieldTag::Generic;
  throw Error(ErrorCode::Io, "unknown field tag '" + name + "'");
}

GridGeometry GridGeometry::of(const MetricChart& chart) {
  GridGeometry g;
  g.nx = chart.nx();
  g.ny = chart.ny();
  g.origin = {chart.domain().x_min, chart.domain().y_min};
  g.hx = chart.hx();
  g.hy = chart.hy();
  g.periodic_x = chart.periodic_x();
  return g;
}

bool GridGeometry::same_grid(const GridGeometry& o) const {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); };
  return nx == o.nx && ny == o.ny && close(origin.x, o.origin.x) && close(origin.y, o.origin.y) &&
         close(hx, o.hx) && close(hy, o.hy);
}

ScalarField::ScalarField(GridGeometry geometry, FieldTag tag, std::string source)
    : geo_(geometry),
      tag_(tag),
      source_(std::move(source)),
      values_(static_cast<std::size_t>(geometry.nx) * geometry.ny, 0.0),
      mask_(static_cast<std::size_t>(geometry.nx) * geometry.ny, 1) {}

int ScalarField::column(int i) const {
  if (geo_.periodic_x) {
    i %= geo_.nx;
    return i < 0 ? i + geo_.nx : i;
  }
  return (i < 0 || i >= geo_.nx) ? -1 : i;
}

std::optional<double> ScalarField::sample(Vec2 p) const {
  double fx = (p.x - geo_.origin.x) / geo_.hx;
  const double fy = (p.y - geo_.origin.y) / geo_.hy;
  constexpr double snap = 1e-9;
  if (fy < -snap || fy > geo_.ny - 1 + snap) return std::nullopt;
  if (!geo_.periodic_x && (fx < -snap || fx > geo_.nx - 1 + snap)) return std::nullopt;
  if (geo_.periodic_x) {
    fx = std::fmod(fx, static_cast<double>(geo_.nx));
    if (fx < 0) fx += geo_.nx;
  }
  int i0 = static_cast<int>(std::floor(fx));
  int j0 = static_cast<int>(std::floor(fy));
  if (!geo_.periodic_x) i0 = std::clamp(i0, 0, geo_.nx - 2);
  j0 = std::clamp(j0, 0, geo_.ny - 2);
  const double tx = std::clamp(fx - i0, 0.0, 1.0);
  const double ty = std::clamp(fy - j0, 0.0, 1.0);
  double acc = 0.0;
  const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  const int di[4] = {0, 1, 0, 1};
  const int dj[4] = {0, 0, 1, 1};
  for (int k = 0; k < 4; ++k) {
    if (w[k] <= 1e-12) continue;
    const int ii = column(i0 + di[k]);
    const int jj = j0 + dj[k];
    if (ii < 0 || !valid(ii, jj)) return std::nullopt;
    const double v = at(ii, jj);
    if (!std::isfinite(v)) return std::nullopt;
    acc += w[k] * v;
  }
  return acc;
}

std::optional<std::pair<int, int>> ScalarField::nearest_node(Vec2 p) const {
  const long ix = std::lround((p.x - geo_.origin.x) / geo_.hx);
  const long jy = std::lround((p.y - geo_.origin.y) / geo_.hy);
  if (jy < 0 || jy >= geo_.ny) return std::nullopt;
  const int i = column(static_cast<int>(ix));
  if (i < 0) return std::nullopt;
  return std::make_pair(i, static_cast<int>(jy));
}

std::size_t ScalarField::valid_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

double ScalarField::valid_fraction() const {
  return mask_.empty() ? 0.0 : static_cast<double>(valid_count()) / static_cast<double>(mask_.size());
}

double ScalarField::min_valid() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (mask_[k]) m = std::min(m, values_[k]);
  return m;
}

double ScalarField::max_valid() const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (mask_[k]) m = std::max(m, values_[k]);
  return m;
}

ScalarField combine(const ScalarField& a, const ScalarField& b, double sign_b, FieldTag tag) {
  if (!a.geometry().same_grid(b.geometry()))
    throw Error(ErrorCode::Precondition, "combine: fields live on different grids");
  ScalarField out(a.geometry(), tag, a.source() + (sign_b > 0 ? " + " : " - ") + b.source());
  for (std::size_t k = 0; k < out.values().size(); ++k) {
    const bool ok = a.mask()[k] && b.mask()[k];
    out.mask()[k] = ok ? 1 : 0;
    out.values()[k] = ok ? a.values()[k] + sign_b * b.values()[k] : 0.0;
  }
  return out;
}

std::optional<double> difference_oscillation(const ScalarField& a, const ScalarField& b) {
  if (!a.geometry().same_grid(b.geometry()))
    throw Error(ErrorCode::Precondition, "difference_oscillation: fields live on different grids");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    if (!a.mask()[k] || !b.mask()[k]) continue;
    const double d = a.values()[k] - b.values()[k];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (hi < lo) return std::nullopt;
  return hi - lo;
}

namespace {

void put_double(std::ostream& os, double v) {
  char buf[40];
  if (std::isnan(v)) {
    os << "nan";
  } else if (std::isinf(v)) {
    os << (v > 0 ? "inf" : "-inf");
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  }
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) {
    while (!cur.empty() && (cur.back() == '\r' || cur.back() == ' ')) cur.pop_back();
    std::size_t s = 0;
    while (s < cur.size() && cur[s] == ' ') ++s;
    out.push_back(cur.substr(s));
  }
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(ErrorCode::Io, "bad number '" + s + "' in field CSV");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw Error(ErrorCode::Io, "bad integer '" + s + "' in field CSV");
  return v;
}

}  // namespace

void write_field_csv(const ScalarField& f, std::ostream& os) {
  const GridGeometry& g = f.geometry();
  os << "nx,ny,x0,y0,hx,hy,tag\n";
  os << g.nx << ',' << g.ny << ',';
  put_double(os, g.origin.x);
  os << ',';
  put_double(os, g.origin.y);
  os << ',';
  put_double(os, g.hx);
  os << ',';
  put_double(os, g.hy);
  os << ',' << field_tag_name(f.tag()) << '\n';
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) os << ',';
      put_double(os, f.at(i, j));
    }
    os << '\n';
  }
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) os << ',';
      os << (f.valid(i, j) ? '1' : '0');
    }
    os << '\n';
  }
}

void write_field_csv(const ScalarField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_field_csv(f, os);
  if (!os) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

ScalarField read_field_csv(std::istream& is, bool periodic_x) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::Io, "field CSV: missing header");
  if (split_commas(line) != std::vector<std::string>{"nx", "ny", "x0", "y0", "hx", "hy", "tag"})
    throw Error(ErrorCode::Io, "field CSV: unexpected header '" + line + "'");
  if (!std::getline(is, line)) throw Error(ErrorCode::Io, "field CSV: missing header values");
  const auto h = split_commas(line);
  if (h.size() != 7) throw Error(ErrorCode::Io, "field CSV: header values must have 7 entries");
  GridGeometry g;
  g.nx = parse_int(h[0]);
  g.ny = parse_int(h[1]);
  g.origin = {parse_double(h[2]), parse_double(h[3])};
  g.hx = parse_double(h[4]);
  g.hy = parse_double(h[5]);
  g.periodic_x = periodic_x;
  if (g.nx <= 0 || g.ny <= 0) throw Error(ErrorCode::Io, "field CSV: non-positive dimensions");
  ScalarField f(g, parse_field_tag(h[6]));
  for (int j = 0; j < g.ny; ++j) {
    if (!std::getline(is, line)) throw Error(ErrorCode::Io, "field CSV: truncated value block");
    const auto row = split_commas(line);
    if (static_cast<int>(row.size()) != g.nx) throw Error(ErrorCode::Io, "field CSV: wrong row length");
    for (int i = 0; i < g.nx; ++i) f.at(i, j) = parse_double(row[static_cast<std::size_t>(i)]);
  }
  for (int j = 0; j < g.ny; ++j) {
    if (!std::getline(is, line)) throw Error(ErrorCode::Io, "field CSV: truncated mask block");
    const auto row = split_commas(line);
    if (static_cast<int>(row.size()) != g.nx) throw Error(ErrorCode::Io, "field CSV: wrong mask row length");
    for (int i = 0; i < g.nx; ++i) {
      const auto& c = row[static_cast<std::size_t>(i)];
      if (c != "0" && c != "1") throw Error(ErrorCode::Io, "field CSV: mask entries must be 0 or 1");
      f.set_valid(i, j, c == "1");
    }
  }
  return f;
}

ScalarField read_field_csv(const std::string& path, bool periodic_x) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return read_field_csv(is, periodic_x);
}

void write_field_pgm(const ScalarField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  const double lo = f.min_valid();
  const double hi = f.max_valid();
  const double span = (hi > lo) ? hi - lo : 1.0;
  os << "P5\n" << f.nx() << ' ' << f.ny() << "\n255\n";
  // top row first: image y axis points down
  for (int j = f.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < f.nx(); ++i) {
      unsigned char px = 0;
      if (f.valid(i, j) && std::isfinite(f.at(i, j)))
        px = static_cast<unsigned char>(std::lround(255.0 * (f.at(i, j) - lo) / span));
      os.put(static_cast<char>(px));
    }
  }
  if (!os) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace busekit
