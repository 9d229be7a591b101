#include "pfs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <yaml-cpp/yaml.h>

#ifndef PFS_SCENARIO_DIR
#define PFS_SCENARIO_DIR "scenarios"
#endif

namespace pfs {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) {
  std::ostringstream os;
  if (n.IsDefined() && n.Mark().line >= 0) os << "line " << n.Mark().line + 1 << ": ";
  os << msg;
  throw ConfigError(os.str());
}

YAML::Node required(const YAML::Node& parent, const char* key) {
  const YAML::Node n = parent[key];
  if (!n) fail(parent, std::string("missing key '") + key + "'");
  return n;
}

double number(const YAML::Node& n, const char* what) {
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(n, std::string(what) + " must be a number");
  }
}

double number_or(const YAML::Node& parent, const char* key, double fallback) {
  const YAML::Node n = parent[key];
  return n ? number(n, key) : fallback;
}

double positive(const YAML::Node& parent, const char* key) {
  const YAML::Node n = required(parent, key);
  const double v = number(n, key);
  if (!(v > 0.0)) fail(n, std::string(key) + " must be positive");
  return v;
}

std::string text(const YAML::Node& n, const char* what) {
  try {
    return n.as<std::string>();
  } catch (const YAML::Exception&) {
    fail(n, std::string(what) + " must be a string");
  }
}

Section parse_section(const YAML::Node& n) {
  if (!n.IsMap()) fail(n, "section must be a map");
  const std::string shape = text(required(n, "shape"), "shape");
  if (shape == "circular") {
    if (n["diameter"]) return Section::circular(0.5 * positive(n, "diameter"));
    if (n["radius"]) return Section::circular(positive(n, "radius"));
    if (n["area"]) return Section::circular(std::sqrt(positive(n, "area") / kPi));
    fail(n, "circular section needs diameter, radius or area");
  }
  if (shape == "rectangular") return Section::rectangular(positive(n, "width"), positive(n, "height"));
  fail(n["shape"], "unknown shape '" + shape + "'");
}

TimeTable parse_table(const YAML::Node& bc, const std::string& base_dir) {
  std::vector<std::pair<double, double>> pts;
  if (bc["table"]) {
    const YAML::Node t = bc["table"];
    if (t.IsScalar()) {
      pts.emplace_back(0.0, number(t, "table"));
    } else {
      if (!t.IsSequence() || t.size() == 0) fail(t, "table must be a non-empty list of [t, value]");
      for (const auto& row : t) {
        if (!row.IsSequence() || row.size() != 2) fail(row, "table rows must be [t, value]");
        pts.emplace_back(number(row[0], "time"), number(row[1], "value"));
      }
    }
  } else if (bc["csv"]) {
    const fs::path p = fs::path(base_dir) / text(bc["csv"], "csv");
    std::ifstream in(p);
    if (!in) fail(bc["csv"], "cannot open table '" + p.string() + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double t, v;
      if (!(ls >> t >> v)) {
        if (lineno == 1) continue;  // header
        fail(bc["csv"], p.string() + ":" + std::to_string(lineno) + ": expected two numbers");
      }
      pts.emplace_back(t, v);
    }
    if (pts.empty()) fail(bc["csv"], "table '" + p.string() + "' is empty");
  } else {
    fail(bc, "boundary needs 'table' or 'csv'");
  }
  try {
    return TimeTable(std::move(pts));
  } catch (const std::invalid_argument& e) {
    fail(bc, e.what());
  }
}

BoundaryCondition parse_boundary(const YAML::Node& n, BoundaryEnd end, double g,
                                 const std::string& base_dir) {
  if (!n.IsMap()) fail(n, "boundary block must be a map");
  BoundaryCondition bc;
  bc.end = end;
  try {
    bc.kind = parse_boundary_kind(text(required(n, "kind"), "kind"));
  } catch (const std::invalid_argument&) {
    fail(n["kind"], "kind must be level, discharge or head");
  }
  bc.table = parse_table(n, base_dir);
  if (bc.kind == BoundaryKind::head) {
    auto pts = bc.table.points();
    for (auto& pt : pts) pt.second *= g;
    bc.table = TimeTable(std::move(pts));
  }
  return bc;
}

InitialCondition parse_initial(const YAML::Node& n) {
  if (!n.IsMap()) fail(n, "initial block must be a map");
  InitialCondition ic;
  const std::string kind = text(required(n, "kind"), "kind");
  if (kind == "still") {
    ic.kind = InitialCondition::Kind::still;
    ic.value = number(required(n, "level"), "level");
  } else if (kind == "head") {
    ic.kind = InitialCondition::Kind::head;
    ic.value = number(required(n, "head"), "head");
    ic.Q = number_or(n, "Q", 0.0);
  } else if (kind == "dry") {
    ic.kind = InitialCondition::Kind::dry;
  } else if (kind == "pieces") {
    ic.kind = InitialCondition::Kind::pieces;
    const YAML::Node list = required(n, "pieces");
    if (!list.IsSequence()) fail(list, "pieces must be a list");
    for (const auto& pn : list) {
      InitialPiece pc;
      pc.from = number(required(pn, "from"), "from");
      pc.to = number(required(pn, "to"), "to");
      if (!(pc.to > pc.from)) fail(pn, "piece needs from < to");
      if (pn["depth"]) {
        pc.kind = InitialPiece::Kind::depth;
        pc.value = number(pn["depth"], "depth");
      } else if (pn["area"]) {
        pc.kind = InitialPiece::Kind::area;
        pc.value = number(pn["area"], "area");
      } else if (pn["level"]) {
        pc.kind = InitialPiece::Kind::level;
        pc.value = number(pn["level"], "level");
      } else {
        fail(pn, "piece needs depth, area or level");
      }
      pc.Q = number_or(pn, "Q", 0.0);
      ic.pieces.push_back(pc);
    }
  } else {
    fail(n["kind"], "initial kind must be still, head, pieces or dry");
  }
  return ic;
}

double to_cell_area_still(const CellGeometry& g, const ModelParams& p, double level, int& E) {
  const double R = g.section.half_height();
  const double crown = g.Z + R * g.cos_theta;
  if (level >= crown) {
    E = 1;
    return g.S * std::exp(p.g / (p.c * p.c) * (level - crown));
  }
  E = 0;
  const double rel = (level - g.Z) / g.cos_theta;
  if (rel <= -R) return 0.0;
  return g.section.area_from_level(rel);
}

double area_for_head(const CellGeometry& g, const ModelParams& p, double head, double Q, int& E) {
  const double target = p.g * head;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto solve = [&](int e, double lo, double hi) {
    boost::uintmax_t it = 200;
    const auto r = boost::math::tools::toms748_solve(
        [&](double a) { return total_head(g, p, a, Q, e, g.Z) - target; }, lo, hi, tol, it);
    return 0.5 * (r.first + r.second);
  };
  auto phi = [&](double A, int e) { return total_head(g, p, A, Q, e, g.Z) - target; };
  if (phi(g.S, 1) <= 0.0) {
    E = 1;
    double hi = g.S * 1.01;
    while (phi(hi, 1) < 0.0) hi = g.S + 2.0 * (hi - g.S);
    return solve(1, g.S, hi);
  }
  // Subcritical free-surface root: walk down from the full section.
  E = 0;
  double hi = g.S;
  for (double a = g.S * 0.97; a > 1e-9 * g.S; a *= 0.97) {
    if (phi(a, 0) < 0.0) return solve(0, a, hi);
    hi = a;
  }
  return 0.0;
}

std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

ScenarioConfig parse_config(const std::string& yaml_text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("line ") + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("config must be a map");

  ScenarioConfig cfg;
  if (root["name"]) cfg.name = text(root["name"], "name");

  const YAML::Node geo = required(root, "geometry");
  cfg.upstream_altitude = number_or(geo, "upstream_altitude", 0.0);
  const YAML::Node segs = required(geo, "segments");
  if (!segs.IsSequence() || segs.size() == 0) fail(segs, "segments must be a non-empty list");
  for (const auto& sn : segs) {
    SegmentSpec s;
    s.length = positive(sn, "length");
    const YAML::Node cells = required(sn, "cells");
    const double nc = number(cells, "cells");
    if (!(nc >= 1.0) || nc != std::floor(nc)) fail(cells, "cells must be a positive integer");
    s.cells = int(nc);
    s.start = parse_section(required(sn, "section"));
    s.end = sn["end_section"] ? parse_section(sn["end_section"]) : s.start;
    if (s.end.shape != s.start.shape) fail(sn["end_section"], "end_section must keep the shape");
    if (sn["angle_deg"]) {
      s.slope = std::sin(number(sn["angle_deg"], "angle_deg") * kPi / 180.0);
    } else {
      s.slope = number_or(sn, "slope", 0.0);
    }
    if (!(std::abs(s.slope) < 1.0)) fail(sn, "slope must be in (-1, 1)");
    cfg.segments.push_back(s);
  }

  const YAML::Node model = root["model"];
  if (model) {
    cfg.model.c = model["c"] ? positive(model, "c") : cfg.model.c;
    cfg.model.Ks = number_or(model, "Ks", 0.0);
    cfg.model.g = model["g"] ? positive(model, "g") : cfg.model.g;
  }

  const YAML::Node num = required(root, "numerics");
  cfg.cfl = positive(num, "cfl");
  if (cfg.cfl > 1.0) fail(num["cfl"], "cfl must be in (0, 1]");
  cfg.end_time = positive(num, "end_time");
  cfg.output_interval = num["output_interval"] ? positive(num, "output_interval") : cfg.end_time;
  if (num["method"]) {
    try {
      cfg.method = parse_method(text(num["method"], "method"));
    } catch (const std::invalid_argument&) {
      fail(num["method"], "method must be ghost or fka");
    }
  }

  cfg.initial = parse_initial(required(root, "initial"));
  cfg.upstream = parse_boundary(required(root, "upstream"), BoundaryEnd::upstream, cfg.model.g, base_dir);
  cfg.downstream =
      parse_boundary(required(root, "downstream"), BoundaryEnd::downstream, cfg.model.g, base_dir);

  if (root["probes"]) {
    const YAML::Node pr = root["probes"];
    if (!pr.IsSequence()) fail(pr, "probes must be a list of positions");
    for (const auto& x : pr) cfg.probes.push_back(number(x, "probe"));
  }
  double length = 0.0;
  for (const auto& s : cfg.segments) length += s.length;
  for (double x : cfg.probes) {
    if (x < 0.0 || x > length) fail(root["probes"], "probe outside the pipe");
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), fs::path(path).parent_path().string());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<std::string> builtin_names() {
  return {"wiggert", "hammer", "hammer-friction", "dryflood", "expansion", "order-study"};
}

std::string builtin_path(const std::string& name) {
  return (fs::path(PFS_SCENARIO_DIR) / (name + ".yaml")).string();
}

ScenarioConfig builtin_scenario(const std::string& name) {
  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("unknown built-in scenario '" + name + "'");
  }
  return load_config(builtin_path(name));
}

ScenarioConfig refined(ScenarioConfig cfg, double factor) {
  for (auto& s : cfg.segments) s.cells = std::max(1, int(std::lround(s.cells * factor)));
  return cfg;
}

std::vector<CellState> initial_cells(const ScenarioConfig& cfg, const PipeGeometry& geo) {
  const auto& cells = geo.cells();
  const ModelParams& p = cfg.model;
  std::vector<CellState> out;
  for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
    const CellGeometry& g = cells[i];
    CellState s;
    switch (cfg.initial.kind) {
      case InitialCondition::Kind::dry: break;
      case InitialCondition::Kind::still:
        s.A = to_cell_area_still(g, p, cfg.initial.value, s.E);
        break;
      case InitialCondition::Kind::head:
        s.A = area_for_head(g, p, cfg.initial.value, cfg.initial.Q, s.E);
        s.Q = s.A > 0.0 ? cfg.initial.Q : 0.0;
        break;
      case InitialCondition::Kind::pieces:
        for (const auto& pc : cfg.initial.pieces) {
          if (!(g.x >= pc.from && g.x < pc.to)) continue;
          const double R = g.section.half_height();
          switch (pc.kind) {
            case InitialPiece::Kind::area: s.A = pc.value; break;
            case InitialPiece::Kind::depth:
              s.A = pc.value >= 2.0 * R ? g.S : g.section.area_from_level(std::max(-R, pc.value - R));
              break;
            case InitialPiece::Kind::level:
              s.A = to_cell_area_still(g, p, pc.value, s.E);
              break;
          }
          s.E = s.A >= g.S ? 1 : 0;
          s.Q = s.A > 0.0 ? pc.Q : 0.0;
        }
        break;
    }
    out.push_back(s);
  }
  return out;
}

double piezometric_head(const CellGeometry& geo, const ModelParams& p, double A, int E) {
  const double R = geo.section.half_height();
  if (E == 1) return geo.Z + R + p.c * p.c * (A - geo.S) / (p.g * geo.S);
  if (is_dry(geo, A)) return geo.Z - R;
  return geo.Z + geo.section.level_from_area(std::min(A, geo.S));
}

double water_height(const CellGeometry& geo, const ModelParams& p, double A, int E) {
  return piezometric_head(geo, p, A, E) - (geo.Z - geo.section.half_height());
}

FieldRecord make_record(double t, const CellGeometry& geo, const ModelParams& p, const CellState& s,
                        double Zdyn) {
  FieldRecord r;
  r.t = t;
  r.x = geo.x;
  r.A = s.A;
  r.Q = s.Q;
  r.E = s.E;
  const bool dry = is_dry(geo, s.A);
  r.u = dry ? 0.0 : s.Q / s.A;
  r.h = water_height(geo, p, s.A, s.E);
  r.piezo = piezometric_head(geo, p, s.A, s.E);
  r.head = dry ? 0.0 : total_head(geo, p, s.A, s.Q, s.E, Zdyn);
  r.entropy = entropy(geo, p, s.A, s.Q, s.E, Zdyn);
  return r;
}

RunOutput run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
  const PipeGeometry geo(cfg.upstream_altitude, cfg.segments);
  StepperOptions so;
  so.cfl = cfg.cfl;
  so.method = opt.method.value_or(cfg.method);
  Stepper stepper(geo, cfg.model, so, cfg.upstream, cfg.downstream);

  RunOutput out;
  MeshState m = stepper.initial_state(initial_cells(cfg, geo));
  const auto& cells = geo.cells();
  const std::size_t n = cells.size();
  out.initial_mass = interior_mass(m.cells, cells);

  std::vector<std::size_t> probe_cells;
  for (double x : cfg.probes) {
    std::size_t best = 1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (std::abs(cells[i].x - x) < std::abs(cells[best].x - x)) best = i;
    }
    probe_cells.push_back(best);
  }

  auto record = [&]() {
    if (!opt.keep_fields) return;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      out.fields.push_back(make_record(m.t, cells[i], cfg.model, m.cells[i], m.Zdyn[i]));
    }
  };
  auto sample = [&]() {
    for (std::size_t k = 0; k < probe_cells.size(); ++k) {
      const auto& c = m.cells[probe_cells[k]];
      out.probes.push_back({m.t, k, c.A, c.Q, c.E, piezometric_head(cells[probe_cells[k]], cfg.model, c.A, c.E)});
    }
  };

  record();
  sample();
  double next_out = cfg.output_interval;
  const double eps = 1e-12 * cfg.end_time;
  bool last_recorded = true;
  while (m.t < cfg.end_time - eps) {
    const double dt_max = std::min(cfg.end_time - m.t, cfg.output_interval);
    StepDiagnostics d;
    try {
      d = stepper.advance(m, dt_max);
    } catch (const SimulationAbort& e) {
      out.aborted = true;
      out.abort_message = e.what();
      break;
    }
    out.diagnostics.push_back(d);
    sample();
    last_recorded = false;
    if (m.t >= next_out - eps) {
      record();
      last_recorded = true;
      while (next_out <= m.t + eps) next_out += cfg.output_interval;
    }
    if (opt.observer && !opt.observer(m, d)) break;
  }
  if (!last_recorded) record();
  out.events = stepper.events();
  out.final_state = std::move(m);
  return out;
}

void write_fields_csv(std::ostream& os, const std::vector<FieldRecord>& rows) {
  os << "t,x,A,Q,E,u,h,piezo,head,entropy\n";
  for (const auto& r : rows) {
    os << fmt17(r.t) << ',' << fmt17(r.x) << ',' << fmt17(r.A) << ',' << fmt17(r.Q) << ',' << r.E
       << ',' << fmt17(r.u) << ',' << fmt17(r.h) << ',' << fmt17(r.piezo) << ',' << fmt17(r.head)
       << ',' << fmt17(r.entropy) << '\n';
  }
}

void write_diagnostics_csv(std::ostream& os, const std::vector<StepDiagnostics>& rows) {
  os << "t,dt,mass,minA,transitions,fallbacks\n";
  for (const auto& r : rows) {
    os << fmt17(r.t) << ',' << fmt17(r.dt) << ',' << fmt17(r.mass) << ',' << fmt17(r.minA) << ','
       << r.transitions << ',' << r.fallbacks << '\n';
  }
}

void write_events_csv(std::ostream& os, const std::vector<TransitionEvent>& rows) {
  os << "t,interface,method,w,residual,fallback\n";
  for (const auto& r : rows) {
    os << fmt17(r.t) << ',' << r.interface << ',' << to_string(r.method) << ',' << fmt17(r.w) << ','
       << fmt17(r.residual) << ',' << int(r.fallback) << '\n';
  }
}

void write_probes_csv(std::ostream& os, const std::vector<ProbeSample>& rows,
                      const std::vector<double>& positions) {
  os << "t,x,A,Q,E,piezo\n";
  for (const auto& r : rows) {
    os << fmt17(r.t) << ',' << fmt17(positions.at(r.probe)) << ',' << fmt17(r.A) << ','
       << fmt17(r.Q) << ',' << r.E << ',' << fmt17(r.piezo) << '\n';
  }
}

std::vector<FieldRecord> read_fields_csv(std::istream& is) {
  std::vector<FieldRecord> rows;
  std::string line;
  if (!std::getline(is, line) || line != "t,x,A,Q,E,u,h,piezo,head,entropy") {
    throw std::runtime_error("read_fields_csv: unexpected header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    FieldRecord r;
    if (!(ls >> r.t >> r.x >> r.A >> r.Q >> r.E >> r.u >> r.h >> r.piezo >> r.head >> r.entropy)) {
      throw std::runtime_error("read_fields_csv: malformed row '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> project_average(const MeshField& fine, std::size_t n) {
  const std::size_t nf = fine.values.size();
  if (n == 0 || nf % n != 0) throw std::invalid_argument("project_average: meshes are not nested");
  const std::size_t r = nf / n;
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k) s += fine.values[i * r + k];
    out[i] = s / double(r);
  }
  return out;
}

double l2_error(const MeshField& coarse, const MeshField& reference) {
  const auto ref = project_average(reference, coarse.values.size());
  double s = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = coarse.values[i] - ref[i];
    s += coarse.dx() * d * d;
  }
  return std::sqrt(s);
}

OrderFit l2_error_and_order(const std::vector<MeshField>& levels, const MeshField& reference) {
  if (levels.size() < 3) throw std::invalid_argument("l2_error_and_order: need at least three mesh levels");
  OrderFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& f : levels) {
    const double e = l2_error(f, reference);
    fit.dx.push_back(f.dx());
    fit.errors.push_back(e);
    const double x = std::log(f.dx()), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = double(levels.size());
  fit.order = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return fit;
}

double quadrature_moment(const std::function<double(double)>& f, double lo, double hi, int order) {
  if (!(hi > lo)) return 0.0;
  auto g = [&](double xi) { return std::pow(xi, order) * f(xi); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, lo, hi, 8, 1e-13, &err);
}

}  // namespace pfs
