#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gasnet/format.hpp"
#include "gasnet/network.hpp"
#include "gasnet/physics.hpp"
#include "gasnet/solver.hpp"

namespace gasnet {

/// Everything needed to run one simulation.
///
/// Text schema (one record per line, '#' starts a comment):
///
///   key = value                      scalar setting, see apply_setting()
///   vertex <name>
///   edge <name> <from> <to> [length=1] [area=1] [friction=1] [cells=16]
///   boundary <vertex> constant <value>
///   boundary <vertex> sin3 amplitude=<A> [phase=0] [offset=1] [frequency=pi]
///
/// Vertex/edge/boundary records define an inline network; otherwise
/// `topology` selects single-pipe, gaslib11, or a path to a file holding
/// such records.
struct ScenarioConfig {
  enum class Topology { single_pipe, gaslib11, file, inline_records };
  enum class Initial { steady, uniform };

  Topology topology_source = Topology::single_pipe;
  std::string topology_path;
  NetworkTopology topology = single_pipe();
  BoundaryData boundary = single_pipe_boundary();

  PressureLaw law = PressureLaw::isothermal(1.0);
  double epsilon = 0.0;
  double tau_max = 1.0;
  /// Uniform cell count per edge; 0 keeps the topology's own counts.
  std::size_t cells = 16;
  std::size_t steps = 32;
  SolverParams solver;

  Initial initial = Initial::steady;
  double initial_rho = 1.0;
  double initial_m = 0.0;

  std::optional<AdmissibleBounds> bounds;
  /// Store every n-th state in the trajectory (0 = none).
  std::size_t store_stride = 0;

  double dt() const { return tau_max / static_cast<double>(steps); }

  /// Topology with the configured resolution applied.
  NetworkTopology resolved_topology() const {
    return cells == 0 ? topology : topology.with_uniform_cells(cells);
  }

  SolverParams solver_params() const {
    SolverParams p = solver;
    p.dt = dt();
    p.steps = steps;
    return p;
  }

  /// Same physics with cells and steps multiplied by `factor`.
  ScenarioConfig refined(std::size_t factor) const {
    ScenarioConfig c = *this;
    if (c.cells == 0) c.topology = c.topology.with_refinement(factor);
    else c.cells *= factor;
    c.steps *= factor;
    return c;
  }

  void validate() const {
    if (!(tau_max > 0.0)) throw ConfigError("tau_max must be positive");
    if (steps < 1) throw ConfigError("steps must be at least 1");
    if (!(epsilon >= 0.0)) throw ConfigError("eps must be non-negative");
    require_valid(resolved_topology());
    const auto diag = validate_boundary(topology, boundary);
    if (!diag.empty()) throw ConfigError(diag.front());
  }
};

/// Built-in single-pipe experiment: unit pipe, a = gamma = c = 1.
inline ScenarioConfig single_pipe_scenario(double eps = 0.0) {
  ScenarioConfig c;
  c.epsilon = eps;
  return c;
}

/// Built-in GasLib-11 experiment.
inline ScenarioConfig gaslib11_scenario(double eps = 0.0) {
  ScenarioConfig c;
  c.topology_source = ScenarioConfig::Topology::gaslib11;
  auto [topo, bd] = gaslib11();
  c.topology = std::move(topo);
  c.boundary = std::move(bd);
  c.epsilon = eps;
  return c;
}

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

inline std::map<std::string, std::string> key_values(const std::vector<std::string>& toks, std::size_t from,
                                                     int line) {
  std::map<std::string, std::string> kv;
  for (std::size_t i = from; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected key=value, got '" + toks[i] + "'");
    kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
  }
  return kv;
}

inline double number(const std::string& s, int line) {
  try {
    if (s == "pi") return std::numbers::pi;
    return parse_double(s);
  } catch (const ConfigError&) {
    throw ConfigError("line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
}

inline std::size_t count(const std::string& s, int line) {
  const double v = number(s, line);
  if (!(v >= 0.0) || v != std::floor(v))
    throw ConfigError("line " + std::to_string(line) + ": expected a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

inline bool boolean(const std::string& s, int line) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("line " + std::to_string(line) + ": expected a boolean, got '" + s + "'");
}

/// Network records collected from text.
struct NetworkRecords {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  BoundaryData boundary;
  bool any() const { return !vertices.empty() || !edges.empty() || !boundary.empty(); }
};

/// "key = value" lines, as opposed to records such as "edge a v0 v1 length=2".
inline bool is_setting(const std::vector<std::string>& toks) {
  return toks[0].find('=') != std::string::npos || (toks.size() >= 2 && toks[1].front() == '=');
}

inline bool parse_network_record(const std::vector<std::string>& toks, int line, NetworkRecords& rec) {
  const auto where = [&] { return "line " + std::to_string(line) + ": "; };
  if (toks[0] == "vertex") {
    if (toks.size() != 2) throw ConfigError(where() + "usage: vertex <name>");
    for (const auto& v : rec.vertices)
      if (v.name == toks[1]) throw ConfigError(where() + "duplicate vertex '" + toks[1] + "'");
    rec.vertices.push_back({toks[1]});
    return true;
  }
  if (toks[0] == "edge") {
    if (toks.size() < 4) throw ConfigError(where() + "usage: edge <name> <from> <to> [key=value ...]");
    auto vid = [&](const std::string& n) {
      for (std::size_t i = 0; i < rec.vertices.size(); ++i)
        if (rec.vertices[i].name == n) return i;
      throw ConfigError(where() + "unknown vertex '" + n + "'");
    };
    Edge e{toks[1], vid(toks[2]), vid(toks[3]), 1.0, 1.0, 1.0, 16};
    for (const auto& [k, v] : key_values(toks, 4, line)) {
      if (k == "length") e.length = number(v, line);
      else if (k == "area") e.area = number(v, line);
      else if (k == "friction") e.friction = number(v, line);
      else if (k == "cells") e.cells = count(v, line);
      else throw ConfigError(where() + "unknown edge attribute '" + k + "'");
    }
    rec.edges.push_back(e);
    return true;
  }
  if (toks[0] == "boundary") {
    if (toks.size() < 3) throw ConfigError(where() + "usage: boundary <vertex> constant|sin3 ...");
    BoundaryFunction f;
    if (toks[2] == "constant") {
      if (toks.size() != 4) throw ConfigError(where() + "usage: boundary <vertex> constant <value>");
      f = BoundaryFunction::constant(number(toks[3], line));
    } else if (toks[2] == "sin3") {
      f = BoundaryFunction::sin3(0.0, 0.0, 1.0);
      for (const auto& [k, v] : key_values(toks, 3, line)) {
        if (k == "amplitude") f.amplitude = number(v, line);
        else if (k == "phase") f.phase = number(v, line);
        else if (k == "offset") f.offset = number(v, line);
        else if (k == "frequency") f.frequency = number(v, line);
        else throw ConfigError(where() + "unknown sin3 attribute '" + k + "'");
      }
    } else {
      throw ConfigError(where() + "unknown boundary kind '" + toks[2] + "'");
    }
    rec.boundary[toks[1]] = f;
    return true;
  }
  return false;
}

inline NetworkRecords parse_network_text(const std::string& text) {
  NetworkRecords rec;
  std::istringstream is(text);
  int line = 0;
  for (std::string raw; std::getline(is, raw);) {
    ++line;
    const auto body = trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto toks = split_ws(body);
    if (is_setting(toks)) continue;
    if (!parse_network_record(toks, line, rec))
      throw ConfigError("line " + std::to_string(line) + ": unknown record '" + toks[0] + "'");
  }
  return rec;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open '" + p.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace detail

/// Loads a network (vertex/edge/boundary records) from text, contracting
/// zero-length by-pass edges.
inline std::pair<NetworkTopology, BoundaryData> parse_network(const std::string& text) {
  auto rec = detail::parse_network_text(text);
  if (rec.edges.empty()) throw ConfigError("network text defines no edges");
  NetworkTopology raw(std::move(rec.vertices), std::move(rec.edges));
  return {contract_bypass_edges(raw), std::move(rec.boundary)};
}

/// Parses a scenario. Relative topology paths resolve against `base_dir`.
inline ScenarioConfig parse_scenario(const std::string& text,
                                     const std::filesystem::path& base_dir = std::filesystem::current_path()) {
  ScenarioConfig cfg;
  detail::NetworkRecords rec;
  std::string law_kind = "isothermal";
  double sound_speed = 1.0, kappa = 1.0, exponent = 1.4;
  double length = 1.0, area = 1.0, friction = 1.0;
  std::optional<double> dt;
  bool steps_given = false;
  bool cells_given = false;
  AdmissibleBounds bounds;
  bool bounds_given = false;

  std::istringstream is(text);
  int line = 0;
  for (std::string raw; std::getline(is, raw);) {
    ++line;
    const auto body = detail::trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const auto toks = detail::split_ws(body);
    if (detail::is_setting(toks)) {
      const auto key = detail::trim(body.substr(0, eq));
      const auto val = detail::trim(body.substr(eq + 1));
      auto num = [&] { return detail::number(val, line); };
      if (key == "topology") {
        if (val == "single-pipe") cfg.topology_source = ScenarioConfig::Topology::single_pipe;
        else if (val == "gaslib11") cfg.topology_source = ScenarioConfig::Topology::gaslib11;
        else {
          cfg.topology_source = ScenarioConfig::Topology::file;
          cfg.topology_path = (base_dir / val).string();
        }
      } else if (key == "pressure_law") law_kind = val;
      else if (key == "sound_speed") sound_speed = num();
      else if (key == "kappa") kappa = num();
      else if (key == "exponent") exponent = num();
      else if (key == "eps") cfg.epsilon = num();
      else if (key == "tau_max") cfg.tau_max = num();
      else if (key == "cells") { cfg.cells = detail::count(val, line); cells_given = true; }
      else if (key == "steps") { cfg.steps = detail::count(val, line); steps_given = true; }
      else if (key == "dt") dt = num();
      else if (key == "length") length = num();
      else if (key == "area") area = num();
      else if (key == "friction") friction = num();
      else if (key == "newton_tolerance") cfg.solver.tolerance = num();
      else if (key == "newton_max_iterations") cfg.solver.max_iterations = static_cast<int>(detail::count(val, line));
      else if (key == "line_search") cfg.solver.line_search = detail::boolean(val, line);
      else if (key == "max_bisections") cfg.solver.max_bisections = static_cast<int>(detail::count(val, line));
      else if (key == "initial") {
        if (val == "steady") cfg.initial = ScenarioConfig::Initial::steady;
        else if (val == "uniform") cfg.initial = ScenarioConfig::Initial::uniform;
        else throw ConfigError("line " + std::to_string(line) + ": initial must be steady or uniform");
      } else if (key == "initial_rho") cfg.initial_rho = num();
      else if (key == "initial_m") cfg.initial_m = num();
      else if (key == "rho_min") { bounds.rho_min = num(); bounds_given = true; }
      else if (key == "rho_max") { bounds.rho_max = num(); bounds_given = true; }
      else if (key == "w_max") { bounds.w_max = num(); bounds_given = true; }
      else if (key == "store_trajectory") cfg.store_stride = detail::count(val, line);
      else throw ConfigError("line " + std::to_string(line) + ": unknown setting '" + key + "'");
      continue;
    }
    if (!detail::parse_network_record(toks, line, rec))
      throw ConfigError("line " + std::to_string(line) + ": unknown record '" + toks[0] + "'");
  }

  if (law_kind == "isothermal") cfg.law = PressureLaw::isothermal(sound_speed);
  else if (law_kind == "polytropic") cfg.law = PressureLaw::polytropic(kappa, exponent);
  else throw ConfigError("unknown pressure_law '" + law_kind + "'");

  if (rec.any()) {
    cfg.topology_source = ScenarioConfig::Topology::inline_records;
    if (rec.edges.empty()) throw ConfigError("inline network defines no edges");
    NetworkTopology raw(std::move(rec.vertices), std::move(rec.edges));
    cfg.topology = contract_bypass_edges(raw);
    cfg.boundary = std::move(rec.boundary);
  } else {
    switch (cfg.topology_source) {
      case ScenarioConfig::Topology::single_pipe:
        cfg.topology = single_pipe(length, area, friction, cfg.cells == 0 ? 16 : cfg.cells);
        cfg.boundary = single_pipe_boundary();
        break;
      case ScenarioConfig::Topology::gaslib11: {
        auto [t, b] = gaslib11();
        cfg.topology = std::move(t);
        cfg.boundary = std::move(b);
        break;
      }
      case ScenarioConfig::Topology::file: {
        auto [t, b] = parse_network(detail::read_file(cfg.topology_path));
        cfg.topology = std::move(t);
        cfg.boundary = std::move(b);
        break;
      }
      case ScenarioConfig::Topology::inline_records: break;
    }
  }

  // networks from records keep their per-edge cell counts unless overridden
  const bool own_cells = cfg.topology_source == ScenarioConfig::Topology::file ||
                         cfg.topology_source == ScenarioConfig::Topology::inline_records;
  if (own_cells && !cells_given) cfg.cells = 0;

  if (dt) {
    if (!(*dt > 0.0)) throw ConfigError("dt must be positive");
    const double n = std::round(cfg.tau_max / *dt);
    if (n < 1 || std::abs(n * *dt - cfg.tau_max) > 1e-12 * cfg.tau_max)
      throw ConfigError("dt does not divide tau_max");
    if (steps_given && static_cast<std::size_t>(n) != cfg.steps)
      throw ConfigError("dt * steps must equal tau_max");
    cfg.steps = static_cast<std::size_t>(n);
  }
  if (bounds_given) cfg.bounds = bounds;
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(detail::read_file(path), path.parent_path().empty() ? std::filesystem::current_path()
                                                                               : path.parent_path());
}

/// Writes a network in the record schema accepted by parse_network().
inline std::string network_to_text(const NetworkTopology& topo, const BoundaryData& bd) {
  std::ostringstream os;
  for (const auto& v : topo.vertices()) os << "vertex " << v.name << "\n";
  for (const auto& e : topo.edges())
    os << "edge " << e.name << ' ' << topo.vertices()[e.from].name << ' ' << topo.vertices()[e.to].name
       << " length=" << format_double(e.length) << " area=" << format_double(e.area)
       << " friction=" << format_double(e.friction) << " cells=" << e.cells << "\n";
  for (const auto& [name, f] : bd) {
    if (f.kind == BoundaryFunction::Kind::constant) {
      os << "boundary " << name << " constant " << format_double(f.value) << "\n";
    } else {
      os << "boundary " << name << " sin3 amplitude=" << format_double(f.amplitude)
         << " phase=" << format_double(f.phase) << " offset=" << format_double(f.offset)
         << " frequency=" << format_double(f.frequency) << "\n";
    }
  }
  return os.str();
}

}  // namespace gasnet
