#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gasnet/errors.hpp"
#include "gasnet/state.hpp"

namespace gasnet {

struct Vertex {
  std::string name;
};

/// A pipe from vertex `from` (x = 0) to vertex `to` (x = length).
struct Edge {
  std::string name;
  std::size_t from = 0;
  std::size_t to = 0;
  double length = 1.0;
  double area = 1.0;
  double friction = 1.0;
  std::size_t cells = 16;
};

/// Which end of an edge touches a vertex.
enum class EdgeEnd { start, end };

struct Incidence {
  std::size_t edge;
  EdgeEnd end;
  /// n^e(v): -1 at the start vertex, +1 at the end vertex.
  int sign() const { return end == EdgeEnd::start ? -1 : 1; }
};

/// Directed pipe network. Vertex degrees, the boundary/interior partition and
/// incidence lists are derived on construction and never supplied by the user.
class NetworkTopology {
 public:
  NetworkTopology() = default;
  NetworkTopology(std::vector<Vertex> vertices, std::vector<Edge> edges)
      : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    for (const auto& e : edges_)
      if (e.from >= vertices_.size() || e.to >= vertices_.size())
        throw ConfigError("edge '" + e.name + "' references an unknown vertex");
    derive();
  }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<Incidence>& incident(std::size_t v) const { return incident_[v]; }

  int incidence(std::size_t e, std::size_t v) const {
    if (edges_[e].from == v) return -1;
    if (edges_[e].to == v) return 1;
    return 0;
  }

  bool is_boundary(std::size_t v) const { return incident_[v].size() == 1; }
  const std::vector<std::size_t>& boundary_vertices() const { return boundary_; }
  const std::vector<std::size_t>& interior_vertices() const { return interior_; }
  /// Position of v in interior_vertices(), if interior.
  std::optional<std::size_t> interior_index(std::size_t v) const {
    if (interior_pos_[v] == npos) return std::nullopt;
    return interior_pos_[v];
  }

  std::optional<std::size_t> find_vertex(const std::string& name) const {
    for (std::size_t v = 0; v < vertices_.size(); ++v)
      if (vertices_[v].name == name) return v;
    return std::nullopt;
  }

  std::optional<std::size_t> find_edge(const std::string& name) const {
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (edges_[e].name == name) return e;
    return std::nullopt;
  }

  /// Same network with every edge's cell count set to `cells`.
  NetworkTopology with_uniform_cells(std::size_t cells) const {
    auto edges = edges_;
    for (auto& e : edges) e.cells = cells;
    return {vertices_, std::move(edges)};
  }

  /// Same network with every edge's cell count multiplied by `factor`.
  NetworkTopology with_refinement(std::size_t factor) const {
    auto edges = edges_;
    for (auto& e : edges) e.cells *= factor;
    return {vertices_, std::move(edges)};
  }

  PipeGrid grid(std::size_t e) const { return PipeGrid(edges_[e].length, edges_[e].cells); }

  double max_h() const {
    double h = 0.0;
    for (const auto& e : edges_) h = std::max(h, e.length / static_cast<double>(e.cells));
    return h;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  void derive() {
    incident_.assign(vertices_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      incident_[edges_[e].from].push_back({e, EdgeEnd::start});
      incident_[edges_[e].to].push_back({e, EdgeEnd::end});
    }
    boundary_.clear();
    interior_.clear();
    interior_pos_.assign(vertices_.size(), npos);
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      if (incident_[v].size() == 1) {
        boundary_.push_back(v);
      } else {
        interior_pos_[v] = interior_.size();
        interior_.push_back(v);
      }
    }
  }

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> incident_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> interior_pos_;
};

/// Prescribed boundary enthalpy h(tau) = offset + amplitude * sin(frequency * tau + phase)^3,
/// or a constant when kind == constant.
struct BoundaryFunction {
  enum class Kind { constant, sin3 };

  Kind kind = Kind::constant;
  double value = 1.0;      // constant
  double amplitude = 0.0;  // sin3
  double frequency = std::numbers::pi;
  double phase = 0.0;
  double offset = 1.0;

  static BoundaryFunction constant(double v) {
    BoundaryFunction f;
    f.kind = Kind::constant;
    f.value = v;
    return f;
  }

  static BoundaryFunction sin3(double amplitude, double phase, double offset,
                               double frequency = std::numbers::pi) {
    BoundaryFunction f;
    f.kind = Kind::sin3;
    f.amplitude = amplitude;
    f.phase = phase;
    f.offset = offset;
    f.frequency = frequency;
    return f;
  }

  double operator()(double tau) const {
    if (kind == Kind::constant) return value;
    const double s = std::sin(frequency * tau + phase);
    return offset + amplitude * s * s * s;
  }
};

/// Boundary enthalpy per boundary vertex, keyed by vertex name.
using BoundaryData = std::map<std::string, BoundaryFunction>;

/// Checks that every boundary vertex has data and that no data refers to an
/// unknown or interior vertex.
inline std::vector<std::string> validate_boundary(const NetworkTopology& topo, const BoundaryData& bd) {
  std::vector<std::string> out;
  for (std::size_t v : topo.boundary_vertices())
    if (!bd.count(topo.vertices()[v].name))
      out.push_back("boundary vertex '" + topo.vertices()[v].name + "' has no boundary data");
  for (const auto& [name, f] : bd) {
    auto v = topo.find_vertex(name);
    if (!v) out.push_back("boundary data for unknown vertex '" + name + "'");
    else if (!topo.is_boundary(*v)) out.push_back("boundary data for interior vertex '" + name + "'");
  }
  return out;
}

/// Structural diagnostics; an empty result means the topology is usable.
inline std::vector<std::string> validate(const NetworkTopology& topo) {
  std::vector<std::string> out;
  if (topo.vertex_count() == 0 || topo.edge_count() == 0) {
    out.emplace_back("network has no edges");
    return out;
  }
  for (const auto& e : topo.edges()) {
    if (e.from == e.to) out.push_back("edge '" + e.name + "' is a self-loop");
    if (!(e.length > 0.0)) out.push_back("zero-length edge '" + e.name + "'");
    if (!(e.area > 0.0)) out.push_back("edge '" + e.name + "' has non-positive area");
    if (!(e.friction > 0.0)) out.push_back("edge '" + e.name + "' has non-positive friction");
    if (e.cells < 1) out.push_back("edge '" + e.name + "' has no cells");
  }
  for (std::size_t e = 0; e < topo.edge_count(); ++e) {
    const auto& ed = topo.edge(e);
    if (topo.incidence(e, ed.from) != -1 || (ed.from != ed.to && topo.incidence(e, ed.to) != 1))
      out.push_back("edge '" + ed.name + "' has inconsistent incidence");
  }
  std::vector<bool> seen(topo.vertex_count(), false);
  std::queue<std::size_t> todo;
  todo.push(0);
  seen[0] = true;
  while (!todo.empty()) {
    const auto v = todo.front();
    todo.pop();
    for (const auto& inc : topo.incident(v)) {
      const auto& ed = topo.edge(inc.edge);
      for (std::size_t w : {ed.from, ed.to})
        if (!seen[w]) {
          seen[w] = true;
          todo.push(w);
        }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) out.emplace_back("network is not connected");
  return out;
}

/// Throws ConfigError listing all diagnostics, if any.
inline void require_valid(const NetworkTopology& topo) {
  const auto diag = validate(topo);
  if (diag.empty()) return;
  std::ostringstream os;
  os << "invalid network:";
  for (const auto& d : diag) os << "\n  " << d;
  throw ConfigError(os.str());
}

/// Contracts every zero-length (by-pass) edge by identifying its end
/// vertices. The merged vertex keeps the name of the earliest listed member.
/// Positive-length edges are kept in order.
inline NetworkTopology contract_bypass_edges(const NetworkTopology& topo) {
  const std::size_t nv = topo.vertex_count();
  std::vector<std::size_t> parent(nv);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : topo.edges()) {
    if (e.length != 0.0) continue;
    const auto a = find(e.from), b = find(e.to);
    if (a == b) continue;
    parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> new_index(nv, static_cast<std::size_t>(-1));
  std::vector<Vertex> vertices;
  for (std::size_t v = 0; v < nv; ++v) {
    if (find(v) == v) {
      new_index[v] = vertices.size();
      vertices.push_back(topo.vertices()[v]);
    }
  }
  std::vector<Edge> edges;
  for (const auto& e : topo.edges()) {
    if (e.length == 0.0) continue;
    Edge ne = e;
    ne.from = new_index[find(e.from)];
    ne.to = new_index[find(e.to)];
    if (ne.from == ne.to)
      throw ConfigError("contracting by-pass edges turns edge '" + e.name + "' into a self-loop");
    edges.push_back(ne);
  }
  return {std::move(vertices), std::move(edges)};
}

/// Index bookkeeping of the unknown vector: for each edge its cell densities
/// then its nodal fluxes; interior-vertex enthalpies come last.
class DofMap {
 public:
  DofMap() = default;
  explicit DofMap(const NetworkTopology& topo) {
    std::size_t next = 0;
    for (const auto& e : topo.edges()) {
      rho_offset_.push_back(next);
      next += e.cells;
      m_offset_.push_back(next);
      next += e.cells + 1;
      cells_.push_back(e.cells);
    }
    vertex_offset_ = next;
    interior_count_ = topo.interior_vertices().size();
    size_ = next + interior_count_;
  }

  std::size_t size() const { return size_; }
  std::size_t edge_count() const { return cells_.size(); }
  std::size_t cells(std::size_t e) const { return cells_[e]; }
  std::size_t rho(std::size_t e, std::size_t cell) const { return rho_offset_[e] + cell; }
  std::size_t m(std::size_t e, std::size_t node) const { return m_offset_[e] + node; }
  std::size_t vertex(std::size_t interior_idx) const { return vertex_offset_ + interior_idx; }
  std::size_t interior_count() const { return interior_count_; }

  template <class Vec>
  void scatter(const DiscreteState& s, Vec& x) const {
    for (std::size_t e = 0; e < edge_count(); ++e) {
      for (std::size_t c = 0; c < cells_[e]; ++c) x[rho(e, c)] = s.rho[e][c];
      for (std::size_t i = 0; i <= cells_[e]; ++i) x[m(e, i)] = s.m[e][i];
    }
    for (std::size_t k = 0; k < interior_count_; ++k) x[vertex(k)] = s.vertex_enthalpy[k];
  }

  template <class Vec>
  void gather(const Vec& x, DiscreteState& s) const {
    for (std::size_t e = 0; e < edge_count(); ++e) {
      for (std::size_t c = 0; c < cells_[e]; ++c) s.rho[e][c] = x[rho(e, c)];
      for (std::size_t i = 0; i <= cells_[e]; ++i) s.m[e][i] = x[m(e, i)];
    }
    for (std::size_t k = 0; k < interior_count_; ++k) s.vertex_enthalpy[k] = x[vertex(k)];
  }

 private:
  std::vector<std::size_t> rho_offset_, m_offset_, cells_;
  std::size_t vertex_offset_ = 0, interior_count_ = 0, size_ = 0;
};

/// Zero-initialized state with the grids of `topo`.
inline DiscreteState make_state(const NetworkTopology& topo, double rho = 1.0, double m = 0.0,
                                double vertex_h = 0.0) {
  DiscreteState s;
  for (std::size_t e = 0; e < topo.edge_count(); ++e) {
    s.rho.emplace_back(topo.grid(e), rho);
    s.m.emplace_back(topo.grid(e), m);
  }
  s.vertex_enthalpy.assign(topo.interior_vertices().size(), vertex_h);
  return s;
}

/// Throws unless the state's fields live on the topology's grids.
inline void require_matching(const DiscreteState& s, const NetworkTopology& topo) {
  bool ok = s.rho.size() == topo.edge_count() && s.m.size() == topo.edge_count() &&
            s.vertex_enthalpy.size() == topo.interior_vertices().size();
  for (std::size_t e = 0; ok && e < topo.edge_count(); ++e)
    ok = s.rho[e].grid == topo.grid(e) && s.m[e].grid == topo.grid(e) &&
         s.rho[e].values.size() == topo.edge(e).cells && s.m[e].values.size() == topo.edge(e).cells + 1;
  if (!ok) throw ConfigError("state dimensions do not match the network topology");
}

/// Flux at the vertex end of edge e: node 0 at the start vertex, node M at the end.
inline double flux_at(const DiscreteState& s, const Incidence& inc) {
  const auto& m = s.m[inc.edge];
  return inc.end == EdgeEnd::start ? m.values.front() : m.values.back();
}

/// Signed flux sum sum_e m^e(v) n^e(v) at each interior vertex.
inline std::vector<double> kirchhoff_residual(const DiscreteState& s, const NetworkTopology& topo) {
  require_matching(s, topo);
  std::vector<double> out;
  out.reserve(topo.interior_vertices().size());
  for (std::size_t v : topo.interior_vertices()) {
    double acc = 0.0;
    for (const auto& inc : topo.incident(v)) acc += flux_at(s, inc) * inc.sign();
    out.push_back(acc);
  }
  return out;
}

/// One pipe [0, length] from "v0" to "vL".
inline NetworkTopology single_pipe(double length = 1.0, double area = 1.0, double friction = 1.0,
                                   std::size_t cells = 16) {
  return {{{"v0"}, {"vL"}}, {Edge{"pipe", 0, 1, length, area, friction, cells}}};
}

/// Boundary enthalpies of the single-pipe convergence experiment.
inline BoundaryData single_pipe_boundary() {
  return {{"v0", BoundaryFunction::sin3(0.2, 0.0, 1.0)},
          {"vL", BoundaryFunction::sin3(0.1, std::numbers::pi, 1.0)}};
}

/// GasLib-11 before contraction: 11 vertices, 8 pipes and 3 zero-length
/// by-pass edges (two compressor stations, one valve).
inline NetworkTopology gaslib11_raw(std::size_t cells = 16) {
  std::vector<Vertex> v{{"v1"}, {"v2"}, {"v2'"}, {"v2''"}, {"v3"}, {"v4"},
                        {"v5"}, {"v6"}, {"v6'"}, {"v7"}, {"v8"}};
  auto id = [&](const char* n) {
    return static_cast<std::size_t>(
        std::find_if(v.begin(), v.end(), [&](const Vertex& x) { return x.name == n; }) - v.begin());
  };
  auto pipe = [&](const char* name, const char* a, const char* b) {
    return Edge{name, id(a), id(b), 1.0, 1.0, 1.0, cells};
  };
  auto bypass = [&](const char* name, const char* a, const char* b) {
    return Edge{name, id(a), id(b), 0.0, 1.0, 1.0, cells};
  };
  std::vector<Edge> e{pipe("e1", "v1", "v2"),    pipe("e2", "v2'", "v3"),  pipe("e3", "v5", "v2''"),
                      pipe("e4", "v3", "v4"),    pipe("e5", "v3", "v6"),   pipe("e6", "v2''", "v6"),
                      pipe("e7", "v6'", "v7"),   pipe("e8", "v6'", "v8"),  bypass("cs1", "v2", "v2'"),
                      bypass("cs2", "v6", "v6'"), bypass("vlv", "v2'", "v2''")};
  return {std::move(v), std::move(e)};
}

/// Contracted GasLib-11 network (8 vertices, 8 unit pipes) with its
/// boundary enthalpies.
inline std::pair<NetworkTopology, BoundaryData> gaslib11(std::size_t cells = 16) {
  auto topo = contract_bypass_edges(gaslib11_raw(cells));
  BoundaryData bd{{"v1", BoundaryFunction::sin3(0.2, 0.0, 1.0)},
                  {"v5", BoundaryFunction::sin3(0.3, 0.0, 1.0)},
                  {"v4", BoundaryFunction::constant(1.0)},
                  {"v7", BoundaryFunction::constant(1.0)},
                  {"v8", BoundaryFunction::constant(1.0)}};
  return {std::move(topo), std::move(bd)};
}

}  // namespace gasnet
