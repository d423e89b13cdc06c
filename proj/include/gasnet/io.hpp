#pragma once

#include <ostream>
#include <string>

#include "gasnet/format.hpp"
#include "gasnet/network.hpp"
#include "gasnet/solver.hpp"

namespace gasnet {

/// Trajectory CSV header: step, tau, then rho:<edge>:<cell>, m:<edge>:<node>
/// and h:<vertex> for interior vertices, in DofMap order.
inline std::string trajectory_header(const NetworkTopology& topo) {
  std::string out = "step,tau";
  for (const auto& e : topo.edges())
    for (std::size_t c = 0; c < e.cells; ++c) out += ",rho:" + e.name + ":" + std::to_string(c);
  for (const auto& e : topo.edges())
    for (std::size_t i = 0; i <= e.cells; ++i) out += ",m:" + e.name + ":" + std::to_string(i);
  for (std::size_t v : topo.interior_vertices()) out += ",h:" + topo.vertices()[v].name;
  return out;
}

inline void write_trajectory_row(std::ostream& os, std::size_t step, const DiscreteState& s) {
  os << step << ',' << format_double(s.tau);
  for (const auto& r : s.rho)
    for (double v : r.values) os << ',' << format_double(v);
  for (const auto& m : s.m)
    for (double v : m.values) os << ',' << format_double(v);
  for (double v : s.vertex_enthalpy) os << ',' << format_double(v);
  os << '\n';
}

inline constexpr const char* step_report_header =
    "step,tau,newton_iterations,residual,energy,dissipation,boundary_power,slack,mass_balance,kirchhoff,"
    "admissible,bisections";

inline void write_step_report_row(std::ostream& os, const StepReport& r) {
  os << r.step << ',' << format_double(r.tau) << ',' << r.newton_iterations << ',' << format_double(r.residual)
     << ',' << format_double(r.energy) << ',' << format_double(r.dissipation) << ','
     << format_double(r.boundary_power) << ',' << format_double(r.slack) << ',' << format_double(r.mass_balance)
     << ',' << format_double(r.kirchhoff) << ',' << (r.admissible ? 1 : 0) << ',' << r.bisections << '\n';
}

}  // namespace gasnet
