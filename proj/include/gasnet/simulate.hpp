#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gasnet/config.hpp"
#include "gasnet/solver.hpp"

namespace gasnet {

/// Initial state: the stationary solution for the boundary data at tau = 0,
/// or Pi_h rho0 / I_h m0 of uniform fields.
inline DiscreteState initial_state(const ScenarioConfig& cfg) {
  const auto topo = cfg.resolved_topology();
  if (cfg.initial == ScenarioConfig::Initial::steady)
    return steady_state(topo, cfg.boundary, cfg.law, cfg.epsilon, cfg.solver_params(), 0.0);
  DiscreteState s = make_state(topo);
  for (std::size_t e = 0; e < topo.edge_count(); ++e) {
    s.rho[e] = l2_project_p0([&](double) { return cfg.initial_rho; }, topo.grid(e));
    s.m[e] = interpolate_p1([&](double) { return cfg.initial_m; }, topo.grid(e));
  }
  const double mean = mean_boundary_enthalpy(topo, cfg.boundary, 0.0);
  s.vertex_enthalpy.assign(topo.interior_vertices().size(), mean);
  return s;
}

struct SimulationResult {
  std::vector<StepReport> reports;
  /// Initial state and every store_stride-th state (empty if stride is 0).
  std::vector<DiscreteState> trajectory;
  DiscreteState final_state;
  /// Human-readable notes on steps that needed dt bisection.
  std::vector<std::string> deviations;
};

using StepObserver = std::function<void(const DiscreteState&, const StepReport&)>;

/// Runs the implicit Euler loop for `cfg.steps` steps.
inline SimulationResult simulate(const ScenarioConfig& cfg, const StepObserver& observer = {}) {
  cfg.validate();
  const auto topo = cfg.resolved_topology();
  NetworkAssembler sys(topo, cfg.boundary, cfg.law, cfg.epsilon);
  const DiscreteState init = initial_state(cfg);
  TimeStepper<NetworkAssembler> stepper(sys, cfg.solver_params(), init, cfg.bounds);
  SimulationResult out;
  if (cfg.store_stride > 0) out.trajectory.push_back(init);
  for (std::size_t n = 0; n < cfg.steps; ++n) {
    StepReport rep;
    try {
      rep = stepper.step();
    } catch (const std::exception& ex) {
      throw SolverError("step " + std::to_string(n + 1) + " failed: " + ex.what(), 0.0, 0);
    }
    if (rep.bisections > 0)
      out.deviations.push_back("step " + std::to_string(rep.step) + ": dt halved " +
                               std::to_string(rep.bisections) + " time(s)");
    if (observer) observer(stepper.state(), rep);
    if (cfg.store_stride > 0 && (n + 1) % cfg.store_stride == 0) out.trajectory.push_back(stepper.state());
    out.reports.push_back(rep);
  }
  out.final_state = stepper.state();
  return out;
}

}  // namespace gasnet
