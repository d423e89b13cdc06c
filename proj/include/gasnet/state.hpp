#pragma once

#include <vector>

#include "gasnet/mesh_fem.hpp"

namespace gasnet {

/// One time level of the discrete solution: per-edge cell densities, per-edge
/// nodal mass fluxes, and the enthalpy at every interior vertex (in the
/// topology's interior-vertex order).
struct DiscreteState {
  std::vector<P0Field> rho;
  std::vector<P1Field> m;
  std::vector<double> vertex_enthalpy;
  double tau = 0.0;

  std::size_t edge_count() const { return rho.size(); }

  double min_density() const {
    double lo = rho.empty() || rho[0].values.empty() ? 0.0 : rho[0][0];
    for (const auto& r : rho)
      for (double v : r.values) lo = std::min(lo, v);
    return lo;
  }
};

}  // namespace gasnet
