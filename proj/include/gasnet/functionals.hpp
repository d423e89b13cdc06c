#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gasnet/network.hpp"
#include "gasnet/physics.hpp"
#include "gasnet/quadrature.hpp"

namespace gasnet {

// Energy-type functionals of a discrete state. All integrals use the element
// rule; rho is constant and w = m / (a rho) linear on each cell.

namespace detail {

/// Calls f(edge, a, gamma, h, rho, w_left, w_right) for every cell.
template <class F>
void for_each_cell(const DiscreteState& s, const NetworkTopology& topo, F&& f) {
  require_matching(s, topo);
  for (std::size_t e = 0; e < topo.edge_count(); ++e) {
    const auto& ed = topo.edge(e);
    const double h = ed.length / static_cast<double>(ed.cells);
    for (std::size_t c = 0; c < ed.cells; ++c) {
      const double rho = s.rho[e][c];
      require_positive_density(rho, "functional");
      const double scale = 1.0 / (ed.area * rho);
      f(e, c, ed.area, ed.friction, h, rho, s.m[e][c] * scale, s.m[e][c + 1] * scale);
    }
  }
}

inline void require_same_grids(const DiscreteState& u, const DiscreteState& v) {
  bool ok = u.rho.size() == v.rho.size() && u.m.size() == v.m.size();
  for (std::size_t e = 0; ok && e < u.rho.size(); ++e)
    ok = u.rho[e].grid == v.rho[e].grid && u.m[e].grid == v.m[e].grid;
  if (!ok) throw ConfigError("states live on different grids");
}

}  // namespace detail

/// H = sum_e int a (eps^2 rho w^2 / 2 + P(rho)) dx
inline double energy(const DiscreteState& s, const NetworkTopology& topo, const PressureLaw& law,
                     const ScalingParams& sc) {
  const double eps2 = sc.epsilon * sc.epsilon;
  double acc = 0.0;
  detail::for_each_cell(s, topo, [&](std::size_t, std::size_t, double a, double, double h, double rho,
                                     double w0, double w1) {
    double kin = 0.0;
    if (eps2 != 0.0)
      for (std::size_t q = 0; q < ElementRule::size; ++q) {
        const double w = w0 + (w1 - w0) * ElementRule::nodes[q];
        kin += ElementRule::weights[q] * 0.5 * eps2 * rho * w * w;
      }
    acc += h * a * (kin + law.potential(rho));
  });
  return acc;
}

/// D = sum_e int a gamma rho |w|^3 dx
inline double dissipation(const DiscreteState& s, const NetworkTopology& topo) {
  double acc = 0.0;
  detail::for_each_cell(s, topo, [&](std::size_t, std::size_t, double a, double gamma, double h,
                                     double rho, double w0, double w1) {
    double cell = 0.0;
    for (std::size_t q = 0; q < ElementRule::size; ++q) {
      const double w = std::abs(w0 + (w1 - w0) * ElementRule::nodes[q]);
      cell += ElementRule::weights[q] * w * w * w;
    }
    acc += h * a * gamma * rho * cell;
  });
  return acc;
}

namespace detail {

/// Calls f(a, gamma, h * weight, rho, rho_hat, w, w_hat) at every quadrature point.
template <class F>
void for_each_point_pair(const DiscreteState& u, const DiscreteState& uh, const NetworkTopology& topo,
                         F&& f) {
  require_matching(u, topo);
  require_matching(uh, topo);
  for (std::size_t e = 0; e < topo.edge_count(); ++e) {
    const auto& ed = topo.edge(e);
    const double h = ed.length / static_cast<double>(ed.cells);
    for (std::size_t c = 0; c < ed.cells; ++c) {
      const double rho = u.rho[e][c], rho_hat = uh.rho[e][c];
      require_positive_density(rho, "relative functional");
      require_positive_density(rho_hat, "relative functional");
      for (std::size_t q = 0; q < ElementRule::size; ++q) {
        const double xi = ElementRule::nodes[q];
        const double m = u.m[e][c] + (u.m[e][c + 1] - u.m[e][c]) * xi;
        const double mh = uh.m[e][c] + (uh.m[e][c + 1] - uh.m[e][c]) * xi;
        f(ed.area, ed.friction, h * ElementRule::weights[q], rho, rho_hat, m / (ed.area * rho),
          mh / (ed.area * rho_hat));
      }
    }
  }
}

}  // namespace detail

/// Bregman distance H(u) - H(u_hat) - <H'(u_hat), u - u_hat>, with
/// H' = (a h, eps^2 m).
inline double relative_energy(const DiscreteState& u, const DiscreteState& u_hat,
                              const NetworkTopology& topo, const PressureLaw& law,
                              const ScalingParams& sc) {
  detail::require_same_grids(u, u_hat);
  const double eps2 = sc.epsilon * sc.epsilon;
  double acc = 0.0;
  detail::for_each_point_pair(u, u_hat, topo,
                              [&](double a, double, double wq, double rho, double rho_hat, double w,
                                  double w_hat) {
                                const double drho = rho - rho_hat, dw = w - w_hat;
                                const double pot = law.potential(rho) - law.potential(rho_hat) -
                                                   law.dpotential(rho_hat) * drho;
                                const double kin = 0.5 * eps2 * (rho * dw * dw + 2.0 * w_hat * drho * dw);
                                acc += wq * a * (pot + kin);
                              });
  return acc;
}

/// int gamma a rho_hat |w - w_hat|^2 (|w_hat| + |w|) / 4 dx
inline double relative_dissipation(const DiscreteState& u, const DiscreteState& u_hat,
                                   const NetworkTopology& topo) {
  detail::require_same_grids(u, u_hat);
  double acc = 0.0;
  detail::for_each_point_pair(u, u_hat, topo,
                              [&](double a, double gamma, double wq, double, double rho_hat, double w,
                                  double w_hat) {
                                const double dw = w - w_hat;
                                acc += wq * 0.25 * gamma * a * rho_hat * dw * dw *
                                       (std::abs(w_hat) + std::abs(w));
                              });
  return acc;
}

/// Difference of two states in the (rho, w) variables. w is linear but
/// discontinuous across cells, so it is stored by cell endpoint values.
struct StateDifference {
  std::vector<P0Field> drho;
  /// dw[e][2c], dw[e][2c+1]: left/right endpoint values on cell c.
  std::vector<std::vector<double>> dw;
};

inline StateDifference difference(const DiscreteState& u, const DiscreteState& u_hat,
                                  const NetworkTopology& topo) {
  detail::require_same_grids(u, u_hat);
  require_matching(u, topo);
  StateDifference d;
  for (std::size_t e = 0; e < topo.edge_count(); ++e) {
    const auto& ed = topo.edge(e);
    P0Field dr(topo.grid(e));
    std::vector<double> dw(2 * ed.cells);
    for (std::size_t c = 0; c < ed.cells; ++c) {
      dr[c] = u.rho[e][c] - u_hat.rho[e][c];
      for (std::size_t k = 0; k < 2; ++k)
        dw[2 * c + k] = velocity(ed.area, u.rho[e][c], u.m[e][c + k]) -
                        velocity(ed.area, u_hat.rho[e][c], u_hat.m[e][c + k]);
    }
    d.drho.push_back(std::move(dr));
    d.dw.push_back(std::move(dw));
  }
  return d;
}

/// ||d||_eps = sqrt(||drho||^2 + eps^2 ||dw||^2), unweighted L2 over the network.
inline double eps_norm(const StateDifference& d, double eps) {
  if (d.drho.size() != d.dw.size()) throw ConfigError("eps_norm: malformed difference");
  double rho2 = 0.0, w2 = 0.0;
  for (std::size_t e = 0; e < d.drho.size(); ++e) {
    if (d.dw[e].size() != 2 * d.drho[e].grid.cells()) throw ConfigError("eps_norm: grid mismatch");
    const double h = d.drho[e].grid.h();
    for (std::size_t c = 0; c < d.drho[e].grid.cells(); ++c) {
      rho2 += h * d.drho[e][c] * d.drho[e][c];
      const double a = d.dw[e][2 * c], b = d.dw[e][2 * c + 1];
      w2 += h * (a * a + a * b + b * b) / 3.0;
    }
  }
  if (eps == 0.0) return std::sqrt(rho2);
  return std::sqrt(rho2 + eps * eps * w2);
}

/// ||d||_{eps,inf} = ||drho||_inf + eps ||dw||_inf
inline double eps_inf_norm(const StateDifference& d, double eps) {
  if (d.drho.size() != d.dw.size()) throw ConfigError("eps_inf_norm: malformed difference");
  double r = 0.0, w = 0.0;
  for (std::size_t e = 0; e < d.drho.size(); ++e) {
    if (d.dw[e].size() != 2 * d.drho[e].grid.cells()) throw ConfigError("eps_inf_norm: grid mismatch");
    for (double v : d.drho[e].values) r = std::max(r, std::abs(v));
    for (double v : d.dw[e]) w = std::max(w, std::abs(v));
  }
  return r + eps * w;
}

inline double eps_norm(const DiscreteState& u, const DiscreteState& u_hat, const NetworkTopology& topo,
                       double eps) {
  return eps_norm(difference(u, u_hat, topo), eps);
}

/// Location where a state leaves the admissible box.
struct AdmissibilityViolation {
  enum class Kind { density_low, density_high, velocity };
  std::size_t edge;
  std::size_t cell;
  Kind kind;
  double value;
};

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<bool> edge_admissible;
  std::vector<AdmissibilityViolation> violations;
};

/// Classifies a state against the admissible box. w is checked at both
/// endpoints of each cell, where the linear w attains its extrema.
inline AdmissibilityReport admissible(const DiscreteState& s, const AdmissibleBounds& b,
                                      const NetworkTopology& topo) {
  using V = AdmissibilityViolation;
  AdmissibilityReport rep;
  rep.edge_admissible.assign(topo.edge_count(), true);
  for (std::size_t e = 0; e < topo.edge_count() && e < s.rho.size(); ++e) {
    const auto& ed = topo.edge(e);
    for (std::size_t c = 0; c < s.rho[e].values.size(); ++c) {
      const double rho = s.rho[e][c];
      auto flag = [&](V::Kind k, double v) {
        rep.admissible = false;
        rep.edge_admissible[e] = false;
        rep.violations.push_back({e, c, k, v});
      };
      if (!(rho >= b.rho_lo())) {
        flag(V::Kind::density_low, rho);
        continue;
      }
      if (rho > b.rho_hi()) flag(V::Kind::density_high, rho);
      for (std::size_t k = 0; k < 2; ++k) {
        const double w = s.m[e][c + k] / (ed.area * rho);
        if (std::abs(w) > b.w_hi()) {
          flag(V::Kind::velocity, w);
          break;
        }
      }
    }
  }
  return rep;
}

}  // namespace gasnet
