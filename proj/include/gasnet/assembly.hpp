#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "gasnet/network.hpp"
#include "gasnet/physics.hpp"
#include "gasnet/quadrature.hpp"

namespace gasnet {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Transient implicit Euler step, or the stationary problem (all time
/// differences dropped).
enum class TimeMode { transient, steady };

/// Time-level data needed by a residual evaluation besides the new iterate.
struct StepContext {
  TimeMode mode = TimeMode::transient;
  const Vector* old = nullptr;  // previous level, transient only
  double dt = 1.0;
  double tau = 0.0;             // time of the new level
};

/// Residual and Jacobian of the mixed scheme on a pipe network.
///
/// Rows follow the DofMap: per edge one mass row per cell (tested with the
/// normalized cell indicator 1/h), one momentum row per flux node (tested
/// with the hat function), then one Kirchhoff row per interior vertex.
/// Interior vertices enter the momentum rows through the enthalpy multiplier
/// h^v r^e(v) n^e(v); boundary vertices through the prescribed h_d^v(tau).
class NetworkAssembler {
 public:
  NetworkAssembler(NetworkTopology topo, const BoundaryData& boundary, PressureLaw law, double epsilon)
      : topo_(std::move(topo)), law_(std::move(law)), eps_(epsilon), dofs_(topo_) {
    require_valid(topo_);
    const auto diag = validate_boundary(topo_, boundary);
    if (!diag.empty()) throw ConfigError(diag.front());
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
    vertex_bc_.resize(topo_.vertex_count());
    for (std::size_t v : topo_.boundary_vertices()) vertex_bc_[v] = boundary.at(topo_.vertices()[v].name);
  }

  const NetworkTopology& topology() const { return topo_; }
  const PressureLaw& law() const { return law_; }
  double epsilon() const { return eps_; }
  const DofMap& dofs() const { return dofs_; }
  std::size_t size() const { return dofs_.size(); }

  double boundary_value(std::size_t v, double tau) const { return vertex_bc_[v](tau); }

  Vector to_vector(const DiscreteState& s) const {
    require_matching(s, topo_);
    Vector x(size());
    dofs_.scatter(s, x);
    return x;
  }

  DiscreteState to_state(const Vector& x, double tau) const {
    DiscreteState s = make_state(topo_);
    dofs_.gather(x, s);
    s.tau = tau;
    return s;
  }

  bool density_positive(const Vector& x) const {
    for (std::size_t e = 0; e < topo_.edge_count(); ++e)
      for (std::size_t c = 0; c < dofs_.cells(e); ++c)
        if (!(x[dofs_.rho(e, c)] > 0.0)) return false;
    return true;
  }

  void residual(const Vector& x, const StepContext& ctx, Vector& r) const {
    r.setZero(size());
    for (std::size_t e = 0; e < topo_.edge_count(); ++e) edge_terms(e, x, ctx, &r, nullptr, 0.0);
    coupling_terms(x, ctx, &r, nullptr);
  }

  /// Analytic Jacobian. `friction_floor` > 0 replaces d(|w|w)/dw = 2|w| by
  /// max(2|w|, floor); the residual is unaffected.
  void jacobian(const Vector& x, const StepContext& ctx, SparseMatrix& J, double friction_floor = 0.0) const {
    std::vector<Triplet> t;
    t.reserve(12 * size());
    for (std::size_t e = 0; e < topo_.edge_count(); ++e) edge_terms(e, x, ctx, nullptr, &t, friction_floor);
    coupling_terms(x, ctx, nullptr, &t);
    J.resize(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
    J.setFromTriplets(t.begin(), t.end());
    J.makeCompressed();
  }

 private:
  void edge_terms(std::size_t e, const Vector& x, const StepContext& ctx, Vector* r, std::vector<Triplet>* t,
                  double floor) const {
    const auto& ed = topo_.edge(e);
    const double a = ed.area, gamma = ed.friction;
    const double h = ed.length / static_cast<double>(ed.cells);
    const bool transient = ctx.mode == TimeMode::transient;
    const double eps2 = eps_ * eps_;
    const bool kinetic = eps2 != 0.0;
    const bool time_w = transient && kinetic;
    const double inv_dt = transient ? 1.0 / ctx.dt : 0.0;

    for (std::size_t c = 0; c < ed.cells; ++c) {
      const auto ir = dofs_.rho(e, c);
      const auto i0 = dofs_.m(e, c), i1 = dofs_.m(e, c + 1);
      const double rho = x[ir], m0 = x[i0], m1 = x[i1];
      detail::require_positive_density(rho, "assemble");

      // mass: a (rho - rho_old)/dt + (m_i - m_{i-1})/h
      if (r) {
        double mass = (m1 - m0) / h;
        if (transient) mass += a * (rho - (*ctx.old)[ir]) * inv_dt;
        (*r)[ir] = mass;
      }
      if (t) {
        t->emplace_back(ir, ir, transient ? a * inv_dt : 0.0);
        t->emplace_back(ir, i0, -1.0 / h);
        t->emplace_back(ir, i1, 1.0 / h);
      }

      double rho_old = 0.0, mo0 = 0.0, mo1 = 0.0;
      if (time_w) {
        rho_old = (*ctx.old)[ir];
        mo0 = (*ctx.old)[i0];
        mo1 = (*ctx.old)[i1];
      }
      const double pot = law_.dpotential(rho);
      const double pot2 = t ? law_.d2potential(rho) : 0.0;
      const double inv_arho = 1.0 / (a * rho);

      // local Jacobian of the two momentum rows w.r.t. (rho, m0, m1)
      double jl[2][3] = {{0, 0, 0}, {0, 0, 0}};
      double rl[2] = {0, 0};
      for (std::size_t q = 0; q < ElementRule::size; ++q) {
        const double xi = ElementRule::nodes[q], W = ElementRule::weights[q];
        const double phi[2] = {1.0 - xi, xi};
        const double m = m0 + (m1 - m0) * xi;
        const double w = m * inv_arho;
        double hh = pot;
        if (kinetic) hh += 0.5 * eps2 * w * w;
        double g = gamma * std::abs(w) * w;
        if (time_w) {
          const double w_old = (mo0 + (mo1 - mo0) * xi) / (a * rho_old);
          g += eps2 * (w - w_old) * inv_dt;
        }
        if (r) {
          rl[0] += h * W * g * phi[0] + W * hh;
          rl[1] += h * W * g * phi[1] - W * hh;
        }
        if (t) {
          const double dwdv[3] = {-w / rho, phi[0] * inv_arho, phi[1] * inv_arho};
          double dgdw = gamma * std::max(2.0 * std::abs(w), floor);
          if (time_w) dgdw += eps2 * inv_dt;
          const double dhdw = kinetic ? eps2 * w : 0.0;
          for (int k = 0; k < 3; ++k) {
            double dh = dhdw * dwdv[k];
            if (k == 0) dh += pot2;
            const double dg = dgdw * dwdv[k];
            jl[0][k] += h * W * dg * phi[0] + W * dh;
            jl[1][k] += h * W * dg * phi[1] - W * dh;
          }
        }
      }
      if (r) {
        (*r)[i0] += rl[0];
        (*r)[i1] += rl[1];
      }
      if (t) {
        const Eigen::Index cols[3] = {static_cast<Eigen::Index>(ir), static_cast<Eigen::Index>(i0),
                                      static_cast<Eigen::Index>(i1)};
        for (int k = 0; k < 3; ++k) {
          t->emplace_back(i0, cols[k], jl[0][k]);
          t->emplace_back(i1, cols[k], jl[1][k]);
        }
      }
    }
  }

  void coupling_terms(const Vector& x, const StepContext& ctx, Vector* r, std::vector<Triplet>* t) const {
    auto node = [&](const Incidence& inc) {
      return dofs_.m(inc.edge, inc.end == EdgeEnd::start ? 0 : topo_.edge(inc.edge).cells);
    };
    for (std::size_t v : topo_.boundary_vertices()) {
      const auto& inc = topo_.incident(v).front();
      if (r) (*r)[node(inc)] += vertex_bc_[v](ctx.tau) * inc.sign();
    }
    const auto& interior = topo_.interior_vertices();
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const auto iv = dofs_.vertex(k);
      for (const auto& inc : topo_.incident(interior[k])) {
        const auto im = node(inc);
        if (r) {
          (*r)[im] += x[iv] * inc.sign();
          (*r)[iv] += x[im] * inc.sign();
        }
        if (t) {
          t->emplace_back(im, iv, inc.sign());
          t->emplace_back(iv, im, inc.sign());
        }
      }
    }
  }

  NetworkTopology topo_;
  PressureLaw law_;
  double eps_;
  DofMap dofs_;
  std::vector<BoundaryFunction> vertex_bc_;
};

/// Stand-alone assembly for one pipe [0, ell] with enthalpy prescribed at
/// both ends. Unknowns are ordered [rho_1..rho_M, m_0..m_M]. Rows are
/// assembled node by node rather than element by element, so it shares no
/// loop structure with NetworkAssembler.
class SinglePipeAssembler {
 public:
  SinglePipeAssembler(double length, double area, double friction, std::size_t cells, BoundaryFunction left,
                      BoundaryFunction right, PressureLaw law, double epsilon)
      : topo_(single_pipe(length, area, friction, cells)),
        left_(left),
        right_(right),
        law_(std::move(law)),
        eps_(epsilon) {}

  const NetworkTopology& topology() const { return topo_; }
  const PressureLaw& law() const { return law_; }
  double epsilon() const { return eps_; }
  std::size_t cells() const { return topo_.edge(0).cells; }
  std::size_t size() const { return 2 * cells() + 1; }

  double boundary_value(std::size_t v, double tau) const { return v == 0 ? left_(tau) : right_(tau); }

  Vector to_vector(const DiscreteState& s) const {
    require_matching(s, topo_);
    const auto M = cells();
    Vector x(size());
    for (std::size_t i = 0; i < M; ++i) x[i] = s.rho[0][i];
    for (std::size_t j = 0; j <= M; ++j) x[M + j] = s.m[0][j];
    return x;
  }

  DiscreteState to_state(const Vector& x, double tau) const {
    DiscreteState s = make_state(topo_);
    const auto M = cells();
    for (std::size_t i = 0; i < M; ++i) s.rho[0][i] = x[i];
    for (std::size_t j = 0; j <= M; ++j) s.m[0][j] = x[M + j];
    s.tau = tau;
    return s;
  }

  bool density_positive(const Vector& x) const {
    for (std::size_t i = 0; i < cells(); ++i)
      if (!(x[i] > 0.0)) return false;
    return true;
  }

  void residual(const Vector& x, const StepContext& ctx, Vector& r) const {
    r.setZero(size());
    const auto M = cells();
    const auto& ed = topo_.edge(0);
    const double h = ed.length / static_cast<double>(M);
    for (std::size_t i = 0; i < M; ++i) {
      detail::require_positive_density(x[i], "single-pipe assemble");
      r[i] = (x[M + i + 1] - x[M + i]) / h;
      if (ctx.mode == TimeMode::transient) r[i] += ed.area * (x[i] - (*ctx.old)[i]) / ctx.dt;
    }
    for (std::size_t j = 0; j <= M; ++j) {
      double acc = 0.0;
      if (j > 0) acc += node_integral(x, ctx, j - 1, /*right_node=*/true, h);
      if (j < M) acc += node_integral(x, ctx, j, /*right_node=*/false, h);
      r[M + j] = acc;
    }
    r[M] -= left_(ctx.tau);
    r[2 * M] += right_(ctx.tau);
  }

  void jacobian(const Vector& x, const StepContext& ctx, SparseMatrix& J, double friction_floor = 0.0) const {
    const auto M = cells();
    const auto& ed = topo_.edge(0);
    const double h = ed.length / static_cast<double>(M);
    const double eps2 = eps_ * eps_;
    const bool transient = ctx.mode == TimeMode::transient;
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < M; ++i) {
      t.emplace_back(i, i, transient ? ed.area / ctx.dt : 0.0);
      t.emplace_back(i, M + i, -1.0 / h);
      t.emplace_back(i, M + i + 1, 1.0 / h);
    }
    // Momentum row of node j against the unknowns of an adjacent cell c.
    for (std::size_t j = 0; j <= M; ++j) {
      for (int side = 0; side < 2; ++side) {
        if ((side == 0 && j == 0) || (side == 1 && j == M)) continue;
        const std::size_t c = side == 0 ? j - 1 : j;
        const bool right_node = side == 0;  // node j is the right end of cell c
        const double rho = x[c];
        const double m_l = x[M + c], m_r = x[M + c + 1];
        double d_rho = 0.0, d_ml = 0.0, d_mr = 0.0;
        for (std::size_t q = 0; q < ElementRule::size; ++q) {
          const double s = ElementRule::nodes[q], W = ElementRule::weights[q];
          const double test = right_node ? s : 1.0 - s;
          const double dtest = right_node ? 1.0 / h : -1.0 / h;
          const double w = (m_l * (1.0 - s) + m_r * s) / (ed.area * rho);
          double slope = ed.friction * std::max(2.0 * std::abs(w), friction_floor);
          if (transient && eps2 != 0.0) slope += eps2 / ctx.dt;
          // w-derivatives: dw/drho = -w/rho, dw/dm_l = (1-s)/(a rho), dw/dm_r = s/(a rho)
          const double wr = -w / rho, wl = (1.0 - s) / (ed.area * rho), wrr = s / (ed.area * rho);
          const double kin = eps2 * w;
          d_rho += h * W * (slope * wr * test - (kin * wr + law_.d2potential(rho)) * dtest);
          d_ml += h * W * (slope * wl * test - kin * wl * dtest);
          d_mr += h * W * (slope * wrr * test - kin * wrr * dtest);
        }
        t.emplace_back(M + j, c, d_rho);
        t.emplace_back(M + j, M + c, d_ml);
        t.emplace_back(M + j, M + c + 1, d_mr);
      }
    }
    J.resize(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
    J.setFromTriplets(t.begin(), t.end());
    J.makeCompressed();
  }

 private:
  // int_{cell c} [eps^2 dw/dt + gamma |w| w] phi_j - h_h phi_j' dx for node j at
  // the left or right end of cell c.
  double node_integral(const Vector& x, const StepContext& ctx, std::size_t c, bool right_node, double h) const {
    const auto M = cells();
    const auto& ed = topo_.edge(0);
    const double eps2 = eps_ * eps_;
    const double rho = x[c];
    double acc = 0.0;
    for (std::size_t q = 0; q < ElementRule::size; ++q) {
      const double s = ElementRule::nodes[q], W = ElementRule::weights[q];
      const double test = right_node ? s : 1.0 - s;
      const double dtest = right_node ? 1.0 / h : -1.0 / h;
      const double w = (x[M + c] * (1.0 - s) + x[M + c + 1] * s) / (ed.area * rho);
      double integrand = ed.friction * std::abs(w) * w * test - law_.dpotential(rho) * dtest;
      if (eps2 != 0.0) {
        integrand -= 0.5 * eps2 * w * w * dtest;
        if (ctx.mode == TimeMode::transient) {
          const auto& o = *ctx.old;
          const double w_old = (o[M + c] * (1.0 - s) + o[M + c + 1] * s) / (ed.area * o[c]);
          integrand += eps2 * (w - w_old) / ctx.dt * test;
        }
      }
      acc += h * W * integrand;
    }
    return acc;
  }

  NetworkTopology topo_;
  BoundaryFunction left_, right_;
  PressureLaw law_;
  double eps_;
};

/// Residual of the scheme for DiscreteStates; state_new.tau selects the
/// boundary data. Pass `state_old == nullptr` for the stationary problem.
inline Vector assemble_residual(const DiscreteState& state_new, const DiscreteState* state_old, double dt,
                                const NetworkTopology& topo, const BoundaryData& boundary,
                                const PressureLaw& law, const ScalingParams& sc) {
  NetworkAssembler as(topo, boundary, law, sc.epsilon);
  const Vector x = as.to_vector(state_new);
  Vector old;
  StepContext ctx{TimeMode::steady, nullptr, dt, state_new.tau};
  if (state_old) {
    old = as.to_vector(*state_old);
    ctx.mode = TimeMode::transient;
    ctx.old = &old;
  }
  Vector r;
  as.residual(x, ctx, r);
  return r;
}

inline SparseMatrix assemble_jacobian(const DiscreteState& state_new, const DiscreteState* state_old, double dt,
                                      const NetworkTopology& topo, const BoundaryData& boundary,
                                      const PressureLaw& law, const ScalingParams& sc) {
  NetworkAssembler as(topo, boundary, law, sc.epsilon);
  const Vector x = as.to_vector(state_new);
  Vector old;
  StepContext ctx{TimeMode::steady, nullptr, dt, state_new.tau};
  if (state_old) {
    old = as.to_vector(*state_old);
    ctx.mode = TimeMode::transient;
    ctx.old = &old;
  }
  SparseMatrix J;
  as.jacobian(x, ctx, J);
  return J;
}

}  // namespace gasnet
