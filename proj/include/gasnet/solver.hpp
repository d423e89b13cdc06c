#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "gasnet/assembly.hpp"
#include "gasnet/functionals.hpp"

namespace gasnet {

struct SolverParams {
  /// Newton stops when the sup-norm of the residual is at or below this.
  double tolerance = 1e-11;
  int max_iterations = 50;
  bool line_search = true;
  /// Smallest accepted line-search fraction of the full Newton step.
  double min_step = 1e-4;
  /// Lower bound sqrt(|R|_inf) on the friction slope 2|w| in the Newton
  /// matrix; keeps the matrix regular at w = 0 when eps = 0. Off = exact Newton.
  bool regularize_friction = true;
  double dt = 1.0 / 32.0;
  std::size_t steps = 32;
  /// Halvings of dt tried when a step fails to converge.
  int max_bisections = 3;
};

struct NewtonResult {
  int iterations = 0;
  double residual = 0.0;
};

/// Newton's method with backtracking line search for a system exposing
/// residual(x, ctx, r), jacobian(x, ctx, J, floor) and density_positive(x).
/// The sparsity pattern is analysed once and reused across solves.
template <class System>
class NewtonSolver {
 public:
  NewtonSolver(const System& sys, SolverParams params) : sys_(&sys), params_(params) {}

  /// Solves in place. On failure throws SolverError and leaves x unchanged.
  NewtonResult solve(Vector& x, const StepContext& ctx) {
    Vector y = x, r, r_trial, dx, y_trial;
    sys_->residual(y, ctx, r);
    double res = r.template lpNorm<Eigen::Infinity>();
    int it = 0;
    while (!(res <= params_.tolerance)) {
      if (it >= params_.max_iterations) {
        std::ostringstream os;
        os << "Newton did not converge in " << it << " iterations (residual " << res << ")";
        throw SolverError(os.str(), res, it);
      }
      ++it;
      const double floor = params_.regularize_friction ? std::sqrt(res) : 0.0;
      sys_->jacobian(y, ctx, J_, floor);
      if (!analysed_ || J_.nonZeros() != pattern_nnz_) {
        lu_.analyzePattern(J_);
        analysed_ = true;
        pattern_nnz_ = J_.nonZeros();
      }
      lu_.factorize(J_);
      if (lu_.info() != Eigen::Success)
        throw SolverError("Newton: singular Jacobian: " + lu_.lastErrorMessage(), res, it);
      dx = lu_.solve(-r);
      if (!dx.allFinite()) throw SolverError("Newton: non-finite update", res, it);

      const double norm0 = r.norm();
      double lambda = 1.0;
      bool accepted = false;
      while (true) {
        y_trial = y + lambda * dx;
        if (sys_->density_positive(y_trial)) {
          sys_->residual(y_trial, ctx, r_trial);
          const double n1 = r_trial.norm();
          if (!params_.line_search || n1 <= (1.0 - 1e-4 * lambda) * norm0 || !std::isfinite(norm0)) {
            accepted = std::isfinite(n1);
            if (accepted) break;
          }
        }
        if (!params_.line_search || lambda * 0.5 < params_.min_step) break;
        lambda *= 0.5;
      }
      if (!accepted) {
        // Take the shortest step if it keeps the density positive; residual
        // may stall at roundoff level close to the solution.
        if (!sys_->density_positive(y_trial))
          throw SolverError("Newton: line search cannot keep density positive", res, it);
        sys_->residual(y_trial, ctx, r_trial);
        if (!r_trial.allFinite()) throw SolverError("Newton: non-finite residual", res, it);
      }
      y.swap(y_trial);
      r.swap(r_trial);
      res = r.template lpNorm<Eigen::Infinity>();
    }
    x = y;
    return {it, res};
  }

  const SolverParams& params() const { return params_; }

 private:
  const System* sys_;
  SolverParams params_;
  SparseMatrix J_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  bool analysed_ = false;
  Eigen::Index pattern_nnz_ = 0;
};

/// Per-step diagnostics of the time loop.
struct StepReport {
  std::size_t step = 0;
  double tau = 0.0;
  int newton_iterations = 0;
  double residual = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
  /// -sum over boundary vertices of h_d^v m^e(v) n^e(v)
  double boundary_power = 0.0;
  /// boundary_power - (H^n - H^{n-1})/dt - D^n
  double slack = 0.0;
  /// max over cells of |a h (rho^n - rho^{n-1}) + dt (m_i - m_{i-1})|
  double mass_balance = 0.0;
  /// max |Kirchhoff sum| over interior vertices
  double kirchhoff = 0.0;
  bool admissible = true;
  /// dt halvings needed (0 = fixed step as configured)
  int bisections = 0;
};

namespace detail {

inline double boundary_power(const DiscreteState& s, const NetworkTopology& topo,
                             const std::function<double(std::size_t, double)>& bc) {
  double acc = 0.0;
  for (std::size_t v : topo.boundary_vertices()) {
    const auto& inc = topo.incident(v).front();
    acc -= bc(v, s.tau) * flux_at(s, inc) * inc.sign();
  }
  return acc;
}

inline double mass_balance(const DiscreteState& now, const DiscreteState& old, const NetworkTopology& topo,
                           double dt) {
  double worst = 0.0;
  for (std::size_t e = 0; e < topo.edge_count(); ++e) {
    const auto& ed = topo.edge(e);
    const double h = ed.length / static_cast<double>(ed.cells);
    for (std::size_t c = 0; c < ed.cells; ++c) {
      const double v = ed.area * h * (now.rho[e][c] - old.rho[e][c]) + dt * (now.m[e][c + 1] - now.m[e][c]);
      worst = std::max(worst, std::abs(v));
    }
  }
  return worst;
}

}  // namespace detail

/// Implicit Euler time loop for an assembler (network or single pipe).
template <class System>
class TimeStepper {
 public:
  TimeStepper(const System& sys, SolverParams params, const DiscreteState& initial,
              std::optional<AdmissibleBounds> bounds = std::nullopt)
      : sys_(&sys), params_(params), newton_(sys, params), bounds_(bounds) {
    x_ = sys.to_vector(initial);
    tau_ = initial.tau;
    state_ = sys.to_state(x_, tau_);
    energy_ = energy(state_, sys.topology(), sys.law(), scaling());
  }

  const DiscreteState& state() const { return state_; }
  double tau() const { return tau_; }
  std::size_t step_index() const { return step_; }

  /// Advances by params.dt. Falls back to 2^k substeps (k <= max_bisections)
  /// when Newton fails; the report counts them.
  StepReport step() {
    const DiscreteState old_state = state_;
    const double old_energy = energy_;
    StepReport rep;
    rep.step = step_ + 1;
    double worst_slack = std::numeric_limits<double>::infinity();
    int iters = 0;
    double res = 0.0;
    int level = 0;
    for (;; ++level) {
      const std::size_t sub = std::size_t{1} << level;
      const double h = params_.dt / static_cast<double>(sub);
      Vector x = x_;
      double e_prev = energy_;
      double tau = tau_;
      double slack = std::numeric_limits<double>::infinity();
      try {
        int it_sum = 0;
        for (std::size_t k = 0; k < sub; ++k) {
          const Vector old = x;
          const double t_new = tau_ + params_.dt * static_cast<double>(k + 1) / static_cast<double>(sub);
          StepContext ctx{TimeMode::transient, &old, h, t_new};
          const auto nr = newton_.solve(x, ctx);
          it_sum += nr.iterations;
          res = nr.residual;
          const auto s = sys_->to_state(x, t_new);
          const double e_new = energy(s, sys_->topology(), sys_->law(), scaling());
          const double d = dissipation(s, sys_->topology());
          const double bp = boundary_power(s);
          slack = std::min(slack, bp - (e_new - e_prev) / h - d);
          e_prev = e_new;
          tau = t_new;
        }
        x_ = std::move(x);
        tau_ = tau;
        energy_ = e_prev;
        iters = it_sum;
        worst_slack = slack;
        break;
      } catch (const SolverError&) {
        if (level >= params_.max_bisections) throw;
      } catch (const DomainError&) {
        if (level >= params_.max_bisections) throw;
      }
    }
    ++step_;
    state_ = sys_->to_state(x_, tau_);
    const auto& topo = sys_->topology();
    rep.tau = tau_;
    rep.newton_iterations = iters;
    rep.residual = res;
    rep.energy = energy_;
    rep.dissipation = dissipation(state_, topo);
    rep.boundary_power = boundary_power(state_);
    rep.slack = level == 0 ? rep.boundary_power - (energy_ - old_energy) / params_.dt - rep.dissipation
                           : worst_slack;
    rep.mass_balance = detail::mass_balance(state_, old_state, topo, params_.dt);
    double kmax = 0.0;
    for (double k : kirchhoff_residual(state_, topo)) kmax = std::max(kmax, std::abs(k));
    rep.kirchhoff = kmax;
    if (bounds_) rep.admissible = admissible(state_, *bounds_, topo).admissible;
    rep.bisections = level;
    return rep;
  }

 private:
  ScalingParams scaling() const {
    ScalingParams sc;
    sc.epsilon = sys_->epsilon();
    sc.epsilon_max = std::max(1.0, sc.epsilon);
    return sc;
  }

  double boundary_power(const DiscreteState& s) const {
    return detail::boundary_power(s, sys_->topology(),
                                  [this](std::size_t v, double t) { return sys_->boundary_value(v, t); });
  }

  const System* sys_;
  SolverParams params_;
  NewtonSolver<System> newton_;
  std::optional<AdmissibleBounds> bounds_;
  Vector x_;
  double tau_ = 0.0;
  double energy_ = 0.0;
  std::size_t step_ = 0;
  DiscreteState state_;
};

/// Mean of the boundary enthalpies at time tau.
inline double mean_boundary_enthalpy(const NetworkTopology& topo, const BoundaryData& bd, double tau) {
  double acc = 0.0;
  for (std::size_t v : topo.boundary_vertices()) acc += bd.at(topo.vertices()[v].name)(tau);
  return acc / static_cast<double>(topo.boundary_vertices().size());
}

/// Stationary solution for the boundary data frozen at tau. Starts from the
/// uniform state rho = (P')^{-1}(mean boundary enthalpy), m = 0; if Newton
/// fails, walks the boundary data from the common mean to the target in four
/// continuation steps.
inline DiscreteState steady_state(const NetworkTopology& topo, const BoundaryData& bd, const PressureLaw& law,
                                  double epsilon, const SolverParams& params, double tau = 0.0) {
  const auto diag = validate_boundary(topo, bd);
  if (!diag.empty()) throw ConfigError(diag.front());
  const double mean = mean_boundary_enthalpy(topo, bd, tau);
  const double rho_star = law.invert_dpotential(mean);
  DiscreteState init = make_state(topo, rho_star, 0.0, mean);
  init.tau = tau;

  auto solve_for = [&](const BoundaryData& data, Vector& x) {
    NetworkAssembler as(topo, data, law, epsilon);
    NewtonSolver<NetworkAssembler> newton(as, params);
    StepContext ctx{TimeMode::steady, nullptr, 1.0, tau};
    newton.solve(x, ctx);
  };

  NetworkAssembler probe(topo, bd, law, epsilon);
  Vector x = probe.to_vector(init);
  try {
    solve_for(bd, x);
    return probe.to_state(x, tau);
  } catch (const SolverError&) {
  } catch (const DomainError&) {
  }
  x = probe.to_vector(init);
  constexpr int stages = 4;
  for (int k = 1; k <= stages; ++k) {
    BoundaryData staged;
    for (const auto& [name, f] : bd)
      staged[name] = BoundaryFunction::constant(mean + (f(tau) - mean) * k / static_cast<double>(stages));
    try {
      solve_for(staged, x);
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("steady_state: continuation exhausted: ") + ex.what());
    }
  }
  return probe.to_state(x, tau);
}

}  // namespace gasnet
