#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gasnet/errors.hpp"

namespace gasnet {

namespace detail {

inline void require_positive_density(double rho, const char* where) {
  if (!(rho > 0.0)) {
    std::ostringstream os;
    os << where << ": non-positive density rho = " << rho;
    throw DomainError(os.str());
  }
}

}  // namespace detail

/// Barotropic pressure law p(rho) together with the pressure potential
///
///   P(rho) = rho * int_1^rho p(r) / r^2 dr,
///
/// which satisfies rho P''(rho) = p'(rho) and P(1) = 0. P' is the pressure
/// part of the specific enthalpy.
///
/// Isothermal (p = c^2 rho) and polytropic (p = kappa rho^gamma) laws use
/// closed forms. A general law only needs p; P and P' are then computed by
/// adaptive Gauss-Kronrod quadrature and p' by Richardson-extrapolated central
/// differences unless a derivative is supplied.
class PressureLaw {
 public:
  enum class Kind { isothermal, polytropic, general };

  using Function = std::function<double(double)>;

  static PressureLaw isothermal(double sound_speed) {
    if (!(sound_speed > 0.0)) throw ConfigError("isothermal law: sound speed must be positive");
    PressureLaw law(Kind::isothermal);
    law.c2_ = sound_speed * sound_speed;
    return law;
  }

  static PressureLaw polytropic(double kappa, double exponent) {
    if (!(kappa > 0.0)) throw ConfigError("polytropic law: kappa must be positive");
    if (!(exponent > 1.0)) throw ConfigError("polytropic law: exponent must exceed 1");
    PressureLaw law(Kind::polytropic);
    law.kappa_ = kappa;
    law.exponent_ = exponent;
    return law;
  }

  static PressureLaw general(Function p, std::optional<Function> dp = std::nullopt,
                             std::string name = "general") {
    if (!p) throw ConfigError("general law: pressure function is empty");
    PressureLaw law(Kind::general);
    law.p_ = std::make_shared<Function>(std::move(p));
    if (dp && *dp) law.dp_ = std::make_shared<Function>(std::move(*dp));
    law.name_ = std::move(name);
    return law;
  }

  Kind kind() const { return kind_; }

  std::string name() const {
    switch (kind_) {
      case Kind::isothermal: return "isothermal";
      case Kind::polytropic: return "polytropic";
      case Kind::general: return name_;
    }
    return name_;
  }

  /// c for the isothermal law.
  double sound_speed() const { return std::sqrt(c2_); }

  double pressure(double rho) const {
    detail::require_positive_density(rho, "pressure");
    switch (kind_) {
      case Kind::isothermal: return c2_ * rho;
      case Kind::polytropic: return kappa_ * std::pow(rho, exponent_);
      case Kind::general: return (*p_)(rho);
    }
    return 0.0;
  }

  double dpressure(double rho) const {
    detail::require_positive_density(rho, "dpressure");
    switch (kind_) {
      case Kind::isothermal: return c2_;
      case Kind::polytropic: return kappa_ * exponent_ * std::pow(rho, exponent_ - 1.0);
      case Kind::general: return dp_ ? (*dp_)(rho) : numeric_derivative(rho);
    }
    return 0.0;
  }

  /// P(rho)
  double potential(double rho) const {
    detail::require_positive_density(rho, "potential");
    switch (kind_) {
      case Kind::isothermal: return c2_ * rho * std::log(rho);
      case Kind::polytropic:
        return kappa_ * rho * (std::pow(rho, exponent_ - 1.0) - 1.0) / (exponent_ - 1.0);
      case Kind::general: return rho * integral_p_over_r2(rho);
    }
    return 0.0;
  }

  /// P'(rho) = p(rho)/rho + int_1^rho p(r)/r^2 dr
  double dpotential(double rho) const {
    detail::require_positive_density(rho, "dpotential");
    switch (kind_) {
      case Kind::isothermal: return c2_ * (std::log(rho) + 1.0);
      case Kind::polytropic: {
        const double g = exponent_;
        return kappa_ * (g * std::pow(rho, g - 1.0) - 1.0) / (g - 1.0);
      }
      case Kind::general: return (*p_)(rho) / rho + integral_p_over_r2(rho);
    }
    return 0.0;
  }

  /// P''(rho) = p'(rho)/rho
  double d2potential(double rho) const {
    detail::require_positive_density(rho, "d2potential");
    switch (kind_) {
      case Kind::isothermal: return c2_ / rho;
      case Kind::polytropic: return kappa_ * exponent_ * std::pow(rho, exponent_ - 2.0);
      case Kind::general: return dpressure(rho) / rho;
    }
    return 0.0;
  }

  /// Solves P'(rho) = target for rho > 0. P' is strictly increasing.
  double invert_dpotential(double target) const {
    if (kind_ == Kind::isothermal) return std::exp(target / c2_ - 1.0);
    double lo = 1.0, hi = 1.0;
    while (dpotential(lo) > target) {
      lo *= 0.5;
      if (lo < 1e-300) throw DomainError("invert_dpotential: no density below target enthalpy");
    }
    while (dpotential(hi) < target) {
      hi *= 2.0;
      if (hi > 1e300) throw DomainError("invert_dpotential: no density above target enthalpy");
    }
    double rho = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = dpotential(rho) - target;
      if (f > 0.0) hi = rho; else lo = rho;
      double next = rho - f / d2potential(rho);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - rho) <= 1e-15 * rho) return next;
      rho = next;
    }
    return rho;
  }

 private:
  explicit PressureLaw(Kind kind) : kind_(kind) {}

  double integral_p_over_r2(double rho) const {
    if (rho == 1.0) return 0.0;
    auto f = [this](double r) { return (*p_)(r) / (r * r); };
    double err = 0.0;
    const double val =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 1.0, rho, 30, 1e-12, &err);
    return val;
  }

  double numeric_derivative(double rho) const {
    const auto& p = *p_;
    auto central = [&](double step) { return (p(rho + step) - p(rho - step)) / (2.0 * step); };
    const double step = 1e-3 * rho;
    return (4.0 * central(0.5 * step) - central(step)) / 3.0;
  }

  Kind kind_;
  double c2_ = 1.0;
  double kappa_ = 1.0;
  double exponent_ = 1.4;
  std::shared_ptr<const Function> p_;
  std::shared_ptr<const Function> dp_;
  std::string name_ = "general";
};

/// Scaling parameter epsilon with the bounds the convergence theory assumes.
/// Per-pipe gamma, a, ell live on the network edges; the bar constants here
/// bound them.
struct ScalingParams {
  double epsilon = 0.0;
  double epsilon_max = 1.0;
  double gamma_min = 1.0, gamma_max = 1.0;
  double area_min = 1.0, area_max = 1.0;

  void validate() const {
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
    if (epsilon > epsilon_max) throw ConfigError("epsilon exceeds epsilon_max");
    if (!(gamma_min > 0.0 && gamma_min <= gamma_max)) throw ConfigError("invalid friction bounds");
    if (!(area_min > 0.0 && area_min <= area_max)) throw ConfigError("invalid area bounds");
  }
};

/// Bounds of a subsonic bounded state. The admissible set is the box
/// [lower_factor * rho_min, upper_factor * rho_max] x [-upper_factor * w_max, upper_factor * w_max].
struct AdmissibleBounds {
  double rho_min = 1.0;
  double rho_max = 1.0;
  double w_max = 1.0;
  double lower_factor = 2.0 / 3.0;
  double upper_factor = 3.0 / 2.0;

  double rho_lo() const { return lower_factor * rho_min; }
  double rho_hi() const { return upper_factor * rho_max; }
  double w_hi() const { return upper_factor * w_max; }
};

/// Dimensional pipe data before rescaling.
struct PhysicalParams {
  double length = 1.0;          // L [m]
  double diameter = 1.0;        // d [m]
  double friction_factor = 1.0; // lambda [-]
  double sound_speed = 1.0;     // [m/s]
  double time_horizon = 1.0;    // [s]
};

/// h = eps^2 m^2 / (2 a^2 rho^2) + P'(rho). The kinetic part is dropped, not
/// multiplied by zero, when eps == 0.
inline double enthalpy(const PressureLaw& law, double eps, double a, double rho, double m) {
  detail::require_positive_density(rho, "enthalpy");
  const double pot = law.dpotential(rho);
  if (eps == 0.0) return pot;
  const double w = m / (a * rho);
  return 0.5 * eps * eps * w * w + pot;
}

/// w = m / (a rho)
inline double velocity(double a, double rho, double m) {
  detail::require_positive_density(rho, "velocity");
  return m / (a * rho);
}

/// Samples P'' on [rho_lo, rho_hi] and returns its minimum (c_P).
inline double min_d2potential(const PressureLaw& law, double rho_lo, double rho_hi,
                              int samples = 10000) {
  double cp = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples; ++k) {
    const double rho = rho_lo + (rho_hi - rho_lo) * k / samples;
    cp = std::min(cp, law.d2potential(rho));
  }
  return cp;
}

/// Largest eps_bar for which rho P''(rho) >= 4 eps_bar^2 w_max^2 holds on the
/// enlarged density range (sampled).
inline double max_subsonic_epsilon(const PressureLaw& law, const AdmissibleBounds& bounds,
                                   int samples = 10000) {
  double lowest = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples; ++k) {
    const double rho = bounds.rho_lo() + (bounds.rho_hi() - bounds.rho_lo()) * k / samples;
    lowest = std::min(lowest, rho * law.d2potential(rho));
  }
  return std::sqrt(lowest / (4.0 * bounds.w_max * bounds.w_max));
}

/// Checks rho P''(rho) >= 4 eps_bar^2 w_max^2 on the enlarged density range.
inline bool subsonic_condition_holds(const PressureLaw& law, const AdmissibleBounds& bounds,
                                     double eps_bar, int samples = 10000) {
  // relative slack so that the equality case eps_bar = max_subsonic_epsilon passes
  const double need = 4.0 * eps_bar * eps_bar * bounds.w_max * bounds.w_max * (1.0 - 1e-12);
  for (int k = 0; k <= samples; ++k) {
    const double rho = bounds.rho_lo() + (bounds.rho_hi() - bounds.rho_lo()) * k / samples;
    if (rho * law.d2potential(rho) < need) return false;
  }
  return true;
}

/// Uniform convexity constant of the energy on the admissible set,
/// alpha = min(a_min c_P / 4, a_min rho_min / 6), with c_P = inf P'' over the
/// enlarged density range. Throws if the subsonic condition fails for eps_bar.
inline double convexity_constant(const PressureLaw& law, const AdmissibleBounds& bounds,
                                 double area_min, double eps_bar = 0.0) {
  if (!subsonic_condition_holds(law, bounds, eps_bar))
    throw ConfigError("convexity_constant: subsonic condition violated on the admissible range");
  const double cp = min_d2potential(law, bounds.rho_lo(), bounds.rho_hi());
  return std::min(area_min * cp / 4.0, area_min * bounds.rho_min / 6.0);
}

}  // namespace gasnet
