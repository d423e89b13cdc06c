#pragma once

#include <string>

#include "gasnet/errors.hpp"
#include "gasnet/physics.hpp"

namespace gasnet {

/// Dimensionless parameters obtained from physical pipe data for a given
/// eps. Composite map: x~ = eps^2 x, t~ = eps^2 t, then tau = eps t~ and
/// w = v / eps, with lambda = 2 d gamma / eps^2.
struct RescaledParams {
  double epsilon = 1.0;
  double gamma = 1.0;
  double length = 1.0;      // rescaled pipe length eps^2 L
  double tau_max = 1.0;     // eps^3 T
  double length_factor = 1.0;    // x~ / x
  double time_factor = 1.0;      // tau / t
  double velocity_factor = 1.0;  // w / v
};

inline RescaledParams rescale_physical(const PhysicalParams& p, double eps) {
  if (!(eps > 0.0)) throw DomainError("rescale_physical: eps must be positive (eps = 0 is a limit model)");
  if (!(p.length > 0.0 && p.diameter > 0.0 && p.friction_factor > 0.0 && p.sound_speed > 0.0 &&
        p.time_horizon > 0.0))
    throw DomainError("rescale_physical: physical parameters must be positive");
  RescaledParams r;
  r.epsilon = eps;
  r.gamma = p.friction_factor * eps * eps / (2.0 * p.diameter);
  r.length_factor = eps * eps;
  r.time_factor = eps * eps * eps;
  r.velocity_factor = 1.0 / eps;
  r.length = r.length_factor * p.length;
  r.tau_max = r.time_factor * p.time_horizon;
  return r;
}

/// Inverse of the friction map: lambda = 2 d gamma / eps^2.
inline double friction_factor_from_gamma(double gamma, double diameter, double eps) {
  if (!(eps > 0.0)) throw DomainError("friction_factor_from_gamma: eps must be positive");
  return 2.0 * diameter * gamma / (eps * eps);
}

}  // namespace gasnet
