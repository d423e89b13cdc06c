#pragma once

#include <stdexcept>
#include <string>

namespace gasnet {

/// Argument outside the domain of a constitutive relation (e.g. rho <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent problem setup: bad topology, violated subsonic condition,
/// malformed config file, mismatched grids.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton failure. Carries the last residual norm and iteration count.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace gasnet
