#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "gasnet/errors.hpp"
#include "gasnet/quadrature.hpp"

namespace gasnet {

/// Uniform grid on [0, ell] with `cells` elements T_i = [x_{i-1}, x_i],
/// i = 1..M, nodes x_i = i h.
class PipeGrid {
 public:
  PipeGrid() = default;
  PipeGrid(double length, std::size_t cells) : length_(length), cells_(cells) {
    if (!(length > 0.0)) throw ConfigError("PipeGrid: length must be positive");
    if (cells < 1) throw ConfigError("PipeGrid: need at least one cell");
  }

  double length() const { return length_; }
  std::size_t cells() const { return cells_; }
  std::size_t nodes() const { return cells_ + 1; }
  double h() const { return length_ / static_cast<double>(cells_); }
  double node(std::size_t i) const { return length_ * static_cast<double>(i) / static_cast<double>(cells_); }
  /// Left endpoint of zero-based cell c (the paper's T_{c+1}).
  double cell_start(std::size_t c) const { return node(c); }

  PipeGrid refined() const { return PipeGrid(length_, 2 * cells_); }

  friend bool operator==(const PipeGrid& a, const PipeGrid& b) {
    return a.length_ == b.length_ && a.cells_ == b.cells_;
  }

 private:
  double length_ = 1.0;
  std::size_t cells_ = 1;
};

/// Piecewise constant field, one value per cell.
struct P0Field {
  PipeGrid grid;
  std::vector<double> values;

  P0Field() = default;
  explicit P0Field(const PipeGrid& g, double fill = 0.0) : grid(g), values(g.cells(), fill) {}
  P0Field(const PipeGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.cells()) throw ConfigError("P0Field: value count does not match grid");
  }

  double operator[](std::size_t c) const { return values[c]; }
  double& operator[](std::size_t c) { return values[c]; }
  /// Value at x (cell containing x; right cell at interior nodes).
  double eval(double x) const {
    const auto c = std::min<std::size_t>(grid.cells() - 1,
                                         static_cast<std::size_t>(std::max(0.0, x / grid.h())));
    return values[c];
  }
};

/// Continuous piecewise linear field, one value per node.
struct P1Field {
  PipeGrid grid;
  std::vector<double> values;

  P1Field() = default;
  explicit P1Field(const PipeGrid& g, double fill = 0.0) : grid(g), values(g.nodes(), fill) {}
  P1Field(const PipeGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.nodes()) throw ConfigError("P1Field: value count does not match grid");
  }

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  double eval(double x) const {
    const double h = grid.h();
    const auto c = std::min<std::size_t>(grid.cells() - 1,
                                         static_cast<std::size_t>(std::max(0.0, x / h)));
    const double t = (x - grid.node(c)) / h;
    return (1.0 - t) * values[c] + t * values[c + 1];
  }
};

/// L2-orthogonal projection onto P0: cell average by 5-point Gauss.
template <class F>
P0Field l2_project_p0(F&& f, const PipeGrid& grid) {
  P0Field out(grid);
  const double h = grid.h();
  for (std::size_t c = 0; c < grid.cells(); ++c)
    out[c] = integrate_interval<GaussLegendre<5>>(f, grid.cell_start(c), h) / h;
  return out;
}

/// Nodal interpolation onto continuous P1.
template <class F>
P1Field interpolate_p1(F&& f, const PipeGrid& grid) {
  P1Field out(grid);
  for (std::size_t i = 0; i < grid.nodes(); ++i) out[i] = f(grid.node(i));
  return out;
}

/// Exact derivative of a P1 field, a P0 field.
inline P0Field derivative_p1(const P1Field& u) {
  P0Field out(u.grid);
  const double h = u.grid.h();
  for (std::size_t c = 0; c < u.grid.cells(); ++c) out[c] = (u[c + 1] - u[c]) / h;
  return out;
}

/// Exact prolongation of a P0 field onto the once-refined grid.
inline P0Field prolongate(const P0Field& u) {
  P0Field out(u.grid.refined());
  for (std::size_t c = 0; c < u.grid.cells(); ++c) out[2 * c] = out[2 * c + 1] = u[c];
  return out;
}

/// Exact prolongation of a P1 field onto the once-refined grid.
inline P1Field prolongate(const P1Field& u) {
  P1Field out(u.grid.refined());
  for (std::size_t c = 0; c < u.grid.cells(); ++c) {
    out[2 * c] = u[c];
    out[2 * c + 1] = 0.5 * (u[c] + u[c + 1]);
  }
  out[2 * u.grid.cells()] = u[u.grid.cells()];
  return out;
}

namespace detail {

inline void require_nested(const PipeGrid& coarse, const PipeGrid& fine) {
  if (fine.cells() != 2 * coarse.cells() || fine.length() != coarse.length()) {
    std::ostringstream os;
    os << "nested_l2_diff: grids are not nested (coarse M=" << coarse.cells()
       << ", fine M=" << fine.cells() << ")";
    throw ConfigError(os.str());
  }
}

}  // namespace detail

/// Squared L2 distance between a field and one on the once-refined grid.
inline double nested_l2_diff_squared(const P0Field& coarse, const P0Field& fine) {
  detail::require_nested(coarse.grid, fine.grid);
  const double hf = fine.grid.h();
  double acc = 0.0;
  for (std::size_t c = 0; c < fine.grid.cells(); ++c) {
    const double d = coarse[c / 2] - fine[c];
    acc += hf * d * d;
  }
  return acc;
}

inline double nested_l2_diff_squared(const P1Field& coarse, const P1Field& fine) {
  detail::require_nested(coarse.grid, fine.grid);
  const P1Field up = prolongate(coarse);
  const double hf = fine.grid.h();
  double acc = 0.0;
  // Difference is linear per fine cell: int d^2 = h (d0^2 + d0 d1 + d1^2) / 3.
  for (std::size_t c = 0; c < fine.grid.cells(); ++c) {
    const double d0 = up[c] - fine[c];
    const double d1 = up[c + 1] - fine[c + 1];
    acc += hf * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
  }
  return acc;
}

/// ||coarse - fine||_{L2}, both sides represented exactly on the fine grid.
template <class Field>
double nested_l2_diff(const Field& coarse, const Field& fine) {
  return std::sqrt(nested_l2_diff_squared(coarse, fine));
}

/// Supported L^p exponents.
enum class Norm { l2, l3, linf };

inline double lp_norm(const P0Field& u, Norm p) {
  const double h = u.grid.h();
  double acc = 0.0;
  for (double v : u.values) {
    const double a = std::abs(v);
    switch (p) {
      case Norm::l2: acc += h * a * a; break;
      case Norm::l3: acc += h * a * a * a; break;
      case Norm::linf: acc = std::max(acc, a); break;
    }
  }
  switch (p) {
    case Norm::l2: return std::sqrt(acc);
    case Norm::l3: return std::cbrt(acc);
    case Norm::linf: return acc;
  }
  return acc;
}

/// L^p norm of a P1 field. p = 2 is exact; p = 3 uses 4-point Gauss per
/// cell, exact unless the field changes sign inside a cell.
inline double lp_norm(const P1Field& u, Norm p) {
  const double h = u.grid.h();
  double acc = 0.0;
  for (std::size_t c = 0; c < u.grid.cells(); ++c) {
    const double u0 = u[c], u1 = u[c + 1];
    switch (p) {
      case Norm::l2: acc += h * (u0 * u0 + u0 * u1 + u1 * u1) / 3.0; break;
      case Norm::l3: {
        using R = GaussLegendre<4>;
        for (std::size_t q = 0; q < R::size; ++q) {
          const double v = std::abs(u0 + (u1 - u0) * R::nodes[q]);
          acc += h * R::weights[q] * v * v * v;
        }
        break;
      }
      case Norm::linf: acc = std::max({acc, std::abs(u0), std::abs(u1)}); break;
    }
  }
  switch (p) {
    case Norm::l2: return std::sqrt(acc);
    case Norm::l3: return std::cbrt(acc);
    case Norm::linf: return acc;
  }
  return acc;
}

/// Parses "2", "3", "inf"; anything else is unsupported.
inline Norm norm_from_exponent(double p) {
  if (p == 2.0) return Norm::l2;
  if (p == 3.0) return Norm::l3;
  if (std::isinf(p) && p > 0) return Norm::linf;
  std::ostringstream os;
  os << "lp_norm: unsupported exponent " << p;
  throw ConfigError(os.str());
}

}  // namespace gasnet
