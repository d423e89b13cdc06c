#pragma once

#include <array>
#include <cstddef>

namespace gasnet {

/// Gauss-Legendre rule mapped to the reference interval [0, 1].
/// Weights sum to one, so an element integral is `h * sum_q w_q f(x_q)`.
template <std::size_t N>
struct GaussLegendre;

template <>
struct GaussLegendre<3> {
  static constexpr std::size_t size = 3;
  static constexpr std::array<double, 3> nodes{
      0.5 - 0.3872983346207416885179265399782400,  // sqrt(3/5)/2
      0.5,
      0.5 + 0.3872983346207416885179265399782400};
  static constexpr std::array<double, 3> weights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
};

template <>
struct GaussLegendre<4> {
  static constexpr std::size_t size = 4;
  static constexpr std::array<double, 4> nodes{
      0.5 - 0.4305681557970262876596226600000000,
      0.5 - 0.1699905217924281324007266146000000,
      0.5 + 0.1699905217924281324007266146000000,
      0.5 + 0.4305681557970262876596226600000000};
  static constexpr std::array<double, 4> weights{
      0.1739274225687269286865319746109997,
      0.3260725774312730713134680253890003,
      0.3260725774312730713134680253890003,
      0.1739274225687269286865319746109997};
};

template <>
struct GaussLegendre<5> {
  static constexpr std::size_t size = 5;
  static constexpr std::array<double, 5> nodes{
      0.5 - 0.4530899229693319963988134391496965,
      0.5 - 0.2692346550528415455486490128,
      0.5,
      0.5 + 0.2692346550528415455486490128,
      0.5 + 0.4530899229693319963988134391496965};
  static constexpr std::array<double, 5> weights{
      0.1184634425280945437571320203599587,
      0.2393143352496832340206457574178191,
      0.2844444444444444444444444444444444,
      0.2393143352496832340206457574178191,
      0.1184634425280945437571320203599587};
};

/// The rule used for every element integral of the scheme.
using ElementRule = GaussLegendre<3>;

/// Integrates f over [x0, x0 + h] with rule R.
template <class R = ElementRule, class F>
double integrate_interval(F&& f, double x0, double h) {
  double acc = 0.0;
  for (std::size_t q = 0; q < R::size; ++q) acc += R::weights[q] * f(x0 + h * R::nodes[q]);
  return h * acc;
}

}  // namespace gasnet
