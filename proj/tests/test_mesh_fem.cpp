#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gasnet/mesh_fem.hpp"

using namespace gasnet;

namespace {

// sum c_k x^k
struct Poly {
  std::vector<double> c;
  double operator()(double x) const {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
  }
  Poly derivative() const {
    Poly d;
    for (std::size_t k = 1; k < c.size(); ++k) d.c.push_back(static_cast<double>(k) * c[k]);
    if (d.c.empty()) d.c.push_back(0.0);
    return d;
  }
};

template <class F>
double composite(F&& f, double a, double b, int pieces) {
  const double h = (b - a) / pieces;
  double acc = 0.0;
  for (int k = 0; k < pieces; ++k) acc += integrate_interval<GaussLegendre<5>>(f, a + k * h, h);
  return acc;
}

}  // namespace

TEST(PipeGrid, Geometry) {
  PipeGrid g(2.0, 4);
  EXPECT_EQ(g.cells(), 4u);
  EXPECT_EQ(g.nodes(), 5u);
  EXPECT_DOUBLE_EQ(g.h(), 0.5);
  EXPECT_DOUBLE_EQ(g.node(3), 1.5);
  EXPECT_EQ(g.refined(), PipeGrid(2.0, 8));
  EXPECT_THROW(PipeGrid(1.0, 0), ConfigError);
  EXPECT_THROW(PipeGrid(0.0, 3), ConfigError);
}

TEST(Projection, Examples) {
  const auto c5 = l2_project_p0([](double) { return 5.0; }, PipeGrid(1.0, 7));
  for (double v : c5.values) EXPECT_DOUBLE_EQ(v, 5.0);

  const auto lin = l2_project_p0([](double x) { return x; }, PipeGrid(1.0, 2));
  EXPECT_NEAR(lin[0], 0.25, 1e-15);
  EXPECT_NEAR(lin[1], 0.75, 1e-15);

  // oracle: exact cell averages of x^2, (b^3 - a^3) / (3 (b - a))
  const auto sq = l2_project_p0([](double x) { return x * x; }, PipeGrid(1.0, 2));
  const double cell0 = (0.125 - 0.0) / (3 * 0.5), cell1 = (1.0 - 0.125) / (3 * 0.5);
  EXPECT_NEAR(sq[0], cell0, 1e-15);
  EXPECT_NEAR(sq[1], cell1, 1e-15);
  EXPECT_NEAR(sq[0], 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(sq[1], 7.0 / 12.0, 1e-15);
}

TEST(Interpolation, Examples) {
  const auto c5 = interpolate_p1([](double) { return 5.0; }, PipeGrid(1.0, 3));
  for (double v : c5.values) EXPECT_DOUBLE_EQ(v, 5.0);
  const auto lin = interpolate_p1([](double x) { return x; }, PipeGrid(1.0, 2));
  EXPECT_EQ(lin.values, (std::vector<double>{0.0, 0.5, 1.0}));
  const auto sq = interpolate_p1([](double x) { return x * x; }, PipeGrid(1.0, 2));
  EXPECT_EQ(sq.values, (std::vector<double>{0.0, 0.25, 1.0}));
}

TEST(Derivative, Examples) {
  const PipeGrid g(1.0, 2);
  for (double v : derivative_p1(P1Field(g, {3.0, 3.0, 3.0})).values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(derivative_p1(P1Field(g, {0.0, 0.5, 1.0})).values, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(derivative_p1(P1Field(g, {0.0, 0.25, 1.0})).values, (std::vector<double>{0.5, 1.5}));
}

TEST(Fields, Evaluation) {
  const PipeGrid g(1.0, 2);
  const P1Field u(g, {0.0, 1.0, 4.0});
  EXPECT_DOUBLE_EQ(u.eval(0.25), 0.5);
  EXPECT_DOUBLE_EQ(u.eval(0.75), 2.5);
  EXPECT_DOUBLE_EQ(u.eval(1.0), 4.0);
  const P0Field r(g, {2.0, 3.0});
  EXPECT_DOUBLE_EQ(r.eval(0.1), 2.0);
  EXPECT_DOUBLE_EQ(r.eval(0.9), 3.0);
  EXPECT_THROW(P0Field(g, std::vector<double>{1.0}), ConfigError);
  EXPECT_THROW(P1Field(g, {1.0, 2.0}), ConfigError);
}

TEST(CommutingDiagram, PolynomialsUpToDegreeFour) {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (std::size_t deg = 0; deg <= 4; ++deg)
    for (std::size_t cells : {1u, 2u, 7u, 16u})
      for (double length : {1.0, 2.5}) {
        Poly z;
        for (std::size_t k = 0; k <= deg; ++k) z.c.push_back(coef(gen));
        const PipeGrid g(length, cells);
        const auto lhs = derivative_p1(interpolate_p1(z, g));
        const auto rhs = l2_project_p0(z.derivative(), g);
        for (std::size_t c = 0; c < cells; ++c) EXPECT_NEAR(lhs[c], rhs[c], 1e-13) << deg << " " << cells;
      }
}

TEST(Projection, SupNormContraction) {
  auto f = [](double x) { return std::sin(7.0 * x) + 0.3 * std::cos(19.0 * x); };
  double sup = 0.0;
  for (int k = 0; k <= 20000; ++k) sup = std::max(sup, std::abs(f(k / 20000.0)));
  for (std::size_t cells : {1u, 3u, 10u, 64u}) {
    const PipeGrid g(1.0, cells);
    EXPECT_LE(lp_norm(l2_project_p0(f, g), Norm::linf), sup + 1e-12);
    EXPECT_LE(lp_norm(interpolate_p1(f, g), Norm::linf), sup + 1e-12);
  }
}

TEST(Projection, FirstOrderApproximation) {
  auto f = [](double x) { return std::sin(2.0 * std::numbers::pi * x); };
  auto err_p0 = [&](std::size_t cells) {
    const auto u = l2_project_p0(f, PipeGrid(1.0, cells));
    return std::sqrt(composite(
        [&](double x) {
          const double d = f(x) - u.eval(std::min(x, 1.0 - 1e-15));
          return d * d;
        },
        0.0, 1.0, 4096));
  };
  for (std::size_t cells : {16u, 32u, 64u}) {
    const double ratio = err_p0(cells) / err_p0(2 * cells);
    EXPECT_NEAR(ratio, 2.0, 0.1);
  }
}

TEST(Interpolation, ConvergesAtLeastFirstOrder) {
  auto f = [](double x) { return std::sin(2.0 * std::numbers::pi * x); };
  auto err_p1 = [&](std::size_t cells) {
    const auto u = interpolate_p1(f, PipeGrid(1.0, cells));
    return std::sqrt(composite(
        [&](double x) {
          const double d = f(x) - u.eval(x);
          return d * d;
        },
        0.0, 1.0, 4096));
  };
  for (std::size_t cells : {16u, 32u, 64u}) EXPECT_GE(err_p1(cells) / err_p1(2 * cells), 1.9);
}

TEST(NestedDiff, Examples) {
  const PipeGrid g1(1.0, 1), g2(1.0, 2);
  EXPECT_DOUBLE_EQ(nested_l2_diff(P0Field(g1, {1.0}), P0Field(g2, {0.0, 0.0})), 1.0);
  // oracle: ||x||_{L2(0,1)}^2 = int_0^1 x^2 dx = 1/3
  const double oracle = std::sqrt(integrate_interval<GaussLegendre<3>>([](double x) { return x * x; }, 0.0, 1.0));
  const double d = nested_l2_diff(P1Field(g1, {0.0, 1.0}), P1Field(g2, {0.0, 0.0, 0.0}));
  EXPECT_NEAR(d, oracle, 1e-15);
  EXPECT_NEAR(d, 1.0 / std::sqrt(3.0), 1e-15);
}

TEST(NestedDiff, ZeroAgainstExactRefinement) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const PipeGrid g(1.7, 9);
  P0Field r(g);
  P1Field m(g);
  for (auto& v : r.values) v = u(gen);
  for (auto& v : m.values) v = u(gen);
  EXPECT_EQ(nested_l2_diff(r, prolongate(r)), 0.0);
  EXPECT_NEAR(nested_l2_diff(m, prolongate(m)), 0.0, 1e-15);
}

TEST(NestedDiff, MatchesQuadratureOfTheDifference) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const PipeGrid gc(2.0, 5), gf = gc.refined();
  P0Field rc(gc), rf(gf);
  P1Field mc(gc), mf(gf);
  for (auto* f : {&rc.values, &rf.values, &mc.values, &mf.values})
    for (auto& v : *f) v = u(gen);
  auto sq = [](auto&& a, auto&& b, const PipeGrid& fine) {
    double acc = 0.0;
    for (std::size_t c = 0; c < fine.cells(); ++c)
      acc += integrate_interval<GaussLegendre<3>>(
          [&](double x) {
            const double d = a(x) - b(x);
            return d * d;
          },
          fine.cell_start(c), fine.h());
    return acc;
  };
  const double h = gf.h();
  auto inside = [&](double x) {
    // evaluate P0 fields strictly inside the fine cell containing x
    const auto c = static_cast<std::size_t>(x / h);
    return (static_cast<double>(std::min(c, gf.cells() - 1)) + 0.5) * h;
  };
  const double p0 = sq([&](double x) { return rc.eval(inside(x)); }, [&](double x) { return rf.eval(inside(x)); }, gf);
  const double p1 = sq([&](double x) { return mc.eval(x); }, [&](double x) { return mf.eval(x); }, gf);
  EXPECT_NEAR(nested_l2_diff_squared(rc, rf), p0, 1e-13);
  EXPECT_NEAR(nested_l2_diff_squared(mc, mf), p1, 1e-13);
}

TEST(NestedDiff, RejectsNonNestedGrids) {
  const PipeGrid g(1.0, 4);
  EXPECT_THROW(nested_l2_diff(P0Field(g), P0Field(PipeGrid(1.0, 6))), ConfigError);
  EXPECT_THROW(nested_l2_diff(P1Field(g), P1Field(g)), ConfigError);
  EXPECT_THROW(nested_l2_diff(P1Field(g), P1Field(PipeGrid(2.0, 8))), ConfigError);
}

TEST(LpNorm, Examples) {
  const PipeGrid g1(1.0, 1);
  for (Norm p : {Norm::l2, Norm::l3, Norm::linf}) {
    EXPECT_EQ(lp_norm(P0Field(PipeGrid(1.0, 3)), p), 0.0);
    EXPECT_EQ(lp_norm(P1Field(PipeGrid(1.0, 3)), p), 0.0);
    EXPECT_NEAR(lp_norm(P0Field(PipeGrid(1.0, 3), 2.0), p), 2.0, 1e-15);
  }
  EXPECT_NEAR(lp_norm(P1Field(g1, {0.0, 1.0}), Norm::l2), 1.0 / std::sqrt(3.0), 1e-15);
  // int_0^1 x^3 = 1/4
  EXPECT_NEAR(lp_norm(P1Field(g1, {0.0, 1.0}), Norm::l3), std::cbrt(0.25), 1e-15);
  EXPECT_DOUBLE_EQ(lp_norm(P1Field(g1, {0.5, -2.0}), Norm::linf), 2.0);
  EXPECT_EQ(norm_from_exponent(2), Norm::l2);
  EXPECT_EQ(norm_from_exponent(3), Norm::l3);
  EXPECT_EQ(norm_from_exponent(INFINITY), Norm::linf);
  EXPECT_THROW(norm_from_exponent(1.0), ConfigError);
}
