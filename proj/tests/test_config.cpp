#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "gasnet/config.hpp"
#include "gasnet/io.hpp"

using namespace gasnet;

namespace {

std::filesystem::path scratch_dir() {
  auto p = std::filesystem::temp_directory_path() / ("gasnet_config_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(p);
  return p;
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST(ParseScenario, DefaultsAreTheSinglePipeExperiment) {
  const auto cfg = parse_scenario("");
  EXPECT_EQ(cfg.topology_source, ScenarioConfig::Topology::single_pipe);
  EXPECT_EQ(cfg.cells, 16u);
  EXPECT_EQ(cfg.steps, 32u);
  EXPECT_EQ(cfg.epsilon, 0.0);
  EXPECT_EQ(cfg.law.kind(), PressureLaw::Kind::isothermal);
  EXPECT_DOUBLE_EQ(cfg.dt(), 1.0 / 32.0);
  EXPECT_FALSE(cfg.bounds.has_value());
}

TEST(ParseScenario, Settings) {
  const auto cfg = parse_scenario(R"(
# comment line
topology = gaslib11
pressure_law = polytropic
kappa = 0.9
exponent = 1.3
eps = 0.01     # trailing comment
cells = 8
dt = 0.0625
newton_tolerance = 1e-10
newton_max_iterations = 20
line_search = off
max_bisections = 2
initial = uniform
initial_rho = 1.05
rho_min = 0.9
rho_max = 1.3
w_max = 0.4
store_trajectory = 2
)");
  EXPECT_EQ(cfg.topology_source, ScenarioConfig::Topology::gaslib11);
  EXPECT_EQ(cfg.topology.edge_count(), 8u);
  EXPECT_EQ(cfg.law.kind(), PressureLaw::Kind::polytropic);
  EXPECT_DOUBLE_EQ(cfg.law.pressure(2.0), 0.9 * std::pow(2.0, 1.3));
  EXPECT_EQ(cfg.epsilon, 0.01);
  EXPECT_EQ(cfg.cells, 8u);
  EXPECT_EQ(cfg.steps, 16u);
  EXPECT_EQ(cfg.solver.tolerance, 1e-10);
  EXPECT_EQ(cfg.solver.max_iterations, 20);
  EXPECT_FALSE(cfg.solver.line_search);
  EXPECT_EQ(cfg.solver.max_bisections, 2);
  EXPECT_EQ(cfg.initial, ScenarioConfig::Initial::uniform);
  EXPECT_EQ(cfg.initial_rho, 1.05);
  ASSERT_TRUE(cfg.bounds.has_value());
  EXPECT_EQ(cfg.bounds->rho_max, 1.3);
  EXPECT_EQ(cfg.bounds->w_max, 0.4);
  EXPECT_EQ(cfg.store_stride, 2u);
}

TEST(ParseScenario, SinglePipeGeometry) {
  const auto cfg = parse_scenario("length = 2\narea = 0.5\nfriction = 3\ncells = 4\nsound_speed = 2\n");
  const auto& e = cfg.topology.edge(0);
  EXPECT_EQ(e.length, 2.0);
  EXPECT_EQ(e.area, 0.5);
  EXPECT_EQ(e.friction, 3.0);
  EXPECT_EQ(cfg.resolved_topology().edge(0).cells, 4u);
  EXPECT_EQ(cfg.law.sound_speed(), 2.0);
}

TEST(ParseScenario, InlineNetworkKeepsOwnCellCounts) {
  const auto cfg = parse_scenario(R"(
vertex a
vertex b
vertex c
edge p a b length=2 cells=6
edge q b c cells=3
boundary a constant 1.1
boundary c sin3 amplitude=0.1 phase=pi
)");
  EXPECT_EQ(cfg.topology_source, ScenarioConfig::Topology::inline_records);
  EXPECT_EQ(cfg.cells, 0u);
  const auto t = cfg.resolved_topology();
  EXPECT_EQ(t.edge(0).cells, 6u);
  EXPECT_EQ(t.edge(1).cells, 3u);
  EXPECT_NEAR(cfg.boundary.at("c")(0.5), 1.0 - 0.1, 1e-15);
  EXPECT_EQ(cfg.refined(2).resolved_topology().edge(1).cells, 6u);
}

TEST(ParseScenario, Errors) {
  EXPECT_THROW(parse_scenario("eps = abc"), ConfigError);
  EXPECT_THROW(parse_scenario("colour = red"), ConfigError);
  EXPECT_THROW(parse_scenario("pipe a b"), ConfigError);
  EXPECT_THROW(parse_scenario("pressure_law = vanderwaals"), ConfigError);
  EXPECT_THROW(parse_scenario("cells = 2.5"), ConfigError);
  EXPECT_THROW(parse_scenario("dt = 0.3"), ConfigError);
  EXPECT_THROW(parse_scenario("dt = 0.25\nsteps = 3"), ConfigError);
  EXPECT_THROW(parse_scenario("initial = warm"), ConfigError);
  EXPECT_THROW(parse_scenario("line_search = maybe"), ConfigError);
  EXPECT_THROW(parse_scenario("tau_max = 0"), ConfigError);
  EXPECT_THROW(parse_scenario("vertex a\nvertex a"), ConfigError);
  EXPECT_THROW(parse_scenario("vertex a\nedge e a b"), ConfigError);
  EXPECT_THROW(parse_scenario("vertex a\nvertex b\nedge e a b colour=1"), ConfigError);
  // boundary data missing for one end
  EXPECT_THROW(parse_scenario("vertex a\nvertex b\nedge e a b\nboundary a constant 1"), ConfigError);
  EXPECT_THROW(parse_scenario("topology = /nonexistent/net.txt"), ConfigError);
  try {
    parse_scenario("eps = 0.1\nsteps = -4\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(NetworkText, RoundTrip) {
  const auto [t, bd] = gaslib11(5);
  const auto text = network_to_text(t, bd);
  const auto [t2, bd2] = parse_network(text);
  ASSERT_EQ(t2.vertex_count(), t.vertex_count());
  ASSERT_EQ(t2.edge_count(), t.edge_count());
  for (std::size_t e = 0; e < t.edge_count(); ++e) {
    EXPECT_EQ(t2.edge(e).name, t.edge(e).name);
    EXPECT_EQ(t2.edge(e).from, t.edge(e).from);
    EXPECT_EQ(t2.edge(e).to, t.edge(e).to);
    EXPECT_EQ(t2.edge(e).cells, 5u);
    EXPECT_EQ(t2.edge(e).length, t.edge(e).length);
  }
  ASSERT_EQ(bd2.size(), bd.size());
  for (const auto& [name, f] : bd)
    for (double tau : {0.0, 0.1, 0.5, 0.9}) EXPECT_EQ(bd2.at(name)(tau), f(tau)) << name;
  EXPECT_EQ(network_to_text(t2, bd2), text);
}

TEST(NetworkText, ContractsBypassEdges) {
  const auto [t, bd] = parse_network(
      "vertex a\nvertex b\nvertex b2\nvertex c\nedge p a b\nedge cs b b2 length=0\nedge q b2 c\n"
      "boundary a constant 1\nboundary c constant 1\n");
  EXPECT_EQ(t.vertex_count(), 3u);
  EXPECT_EQ(t.edge_count(), 2u);
  EXPECT_THROW(parse_network("vertex a\n"), ConfigError);
}

TEST(LoadScenario, ResolvesTopologyRelativeToTheFile) {
  const auto dir = scratch_dir();
  write(dir / "net.txt",
        "vertex a\nvertex b\nedge p a b cells=5\nboundary a constant 1.2\nboundary b constant 1\n");
  write(dir / "run.cfg", "topology = net.txt\neps = 0.5\nsteps = 4\n");
  const auto cfg = load_scenario(dir / "run.cfg");
  EXPECT_EQ(cfg.topology_source, ScenarioConfig::Topology::file);
  EXPECT_EQ(cfg.cells, 0u);
  EXPECT_EQ(cfg.resolved_topology().edge(0).cells, 5u);
  EXPECT_EQ(cfg.boundary.at("a")(0.3), 1.2);
  EXPECT_THROW(load_scenario(dir / "missing.cfg"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Format, DoubleRoundTripIsBitExact) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  for (double v : {0.0, -0.0, 1e-310, std::numeric_limits<double>::max(), 0.1})
    EXPECT_EQ(parse_double(format_double(v)), v);
  EXPECT_TRUE(std::isnan(parse_double(format_double(std::nan("")))));
  EXPECT_EQ(parse_double(format_double(INFINITY)), INFINITY);
  EXPECT_EQ(parse_double("+2.5"), 2.5);
  EXPECT_THROW(parse_double("1.0x"), ConfigError);
  EXPECT_THROW(parse_double(""), ConfigError);
}

TEST(Io, TrajectoryColumnsMatchRowLength) {
  const auto [t, bd] = gaslib11(2);
  const auto header = trajectory_header(t);
  EXPECT_EQ(header.rfind("step,tau,rho:e1:0,rho:e1:1,", 0), 0u);
  std::ostringstream os;
  auto s = make_state(t, 1.0, 0.25, 1.0);
  write_trajectory_row(os, 3, s);
  const auto row = os.str();
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(row.rfind("3,0,1,", 0), 0u);
}

TEST(Io, StepReportColumns) {
  std::ostringstream os;
  StepReport r;
  r.step = 2;
  r.tau = 0.5;
  write_step_report_row(os, r);
  const std::string header = step_report_header;
  const auto row = os.str();
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
}
