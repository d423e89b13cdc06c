#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "gasnet/convergence.hpp"

using namespace gasnet;

namespace {

ConvergenceEntry entry(double eps, int r, double er, double em) {
  ConvergenceEntry e;
  e.epsilon = eps;
  e.refinement = r;
  e.h = 1.0 / (16 << r);
  e.dt = 1.0 / (32 << r);
  e.err_rho = er;
  e.err_m = em;
  e.worst_slack = 1e-12 * (r + 1);
  e.runtime_s = 0.125 * r;
  return e;
}

ConvergenceReport sample_report() {
  ConvergenceReport rep;
  rep.entries = {entry(1.0, 0, 0.02, 0.03), entry(1.0, 1, 0.01, 0.02), entry(1.0, 2, 0.005, 1.0 / 3.0 * 0.03),
                 entry(0.1, 0, 0.004, 0.1), entry(0.1, 1, 0.001, 0.05)};
  compute_rates(rep);
  return rep;
}

}  // namespace

TEST(Rates, Examples) {
  EXPECT_DOUBLE_EQ(convergence_rate(0.02, 0.01), 1.0);
  EXPECT_DOUBLE_EQ(convergence_rate(0.04, 0.01), 2.0);
  EXPECT_DOUBLE_EQ(convergence_rate(0.01, 0.01), 0.0);
  EXPECT_NEAR(convergence_rate(1.28e-2, 7.58e-3), 0.7559, 1e-4);
}

TEST(Rates, InvariantUnderCommonScaling) {
  for (double s : {1e-6, 0.37, 1e4})
    EXPECT_NEAR(convergence_rate(s * 3.1e-3, s * 1.7e-3), convergence_rate(3.1e-3, 1.7e-3), 1e-12);
}

TEST(Rates, OnlyBetweenConsecutiveRefinementsOfOneEpsilon) {
  const auto rep = sample_report();
  EXPECT_TRUE(std::isnan(rep.entries[0].rate_rho));
  EXPECT_DOUBLE_EQ(rep.entries[1].rate_rho, 1.0);
  EXPECT_DOUBLE_EQ(rep.entries[2].rate_rho, 1.0);
  EXPECT_TRUE(std::isnan(rep.entries[3].rate_rho));
  EXPECT_DOUBLE_EQ(rep.entries[4].rate_rho, 2.0);
  EXPECT_DOUBLE_EQ(rep.entries[4].rate_m, 1.0);
}

TEST(Report, EmptyReportIsHeaderOnly) {
  EXPECT_EQ(emit_report({}, ReportFormat::csv), std::string(convergence_csv_header) + "\n");
  EXPECT_EQ(parse_report_csv(emit_report({}, ReportFormat::csv)).entries.size(), 0u);
}

TEST(Report, MarkdownHasFourRowsPerEpsilon) {
  const auto md = emit_report(sample_report(), ReportFormat::markdown);
  std::istringstream is(md);
  std::vector<std::string> lines;
  for (std::string l; std::getline(is, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 2u + 4u * 2u);
  EXPECT_EQ(lines[0], "| eps | quantity | r=0 | r=1 | r=2 |");
  EXPECT_EQ(lines[2], "| 1 | err_h(rho) | 2.00e-02 | 1.00e-02 | 5.00e-03 |");
  EXPECT_EQ(lines[3], "|  | rate | --- | 1.00 | 1.00 |");
  EXPECT_EQ(lines[6], "| 0.1 | err_h(rho) | 4.00e-03 | 1.00e-03 |  |");
  EXPECT_EQ(lines[9], "|  | rate | --- | 1.00 |  |");
}

TEST(Report, CsvRoundTripIsBitExact) {
  auto rep = sample_report();
  rep.entries[2].admissible = false;
  rep.entries[2].bisections = 3;
  rep.entries[1].max_mass_balance = 1.0 / 3.0;
  const auto csv = emit_report(rep, ReportFormat::csv);
  const auto back = parse_report_csv(csv);
  ASSERT_EQ(back.entries.size(), rep.entries.size());
  EXPECT_EQ(emit_report(back, ReportFormat::csv), csv);
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const auto &a = rep.entries[i], &b = back.entries[i];
    EXPECT_EQ(a.err_rho, b.err_rho);
    EXPECT_EQ(a.err_m, b.err_m);
    EXPECT_EQ(a.h, b.h);
    EXPECT_EQ(a.admissible, b.admissible);
    EXPECT_EQ(a.bisections, b.bisections);
    EXPECT_EQ(std::isnan(a.rate_m), std::isnan(b.rate_m));
  }
}

TEST(Report, RejectsMalformedCsv) {
  EXPECT_THROW(parse_report_csv("eps,r\n"), ConfigError);
  EXPECT_THROW(parse_report_csv(std::string(convergence_csv_header) + "\n1,0,0.5\n"), ConfigError);
}

TEST(Study, RequiresAtLeastOneRefinement) {
  EXPECT_THROW(run_convergence_study(single_pipe_scenario(), 0, {0.0}), ConfigError);
}

TEST(Study, DeterministicAndIndependentOfThreadCount) {
  auto base = single_pipe_scenario();
  base.cells = 4;
  base.steps = 8;
  const auto a = run_convergence_study(base, 2, {1.0, 0.0});
  const auto b = run_convergence_study(base, 2, {1.0, 0.0});
  const auto c = run_convergence_study(base, 2, {1.0, 0.0}, 3);
  ASSERT_EQ(a.entries.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.entries[i].err_rho, b.entries[i].err_rho);
    EXPECT_EQ(a.entries[i].err_m, b.entries[i].err_m);
    EXPECT_EQ(a.entries[i].err_rho, c.entries[i].err_rho);
    EXPECT_EQ(a.entries[i].err_m, c.entries[i].err_m);
    EXPECT_EQ(a.entries[i].epsilon, c.entries[i].epsilon);
    EXPECT_EQ(a.entries[i].refinement, c.entries[i].refinement);
  }
  EXPECT_EQ(a.entries[0].epsilon, 1.0);
  EXPECT_EQ(a.entries[3].refinement, 1);
  EXPECT_FALSE(std::isnan(a.entries[1].rate_rho));
}

TEST(Study, ErrorsShrinkUnderRefinement) {
  auto base = single_pipe_scenario();
  base.cells = 4;
  base.steps = 8;
  const auto rep = run_convergence_study(base, 3, {0.1});
  for (std::size_t i = 1; i < rep.entries.size(); ++i) {
    EXPECT_LT(rep.entries[i].err_rho, rep.entries[i - 1].err_rho);
    EXPECT_LT(rep.entries[i].err_m, rep.entries[i - 1].err_m);
  }
  for (const auto& e : rep.entries) {
    EXPECT_GE(e.worst_slack, -1e-8);
    EXPECT_LE(e.max_mass_balance, 1e-9);
  }
}

TEST(Study, RestStateHasZeroError) {
  auto base = single_pipe_scenario();
  base.cells = 4;
  base.steps = 4;
  base.boundary = {{"v0", BoundaryFunction::constant(1.0)}, {"vL", BoundaryFunction::constant(1.0)}};
  const auto rest = convergence_pair(base, 0.5, 1);
  EXPECT_EQ(rest.err_rho, 0.0);
  EXPECT_EQ(rest.err_m, 0.0);
}

TEST(Study, CoarsestSinglePipeDensityErrorAtZeroEpsilon) {
  const auto e = convergence_pair(single_pipe_scenario(), 0.0, 0);
  EXPECT_NEAR(e.err_rho, 4.98e-3, 0.15 * 4.98e-3);
  EXPECT_EQ(e.h, 1.0 / 16.0);
  EXPECT_EQ(e.dt, 1.0 / 32.0);
}
