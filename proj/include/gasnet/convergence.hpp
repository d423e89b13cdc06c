#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gasnet/format.hpp"
#include "gasnet/simulate.hpp"

namespace gasnet {

/// Result of one (eps, r) pair: a run at (h_r, dt_r) compared with one at
/// (h_r / 2, dt_r / 2).
struct ConvergenceEntry {
  double epsilon = 0.0;
  int refinement = 0;
  double h = 0.0;
  double dt = 0.0;
  double err_rho = 0.0;
  double rate_rho = std::nan("");
  double err_m = 0.0;
  double rate_m = std::nan("");
  /// min over both runs and all steps of slack / (1 + |H|)
  double worst_slack = std::numeric_limits<double>::infinity();
  double max_mass_balance = 0.0;
  double max_kirchhoff = 0.0;
  bool admissible = true;
  int bisections = 0;
  double runtime_s = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;  // grouped by eps (input order), then r
};

/// log2(coarse / fine)
inline double convergence_rate(double err_coarse, double err_fine) { return std::log2(err_coarse / err_fine); }

/// Fills rate_* from consecutive refinements of the same eps.
inline void compute_rates(ConvergenceReport& rep) {
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    auto& e = rep.entries[i];
    e.rate_rho = e.rate_m = std::nan("");
    if (i == 0) continue;
    const auto& p = rep.entries[i - 1];
    if (p.epsilon != e.epsilon || p.refinement + 1 != e.refinement) continue;
    e.rate_rho = convergence_rate(p.err_rho, e.err_rho);
    e.rate_m = convergence_rate(p.err_m, e.err_m);
  }
}

namespace detail {

inline void absorb(ConvergenceEntry& out, const StepReport& r) {
  out.worst_slack = std::min(out.worst_slack, r.slack / (1.0 + std::abs(r.energy)));
  out.max_mass_balance = std::max(out.max_mass_balance, r.mass_balance);
  out.max_kirchhoff = std::max(out.max_kirchhoff, r.kirchhoff);
  out.admissible = out.admissible && r.admissible;
  out.bisections += r.bisections;
}

}  // namespace detail

/// err_h(u) = max_n ||u_h^n - u_{h/2}^{2n}||_{L2(E)} for one (eps, r). The
/// two runs advance in lockstep (two fine steps per coarse step), so no
/// trajectory is stored. n = 0 is skipped: both start from the same data.
inline ConvergenceEntry convergence_pair(const ScenarioConfig& base, double eps, int r) {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig coarse = base.refined(std::size_t{1} << r);
  coarse.epsilon = eps;
  ScenarioConfig fine = coarse.refined(2);
  coarse.validate();

  const auto topo_c = coarse.resolved_topology(), topo_f = fine.resolved_topology();
  NetworkAssembler sys_c(topo_c, coarse.boundary, coarse.law, eps);
  NetworkAssembler sys_f(topo_f, fine.boundary, fine.law, eps);
  TimeStepper<NetworkAssembler> run_c(sys_c, coarse.solver_params(), initial_state(coarse), coarse.bounds);
  TimeStepper<NetworkAssembler> run_f(sys_f, fine.solver_params(), initial_state(fine), fine.bounds);

  ConvergenceEntry out;
  out.epsilon = eps;
  out.refinement = r;
  out.h = topo_c.max_h();
  out.dt = coarse.dt();
  for (std::size_t n = 0; n < coarse.steps; ++n) {
    try {
      detail::absorb(out, run_c.step());
      detail::absorb(out, run_f.step());
      detail::absorb(out, run_f.step());
    } catch (const std::exception& ex) {
      std::ostringstream os;
      os << "convergence study (eps=" << eps << ", r=" << r << ") step " << n + 1 << ": " << ex.what();
      throw SolverError(os.str(), 0.0, 0);
    }
    const auto& sc = run_c.state();
    const auto& sf = run_f.state();
    double d_rho = 0.0, d_m = 0.0;
    for (std::size_t e = 0; e < topo_c.edge_count(); ++e) {
      d_rho += nested_l2_diff_squared(sc.rho[e], sf.rho[e]);
      d_m += nested_l2_diff_squared(sc.m[e], sf.m[e]);
    }
    out.err_rho = std::max(out.err_rho, std::sqrt(d_rho));
    out.err_m = std::max(out.err_m, std::sqrt(d_m));
  }
  out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// Runs refinements r = 0..refinements-1 for every eps. Independent pairs
/// may run concurrently (`threads` > 1); the report order does not depend on
/// completion order.
inline ConvergenceReport run_convergence_study(const ScenarioConfig& base, int refinements,
                                               const std::vector<double>& eps_list, unsigned threads = 1) {
  if (refinements < 1) throw ConfigError("refinements must be at least 1");
  struct Job {
    double eps;
    int r;
  };
  std::vector<Job> jobs;
  for (double eps : eps_list)
    for (int r = 0; r < refinements; ++r) jobs.push_back({eps, r});

  ConvergenceReport rep;
  rep.entries.resize(jobs.size());
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) rep.entries[i] = convergence_pair(base, jobs[i].eps, jobs[i].r);
  } else {
    // largest jobs first
    std::vector<std::size_t> order(jobs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return jobs[a].r > jobs[b].r; });
    std::vector<std::future<void>> running;
    std::size_t next = 0;
    while (next < order.size() || !running.empty()) {
      while (next < order.size() && running.size() < threads) {
        const auto i = order[next++];
        running.push_back(std::async(std::launch::async, [&, i] {
          rep.entries[i] = convergence_pair(base, jobs[i].eps, jobs[i].r);
        }));
      }
      running.front().get();
      running.erase(running.begin());
    }
  }
  compute_rates(rep);
  return rep;
}

enum class ReportFormat { csv, markdown };

inline constexpr const char* convergence_csv_header =
    "eps,r,h,dt,err_rho,rate_rho,err_m,rate_m,worst_slack,max_mass_balance,max_kirchhoff,admissible,"
    "bisections,runtime_s";

namespace detail {

inline std::string sci3(double v) {
  if (std::isnan(v)) return "---";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

inline std::string fixed2(double v) {
  if (std::isnan(v)) return "---";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

/// CSV: one row per (eps, r), full precision. Markdown: per eps four rows
/// (err_h(rho), rate, err_h(m), rate) with one column per refinement.
inline std::string emit_report(const ConvergenceReport& rep, ReportFormat fmt) {
  std::ostringstream os;
  if (fmt == ReportFormat::csv) {
    os << convergence_csv_header << "\n";
    for (const auto& e : rep.entries) {
      os << format_double(e.epsilon) << ',' << e.refinement << ',' << format_double(e.h) << ','
         << format_double(e.dt) << ',' << format_double(e.err_rho) << ',' << format_double(e.rate_rho) << ','
         << format_double(e.err_m) << ',' << format_double(e.rate_m) << ',' << format_double(e.worst_slack)
         << ',' << format_double(e.max_mass_balance) << ',' << format_double(e.max_kirchhoff) << ','
         << (e.admissible ? 1 : 0) << ',' << e.bisections << ',' << format_double(e.runtime_s) << "\n";
    }
    return os.str();
  }
  int max_r = -1;
  for (const auto& e : rep.entries) max_r = std::max(max_r, e.refinement);
  os << "| eps | quantity |";
  for (int r = 0; r <= max_r; ++r) os << " r=" << r << " |";
  os << "\n|---|---|";
  for (int r = 0; r <= max_r; ++r) os << "---|";
  os << "\n";
  std::size_t i = 0;
  while (i < rep.entries.size()) {
    std::size_t j = i;
    while (j < rep.entries.size() && rep.entries[j].epsilon == rep.entries[i].epsilon) ++j;
    auto row = [&](const std::string& label, const std::string& eps_cell, auto get, auto fmt_cell) {
      os << "| " << eps_cell << " | " << label << " |";
      for (int r = 0; r <= max_r; ++r) {
        std::string cell;
        for (std::size_t k = i; k < j; ++k)
          if (rep.entries[k].refinement == r) cell = fmt_cell(get(rep.entries[k]));
        os << ' ' << cell << " |";
      }
      os << "\n";
    };
    const std::string eps_label = format_double(rep.entries[i].epsilon);
    row("err_h(rho)", eps_label, [](const auto& e) { return e.err_rho; }, detail::sci3);
    row("rate", "", [](const auto& e) { return e.rate_rho; }, detail::fixed2);
    row("err_h(m)", "", [](const auto& e) { return e.err_m; }, detail::sci3);
    row("rate", "", [](const auto& e) { return e.rate_m; }, detail::fixed2);
    i = j;
  }
  return os.str();
}

/// Parses the CSV written by emit_report.
inline ConvergenceReport parse_report_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != convergence_csv_header)
    throw ConfigError("convergence CSV: unexpected header");
  ConvergenceReport rep;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 14) throw ConfigError("convergence CSV: expected 14 columns");
    ConvergenceEntry e;
    e.epsilon = parse_double(f[0]);
    e.refinement = static_cast<int>(parse_double(f[1]));
    e.h = parse_double(f[2]);
    e.dt = parse_double(f[3]);
    e.err_rho = parse_double(f[4]);
    e.rate_rho = parse_double(f[5]);
    e.err_m = parse_double(f[6]);
    e.rate_m = parse_double(f[7]);
    e.worst_slack = parse_double(f[8]);
    e.max_mass_balance = parse_double(f[9]);
    e.max_kirchhoff = parse_double(f[10]);
    e.admissible = f[11] == "1";
    e.bisections = static_cast<int>(parse_double(f[12]));
    e.runtime_s = parse_double(f[13]);
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace gasnet
