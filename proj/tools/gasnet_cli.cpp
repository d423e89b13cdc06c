#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gasnet/gasnet.hpp"

using namespace gasnet;

namespace {

struct Options {
  std::string config;
  std::vector<double> eps;
  int refinements = 6;
  std::string out;
  std::string format = "markdown";
  std::size_t store_trajectory = 0;
  std::string trajectory_out = "trajectory.csv";
  unsigned threads = 1;
  bool print_network = false;
  PhysicalParams physical;
  double rescale_eps = 1.0;
};

// Writes to the --out file, or stdout when none is given.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

ScenarioConfig base_config(const Options& o, ScenarioConfig fallback) {
  return o.config.empty() ? fallback : load_scenario(o.config);
}

int run_simulate(const Options& o) {
  auto cfg = base_config(o, single_pipe_scenario());
  if (!o.eps.empty()) {
    if (o.eps.size() != 1) throw ConfigError("simulate takes a single --eps value");
    cfg.epsilon = o.eps.front();
  }
  if (o.store_trajectory > 0) cfg.store_stride = o.store_trajectory;
  const auto topo = cfg.resolved_topology();

  Sink sink(o.out);
  auto& os = sink.stream();
  os << step_report_header << "\n";
  const auto res = simulate(cfg, [&](const DiscreteState&, const StepReport& r) { write_step_report_row(os, r); });

  if (cfg.store_stride > 0) {
    std::ofstream traj(o.trajectory_out);
    if (!traj) throw ConfigError("cannot write '" + o.trajectory_out + "'");
    traj << trajectory_header(topo) << "\n";
    for (std::size_t k = 0; k < res.trajectory.size(); ++k)
      write_trajectory_row(traj, k * cfg.store_stride, res.trajectory[k]);
  }
  for (const auto& d : res.deviations) std::cerr << "note: " << d << "\n";
  return 0;
}

int run_converge(const Options& o, ScenarioConfig fallback) {
  const auto base = base_config(o, std::move(fallback));
  const std::vector<double> eps = o.eps.empty() ? std::vector<double>{1.0, 0.1, 0.01, 0.001, 0.0} : o.eps;
  const auto fmt = o.format == "csv" ? ReportFormat::csv : ReportFormat::markdown;
  const auto rep = run_convergence_study(base, o.refinements, eps, o.threads);
  Sink sink(o.out);
  sink.stream() << emit_report(rep, fmt);
  return 0;
}

int run_gaslib(const Options& o) {
  if (o.print_network) {
    const auto [topo, bd] = gaslib11();
    Sink sink(o.out);
    sink.stream() << network_to_text(topo, bd);
    return 0;
  }
  return run_converge(o, gaslib11_scenario());
}

int run_rescale(const Options& o) {
  const auto r = rescale_physical(o.physical, o.rescale_eps);
  Sink sink(o.out);
  auto& os = sink.stream();
  os << "eps = " << format_double(r.epsilon) << "\n"
     << "friction = " << format_double(r.gamma) << "\n"
     << "length = " << format_double(r.length) << "\n"
     << "tau_max = " << format_double(r.tau_max) << "\n"
     << "# x_rescaled = " << format_double(r.length_factor) << " * x\n"
     << "# tau = " << format_double(r.time_factor) << " * t\n"
     << "# w = " << format_double(r.velocity_factor) << " * v\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed finite element simulation of gas flow in pipes and pipe networks"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Scenario file (key = value settings and network records)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output file (default: stdout)");
  };
  auto add_study = [&](CLI::App* sub) {
    sub->add_option("--eps", o.eps, "Comma-separated list of eps values")->delimiter(',');
    sub->add_option("--refinements", o.refinements, "Number of refinement levels r = 0..n-1")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "markdown"}));
    sub->add_option("--threads", o.threads, "Concurrent simulations")->check(CLI::PositiveNumber);
  };

  auto* sim = app.add_subcommand("simulate", "Run one simulation and write per-step diagnostics as CSV");
  add_common(sim);
  sim->add_option("--eps", o.eps, "eps for this run (overrides the config)")->delimiter(',');
  sim->add_option("--store-trajectory", o.store_trajectory, "Store every n-th state (0 = none)");
  sim->add_option("--trajectory-out", o.trajectory_out, "Trajectory CSV path");

  auto* conv = app.add_subcommand("converge", "Self-convergence study on the configured scenario");
  add_common(conv);
  add_study(conv);

  auto* gas = app.add_subcommand("gaslib11", "Self-convergence study on the GasLib-11 network");
  add_common(gas);
  add_study(gas);
  gas->add_flag("--print-network", o.print_network, "Write the contracted network as records and exit");

  auto* resc = app.add_subcommand("rescale", "Map physical pipe data to the dimensionless model");
  resc->add_option("--out", o.out, "Output file (default: stdout)");
  resc->add_option("--eps", o.rescale_eps, "Scaling parameter eps > 0")->required();
  resc->add_option("--length", o.physical.length, "Pipe length [m]");
  resc->add_option("--diameter", o.physical.diameter, "Pipe diameter [m]");
  resc->add_option("--friction-factor", o.physical.friction_factor, "Darcy friction factor");
  resc->add_option("--sound-speed", o.physical.sound_speed, "Sound speed [m/s]");
  resc->add_option("--time", o.physical.time_horizon, "Time horizon [s]");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(o);
    if (conv->parsed()) return run_converge(o, single_pipe_scenario());
    if (gas->parsed()) return run_gaslib(o);
    if (resc->parsed()) return run_rescale(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
