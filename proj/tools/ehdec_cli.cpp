// ehdec: solve, simulate and reproduce decentralized transmission policies for
// energy harvesting nodes on a collision channel.
//
// Exit status: 0 ok, 1 bad configuration or I/O error, 2 solver did not reach
// the gap tolerance (the report is still written).

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ehdec/ehdec.hpp"

namespace fs = std::filesystem;
using namespace ehdec;

namespace {

struct CommonFlags {
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backup;
  std::optional<double> eps;
  std::optional<int> trials;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON configuration file");
  cmd->add_option("--out-dir", f.out_dir, "Output directory");
  cmd->add_option("--seed", f.seed, "Simulation seed");
  cmd->add_option("--backup", f.backup, "Backup mode: exhaustive | parametric");
  cmd->add_option("--eps", f.eps, "Gap tolerance (absolute)");
  cmd->add_option("--trials", f.trials, "Maximum MPS trials");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig rc = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.seed) rc.simulation.seed = *f.seed;
  if (f.backup) rc.solver.backup = parse_backup_mode(*f.backup);
  if (f.eps) {
    if (*f.eps < 0.0) throw ConfigError("--eps", "must be >= 0");
    rc.solver.eps = *f.eps;
  }
  if (f.trials) {
    if (*f.trials < 1) throw ConfigError("--trials", "must be >= 1");
    rc.solver.max_trials = *f.trials;
  }
  return rc;
}

std::ofstream open_out(const fs::path& p) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

int cmd_solve(const CommonFlags& f, bool dump_values) {
  const RunConfig rc = resolve(f);
  const Scenario sc(rc.network);
  const ValueTable vstar = value_iteration(sc, rc.solver.eps_vi);
  const SolveReport rep = mps_solve(sc, vstar, rc.solver);
  const fs::path dir(f.out_dir);
  open_out(dir / "solve_report.json") << report_to_json(rep, sc).dump(2) << '\n';
  if (dump_values) {
    auto os = open_out(dir / "values.csv");
    write_values_csv(os, vstar, sc);
  }
  std::cout << "centralized " << rep.centralized_value << "\nupper " << rep.upper << "\nlower "
            << rep.lower << "\ngap " << rep.gap << "\ntrials " << rep.trials << "\nconverged "
            << (rep.converged ? "yes" : "no") << '\n';
  return rep.converged ? 0 : 2;
}

int cmd_simulate(const CommonFlags& f, const std::string& report_path) {
  const RunConfig rc = resolve(f);
  const Scenario sc(rc.network);
  const SimulationConfig& sim = rc.simulation;
  SlotStats stats;
  std::optional<ExactMarginals> exact;
  if (sim.policy == PolicySource::centralized) {
    const auto table = greedy_actions(value_iteration(sc, rc.solver.eps_vi), sc);
    stats = simulate(sc, CentralizedActions{&table, &sc.space}, sim);
  } else {
    MarkovPolicy pi;
    if (sim.policy == PolicySource::parametric) {
      if (sim.theta.empty()) throw ConfigError("simulation.theta", "required for parametric policy");
      pi = parametric_policy(sc, sim.theta);
    } else if (!report_path.empty()) {
      std::ifstream in(report_path);
      if (!in) throw ConfigError("--report", "cannot open " + report_path);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError("--report", e.what());
      }
      pi = policy_from_json(doc, sc);
    } else {
      pi = mps_solve(sc, rc.solver).policy;
    }
    stats = simulate(sc, DecentralizedActions{&pi}, sim);
    exact = exact_marginals(pi, sc, sim.slots);
  }
  auto os = open_out(fs::path(f.out_dir) / "slot_stats.csv");
  write_slot_stats_csv(os, stats, exact ? &*exact : nullptr);
  std::cout << "reward " << stats.reward << " +- " << stats.reward_se << '\n';
  return 0;
}

int cmd_experiment(const CommonFlags& f, const std::string& preset_name) {
  const Preset preset = parse_preset(preset_name);
  const RunConfig rc = resolve(f);
  ExperimentOptions opt;
  if (!f.config.empty()) {
    opt.network = rc.network;
    opt.solver = rc.solver;
    opt.simulation = rc.simulation;
  } else {
    opt.solver = rc.solver;
    if (f.seed) opt.simulation.seed = *f.seed;
  }
  for (const auto& p : run_experiment(preset, opt, f.out_dir)) std::cout << p.string() << '\n';
  return 0;
}

int cmd_plot(const std::string& csv, std::string out, const std::string& metric,
             const std::string& title) {
  const CsvTable t = read_csv_file(csv);
  if (out.empty()) out = fs::path(csv).replace_extension(".svg").string();
  auto os = open_out(out);
  plot_csv(t, os, metric, title.empty() ? fs::path(csv).stem().string() : title);
  std::cout << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized transmission policies for energy harvesting nodes"};
  app.require_subcommand(1);

  CommonFlags solve_f, sim_f, exp_f;
  bool dump_values = false;
  auto* solve = app.add_subcommand("solve", "Run value iteration and Markov Policy Search");
  add_common(solve, solve_f);
  solve->add_flag("--dump-values", dump_values, "Also write centralized values to values.csv");

  std::string report_path;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo simulation of a policy");
  add_common(sim, sim_f);
  sim->add_option("--report", report_path, "Use the policy of an existing solve_report.json");

  std::string preset;
  auto* exp = app.add_subcommand("experiment", "Run a figure preset (fig2..fig6)");
  add_common(exp, exp_f);
  exp->add_option("preset", preset, "Preset name")->required();

  std::string csv, svg_out, metric = "tx_prob", title;
  auto* plot = app.add_subcommand("plot", "Render a CSV produced by this tool as SVG");
  plot->add_option("csv", csv, "Input CSV")->required();
  plot->add_option("--out", svg_out, "Output SVG path");
  plot->add_option("--metric", metric, "Column plotted for per-slot CSVs");
  plot->add_option("--title", title, "Chart title");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(solve_f, dump_values);
    if (*sim) return cmd_simulate(sim_f, report_path);
    if (*exp) return cmd_experiment(exp_f, preset);
    if (*plot) return cmd_plot(csv, svg_out, metric, title);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
