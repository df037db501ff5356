#pragma once

// Figure-style experiment presets on the two-node scenario.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "ehdec/centralized.hpp"
#include "ehdec/config_io.hpp"
#include "ehdec/simulate.hpp"
#include "ehdec/solver.hpp"

namespace ehdec {

enum class Preset { fig2, fig3, fig4, fig5, fig6 };

inline Preset parse_preset(const std::string& s) {
  if (s == "fig2") return Preset::fig2;
  if (s == "fig3") return Preset::fig3;
  if (s == "fig4") return Preset::fig4;
  if (s == "fig5") return Preset::fig5;
  if (s == "fig6") return Preset::fig6;
  throw std::invalid_argument("unknown preset \"" + s + "\" (expected fig2..fig6)");
}

struct ExperimentOptions {
  NetworkConfig network = NetworkConfig::two_node_default();
  SolverOptions solver;
  SimulationConfig simulation = [] {
    SimulationConfig sim;
    sim.slots = 201;
    return sim;
  }();
  std::vector<double> p_b_sweep{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
};

struct TimeSeriesResult {
  SolveReport report;
  SlotStats stats;
  ExactMarginals exact;
};

// Solves the scenario with MPS, then simulates and propagates the policy.
inline TimeSeriesResult run_time_series(const NetworkConfig& cfg, const SolverOptions& solver,
                                        const SimulationConfig& sim) {
  const Scenario sc(cfg);
  const ValueTable vstar = value_iteration(sc, solver.eps_vi);
  TimeSeriesResult out{mps_solve(sc, vstar, solver), {}, {}};
  out.stats = simulate(sc, DecentralizedActions{&out.report.policy}, sim);
  out.exact = exact_marginals(out.report.policy, sc, sim.slots);
  return out;
}

struct SweepRow {
  std::string initial;
  double p_b = 0.0;
  double centralized = 0.0;
  double decentralized = 0.0;
  double gap() const { return centralized - decentralized; }
};

inline std::vector<SweepRow> arrival_sweep(const ExperimentOptions& opt) {
  std::vector<SweepRow> rows;
  for (const char* initial : {"empty", "full"}) {
    for (double p : opt.p_b_sweep) {
      NetworkConfig cfg = opt.network;
      cfg.p_b.assign(cfg.n_nodes, p);
      cfg.e0 = initial == std::string("empty") ? std::vector<int>(cfg.n_nodes, 0) : cfg.e_max;
      const Scenario sc(cfg);
      const ValueTable vstar = value_iteration(sc, opt.solver.eps_vi);
      const SolveReport rep = mps_solve(sc, vstar, opt.solver);
      rows.push_back({initial, p, vstar[sc.initial_state()], rep.lower});
    }
  }
  return rows;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

inline std::filesystem::path write_time_series(const std::filesystem::path& dir,
                                               const std::string& name,
                                               const NetworkConfig& cfg,
                                               const ExperimentOptions& opt) {
  const TimeSeriesResult res = run_time_series(cfg, opt.solver, opt.simulation);
  const auto path = dir / (name + ".csv");
  auto os = open_out(path);
  write_slot_stats_csv(os, res.stats, &res.exact);
  auto js = open_out(dir / (name + "_report.json"));
  js << report_to_json(res.report, Scenario(cfg)).dump(2) << '\n';
  return path;
}

}  // namespace detail

inline void write_reward_grid_csv(std::ostream& os, const Scenario& sc) {
  if (sc.n_nodes() != 2) throw std::invalid_argument("reward grid needs two nodes");
  os << "a1,a2,reward\n";
  os.precision(12);
  for (int i = 0; i < sc.grid.levels(); ++i)
    for (int j = 0; j < sc.grid.levels(); ++j) {
      const int a[2] = {i, j};
      os << sc.grid[i] << ',' << sc.grid[j] << ',' << sc.rewards.global_reward(a) << '\n';
    }
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "initial,p_b,centralized,decentralized,gap\n";
  os.precision(12);
  for (const auto& r : rows)
    os << r.initial << ',' << r.p_b << ',' << r.centralized << ',' << r.decentralized << ','
       << r.gap() << '\n';
}

// Writes the preset's CSV files into `dir` and returns their paths.
inline std::vector<std::filesystem::path> run_experiment(Preset preset,
                                                         const ExperimentOptions& opt,
                                                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  NetworkConfig cfg = opt.network;
  const std::size_t n = cfg.n_nodes;
  switch (preset) {
    case Preset::fig2: {
      const auto path = dir / "fig2.csv";
      auto os = detail::open_out(path);
      write_reward_grid_csv(os, Scenario(cfg));
      return {path};
    }
    case Preset::fig3:
      cfg.e0.assign(n, 0);
      return {detail::write_time_series(dir, "fig3", cfg, opt)};
    case Preset::fig4:
      cfg.e0 = cfg.e_max;
      return {detail::write_time_series(dir, "fig4", cfg, opt)};
    case Preset::fig5: {
      if (n != 2) throw std::invalid_argument("fig5 preset needs two nodes");
      cfg.e0 = {0, cfg.e_max[1]};
      NetworkConfig sym = cfg;
      sym.lambda.assign(n, cfg.lambda[0]);
      return {detail::write_time_series(dir, "fig5", cfg, opt),
              detail::write_time_series(dir, "fig5_symmetric", sym, opt)};
    }
    case Preset::fig6: {
      const auto path = dir / "fig6.csv";
      const auto rows = arrival_sweep(opt);
      auto os = detail::open_out(path);
      write_sweep_csv(os, rows);
      return {path};
    }
  }
  return {};
}

}  // namespace ehdec
