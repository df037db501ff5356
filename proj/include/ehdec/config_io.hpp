#pragma once

// JSON configuration documents ({network, solver, simulation}) and SolveReport
// serialization. Unknown keys are rejected with the offending field path.

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehdec/errors.hpp"
#include "ehdec/model.hpp"
#include "ehdec/simulate.hpp"
#include "ehdec/solver.hpp"

namespace ehdec {

using json = nlohmann::json;

struct RunConfig {
  NetworkConfig network;
  SolverOptions solver;
  SimulationConfig simulation;
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!keys.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
}

template <class T>
T get_scalar(const json& v, const std::string& field) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(field, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.get<std::int64_t>() < 0) throw ConfigError(field, "expected a non-negative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(field, "expected a number");
    } else {
      if (!v.is_string()) throw ConfigError(field, "expected a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

template <class T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  if (obj.contains(key)) out = get_scalar<T>(obj.at(key), path + "." + key);
}

// Per-node field: either a scalar (broadcast to every node) or an array.
template <class T>
void read_per_node(const json& obj, const char* key, const std::string& path, std::size_t n,
                   std::vector<T>& out, bool required) {
  const std::string field = path + "." + key;
  if (!obj.contains(key)) {
    if (required && out.size() != n)
      throw ConfigError(field, "required when n_nodes differs from the default");
    if (out.size() != n) out.assign(n, out.empty() ? T{} : out.front());
    return;
  }
  const json& v = obj.at(key);
  if (v.is_array()) {
    if (v.size() != n)
      throw ConfigError(field, "expected " + std::to_string(n) + " entries, got " +
                                   std::to_string(v.size()));
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(get_scalar<T>(v[i], field + "[" + std::to_string(i) + "]"));
  } else {
    out.assign(n, get_scalar<T>(v, field));
  }
}

inline std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline NetworkConfig parse_network(const json& j) {
  detail::reject_unknown(j, "network",
                         {"n_nodes", "e_max", "p_b", "lambda", "weight", "beta", "a_levels",
                          "theta_levels", "e0"});
  NetworkConfig cfg = NetworkConfig::two_node_default();
  detail::read(j, "n_nodes", "network", cfg.n_nodes);
  const bool resized = cfg.n_nodes != NetworkConfig{}.n_nodes;
  const std::size_t n = cfg.n_nodes;
  detail::read_per_node(j, "e_max", "network", n, cfg.e_max, false);
  detail::read_per_node(j, "p_b", "network", n, cfg.p_b, false);
  detail::read_per_node(j, "lambda", "network", n, cfg.lambda, resized);
  detail::read_per_node(j, "weight", "network", n, cfg.weight, false);
  detail::read_per_node(j, "e0", "network", n, cfg.e0, false);
  detail::read(j, "beta", "network", cfg.beta);
  detail::read(j, "a_levels", "network", cfg.a_levels);
  detail::read(j, "theta_levels", "network", cfg.theta_levels);
  cfg.validate();
  return cfg;
}

inline SolverOptions parse_solver(const json& j) {
  detail::reject_unknown(j, "solver",
                         {"eps", "max_trials", "backup", "horizon", "finite_horizon", "eps_vi",
                          "enumeration_cap"});
  SolverOptions opt;
  detail::read(j, "eps", "solver", opt.eps);
  detail::read(j, "max_trials", "solver", opt.max_trials);
  if (j.contains("backup"))
    opt.backup = parse_backup_mode(detail::get_scalar<std::string>(j.at("backup"), "solver.backup"));
  detail::read(j, "horizon", "solver", opt.horizon);
  detail::read(j, "finite_horizon", "solver", opt.finite_horizon);
  detail::read(j, "eps_vi", "solver", opt.eps_vi);
  detail::read(j, "enumeration_cap", "solver", opt.enumeration_cap);
  if (opt.max_trials < 1) throw ConfigError("solver.max_trials", "must be >= 1");
  if (opt.horizon < 0) throw ConfigError("solver.horizon", "must be >= 0");
  if (!(opt.eps_vi > 0.0)) throw ConfigError("solver.eps_vi", "must be > 0");
  if (opt.eps < 0.0) throw ConfigError("solver.eps", "must be >= 0");
  return opt;
}

inline SimulationConfig parse_simulation(const json& j, std::size_t n_nodes) {
  detail::reject_unknown(j, "simulation",
                         {"runs", "slots", "seed", "policy", "discount", "reward", "theta",
                          "threads"});
  SimulationConfig sim;
  detail::read(j, "runs", "simulation", sim.runs);
  detail::read(j, "slots", "simulation", sim.slots);
  detail::read(j, "seed", "simulation", sim.seed);
  detail::read(j, "threads", "simulation", sim.threads);
  if (j.contains("policy")) {
    const auto s = detail::get_scalar<std::string>(j.at("policy"), "simulation.policy");
    if (s == "solver") sim.policy = PolicySource::solver;
    else if (s == "parametric") sim.policy = PolicySource::parametric;
    else if (s == "centralized") sim.policy = PolicySource::centralized;
    else throw ConfigError("simulation.policy", "expected solver, parametric or centralized");
  }
  if (j.contains("discount")) {
    const auto s = detail::get_scalar<std::string>(j.at("discount"), "simulation.discount");
    if (s == "weight") sim.discount = DiscountMode::weight;
    else if (s == "termination") sim.discount = DiscountMode::termination;
    else throw ConfigError("simulation.discount", "expected weight or termination");
  }
  if (j.contains("reward")) {
    const auto s = detail::get_scalar<std::string>(j.at("reward"), "simulation.reward");
    if (s == "sampled") sim.reward = RewardSampling::sampled;
    else if (s == "expected") sim.reward = RewardSampling::expected;
    else throw ConfigError("simulation.reward", "expected sampled or expected");
  }
  if (j.contains("theta")) {
    sim.theta.clear();
    detail::read_per_node(j, "theta", "simulation", n_nodes, sim.theta, true);
  }
  sim.validate();
  return sim;
}

inline RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "JSON syntax error at " + detail::locate(text, e.byte) + ": " +
                              e.what());
  }
  detail::reject_unknown(doc, "", {"network", "solver", "simulation"});
  RunConfig rc;
  if (doc.contains("network")) rc.network = parse_network(doc.at("network"));
  if (doc.contains("solver")) rc.solver = parse_solver(doc.at("solver"));
  if (doc.contains("simulation"))
    rc.simulation = parse_simulation(doc.at("simulation"), rc.network.n_nodes);
  return rc;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline json network_to_json(const NetworkConfig& cfg) {
  return json{{"n_nodes", cfg.n_nodes}, {"e_max", cfg.e_max},   {"p_b", cfg.p_b},
              {"lambda", cfg.lambda},   {"weight", cfg.weight}, {"beta", cfg.beta},
              {"a_levels", cfg.a_levels}, {"theta_levels", cfg.theta_levels}, {"e0", cfg.e0}};
}

// Policy as per-depth, per-node lists of transmission probabilities.
inline json report_to_json(const SolveReport& rep, const Scenario& sc) {
  json trace = json::array();
  for (const auto& t : rep.trace)
    trace.push_back({{"trial", t.trial}, {"upper", t.upper}, {"lower", t.lower},
                     {"trial_value", t.trial_value}});
  json policy = json::array();
  for (const auto& rule : rep.policy.rules) {
    json depth = json::array();
    for (const auto& row : rule.actions) {
      json probs = json::array();
      for (int a : row) probs.push_back(sc.grid[a]);
      depth.push_back(std::move(probs));
    }
    policy.push_back(std::move(depth));
  }
  return json{{"network", network_to_json(sc.cfg)},
              {"backup", to_string(rep.backup)},
              {"finite_horizon", rep.finite_horizon},
              {"upper", rep.upper},
              {"lower", rep.lower},
              {"gap", rep.gap},
              {"eps", rep.eps},
              {"tail", rep.tail},
              {"horizon", rep.horizon},
              {"trials", rep.trials},
              {"converged", rep.converged},
              {"centralized_value", rep.centralized_value},
              {"trace", std::move(trace)},
              {"policy", std::move(policy)}};
}

inline MarkovPolicy policy_from_json(const json& j, const Scenario& sc) {
  MarkovPolicy pi;
  const double scale = sc.grid.levels() - 1;
  for (const auto& depth : j.at("policy")) {
    DecisionRule rule;
    for (const auto& row : depth) {
      std::vector<int> idx;
      for (const auto& a : row) idx.push_back(static_cast<int>(std::lround(a.get<double>() * scale)));
      rule.actions.push_back(std::move(idx));
    }
    rule.validate(sc.cfg);
    pi.rules.push_back(std::move(rule));
  }
  return pi;
}

}  // namespace ehdec
