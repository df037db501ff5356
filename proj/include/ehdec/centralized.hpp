#pragma once

// Full-knowledge MDP over joint battery levels, solved by synchronous value
// iteration. Its values bound every decentralized policy from above and seed
// the occupancy-space bounds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehdec/scenario.hpp"

namespace ehdec {

struct ValueTable {
  std::vector<double> values;
  double residual = std::numeric_limits<double>::infinity();
  int sweeps = 0;
  std::vector<double> residual_trace;

  double operator[](std::size_t state) const { return values[state]; }
  std::size_t size() const noexcept { return values.size(); }
};

class ValueIterationDiverged : public std::runtime_error {
 public:
  ValueIterationDiverged(int sweeps, double residual)
      : std::runtime_error("value iteration hit the sweep cap (" +
                           std::to_string(sweeps) + ") with residual " +
                           std::to_string(residual)),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

struct CentralBackup {
  double value = 0.0;
  std::vector<int> action;
};

// Visits feasible joint actions (zero wherever the battery is empty) in
// lexicographic order, node 0 most significant.
template <class Fn>
void for_each_joint_action(const Scenario& sc, std::span<const int> levels, Fn&& fn) {
  const std::size_t n = sc.n_nodes();
  std::vector<int> action(n, 0);
  while (true) {
    fn(static_cast<const std::vector<int>&>(action));
    std::size_t i = n;
    while (i > 0) {
      --i;
      const int limit = levels[i] == 0 ? 1 : sc.grid.levels();
      if (++action[i] < limit) break;
      action[i] = 0;
      if (i == 0) return;
    }
  }
}

inline double expected_next_value(const Scenario& sc, std::span<const double> values,
                                  std::span<const int> levels,
                                  std::span<const int> action) {
  std::vector<LocalRow> rows(sc.n_nodes());
  for (std::size_t i = 0; i < sc.n_nodes(); ++i) rows[i] = sc.row(i, levels[i], action[i]);
  double acc = 0.0;
  for_each_successor(sc.space, rows, [&](std::size_t next, double p) {
    acc += p * values[next];
  });
  return acc;
}

inline CentralBackup bellman_backup(const ValueTable& v, std::size_t state,
                                    const Scenario& sc) {
  const auto levels = sc.space.levels(state);
  CentralBackup best;
  best.value = -std::numeric_limits<double>::infinity();
  for_each_joint_action(sc, levels, [&](const std::vector<int>& action) {
    double q = sc.rewards.global_reward(action);
    if (sc.beta() > 0.0) q += sc.beta() * expected_next_value(sc, v.values, levels, action);
    if (q > best.value) {
      best.value = q;
      best.action = action;
    }
  });
  return best;
}

inline constexpr double kDefaultViTolerance = 1e-9;
inline constexpr int kDefaultViSweepCap = 100000;

// Synchronous sweeps until the sup-norm residual is <= eps (1 - beta) / (2 beta),
// which leaves the table within eps of the fixed point.
inline ValueTable value_iteration(const Scenario& sc, double eps_vi = kDefaultViTolerance,
                                  int max_sweeps = kDefaultViSweepCap) {
  if (!(eps_vi > 0.0)) throw std::invalid_argument("eps_vi must be positive");
  const double beta = sc.beta();
  const double stop =
      beta == 0.0 ? std::numeric_limits<double>::infinity()
                  : eps_vi * (1.0 - beta) / (2.0 * beta);
  ValueTable table;
  table.values.assign(sc.space.size(), 0.0);
  std::vector<double> next(sc.space.size());
  while (true) {
    double residual = 0.0;
    for (std::size_t s = 0; s < sc.space.size(); ++s) {
      next[s] = bellman_backup(table, s, sc).value;
      residual = std::max(residual, std::abs(next[s] - table.values[s]));
    }
    table.values.swap(next);
    table.residual = residual;
    table.residual_trace.push_back(residual);
    ++table.sweeps;
    if (residual <= stop) return table;
    if (table.sweeps >= max_sweeps) throw ValueIterationDiverged(table.sweeps, residual);
  }
}

// Upper-bound value of every simplex corner (degenerate occupancy at e).
inline std::vector<double> corner_values(const ValueTable& v) { return v.values; }

// Joint action chosen by the greedy policy in every joint state.
inline std::vector<std::vector<int>> greedy_actions(const ValueTable& v, const Scenario& sc) {
  std::vector<std::vector<int>> out(sc.space.size());
  for (std::size_t s = 0; s < sc.space.size(); ++s) out[s] = bellman_backup(v, s, sc).action;
  return out;
}

// CSV dump: index, one column per node level, value.
inline void write_values_csv(std::ostream& os, const ValueTable& v, const Scenario& sc) {
  os << "index";
  for (std::size_t i = 0; i < sc.n_nodes(); ++i) os << ",e" << (i + 1);
  os << ",value\n";
  os.precision(15);
  for (std::size_t s = 0; s < sc.space.size(); ++s) {
    os << s;
    for (int l : sc.space.levels(s)) os << ',' << l;
    os << ',' << v.values[s] << '\n';
  }
}

}  // namespace ehdec
