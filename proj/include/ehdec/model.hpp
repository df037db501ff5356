#pragma once

// Dec-MDP scenario: battery state spaces, the quantized action grid,
// per-node decision rules and the transition-independent battery dynamics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ehdec/errors.hpp"

namespace ehdec {

struct NetworkConfig {
  std::size_t n_nodes = 2;
  std::vector<int> e_max{5, 5};
  std::vector<double> p_b{0.1, 0.1};
  std::vector<double> lambda{6.0, 4.0};
  std::vector<double> weight{1.0, 1.0};
  double beta = 0.9;
  int a_levels = 11;
  int theta_levels = 6;
  std::vector<int> e0{0, 0};

  // Two nodes, five-quanta batteries, p_B = 0.1, SNRs (6, 4), equal weights,
  // beta = 0.9. Initial batteries empty.
  static NetworkConfig two_node_default() { return NetworkConfig{}; }

  void validate() const {
    if (n_nodes < 1) throw ConfigError("network.n_nodes", "must be >= 1");
    auto check_len = [&](std::size_t len, const char* name) {
      if (len != n_nodes)
        throw ConfigError(std::string("network.") + name,
                          "expected " + std::to_string(n_nodes) +
                              " entries, got " + std::to_string(len));
    };
    check_len(e_max.size(), "e_max");
    check_len(p_b.size(), "p_b");
    check_len(lambda.size(), "lambda");
    check_len(weight.size(), "weight");
    check_len(e0.size(), "e0");
    for (std::size_t i = 0; i < n_nodes; ++i) {
      const auto at = [i](const char* name) {
        return std::string("network.") + name + "[" + std::to_string(i) + "]";
      };
      if (e_max[i] < 1) throw ConfigError(at("e_max"), "must be >= 1");
      if (!(p_b[i] >= 0.0 && p_b[i] <= 1.0))
        throw ConfigError(at("p_b"), "must lie in [0, 1]");
      if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i]))
        throw ConfigError(at("lambda"), "must be > 0");
      if (!(weight[i] > 0.0) || !std::isfinite(weight[i]))
        throw ConfigError(at("weight"), "must be > 0");
      if (e0[i] < 0 || e0[i] > e_max[i])
        throw ConfigError(at("e0"), "must lie in [0, e_max]");
    }
    if (!(beta >= 0.0 && beta < 1.0))
      throw ConfigError("network.beta", "must lie in [0, 1)");
    if (a_levels < 2) throw ConfigError("network.a_levels", "must be >= 2");
    if (theta_levels < 2)
      throw ConfigError("network.theta_levels", "must be >= 2");
  }
};

// Joint battery levels with a mixed-radix linear index, node 0 least
// significant.
class StateSpace {
 public:
  StateSpace() = default;

  explicit StateSpace(std::span<const int> e_max)
      : e_max_(e_max.begin(), e_max.end()) {
    strides_.resize(e_max_.size());
    std::size_t size = 1;
    for (std::size_t i = 0; i < e_max_.size(); ++i) {
      strides_[i] = size;
      size *= static_cast<std::size_t>(e_max_[i] + 1);
    }
    size_ = size;
    levels_.resize(size_ * e_max_.size());
    for (std::size_t s = 0; s < size_; ++s)
      for (std::size_t i = 0; i < e_max_.size(); ++i)
        levels_[s * e_max_.size() + i] = static_cast<int>(
            (s / strides_[i]) % static_cast<std::size_t>(e_max_[i] + 1));
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t n_nodes() const noexcept { return e_max_.size(); }
  int e_max(std::size_t node) const { return e_max_[node]; }
  std::size_t stride(std::size_t node) const { return strides_[node]; }
  int radix(std::size_t node) const { return e_max_[node] + 1; }

  int level(std::size_t state, std::size_t node) const {
    return levels_[state * e_max_.size() + node];
  }

  std::span<const int> levels(std::size_t state) const {
    return {levels_.data() + state * e_max_.size(), e_max_.size()};
  }

  std::size_t index(std::span<const int> levels) const {
    if (levels.size() != e_max_.size())
      throw std::invalid_argument("level vector has wrong arity");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i] < 0 || levels[i] > e_max_[i])
        throw std::out_of_range("battery level out of range for node " +
                                std::to_string(i));
      idx += static_cast<std::size_t>(levels[i]) * strides_[i];
    }
    return idx;
  }

 private:
  std::vector<int> e_max_;
  std::vector<std::size_t> strides_;
  std::vector<int> levels_;
  std::size_t size_ = 0;
};

// Transmission probabilities j / (levels - 1), j = 0..levels-1.
class ActionGrid {
 public:
  ActionGrid() = default;
  explicit ActionGrid(int levels) {
    if (levels < 2) throw std::invalid_argument("action grid needs >= 2 levels");
    values_.resize(static_cast<std::size_t>(levels));
    for (int j = 0; j < levels; ++j)
      values_[j] = static_cast<double>(j) / static_cast<double>(levels - 1);
    values_.back() = 1.0;
  }

  int levels() const noexcept { return static_cast<int>(values_.size()); }
  double operator[](int j) const { return values_[static_cast<std::size_t>(j)]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

// Per-node map from local battery level to an action-grid index.
struct DecisionRule {
  std::vector<std::vector<int>> actions;

  std::size_t n_nodes() const noexcept { return actions.size(); }
  int at(std::size_t node, int level) const {
    return actions[node][static_cast<std::size_t>(level)];
  }

  static DecisionRule idle(const NetworkConfig& cfg) {
    DecisionRule rule;
    for (std::size_t i = 0; i < cfg.n_nodes; ++i)
      rule.actions.emplace_back(static_cast<std::size_t>(cfg.e_max[i] + 1), 0);
    return rule;
  }

  void validate(const NetworkConfig& cfg) const {
    if (actions.size() != cfg.n_nodes)
      throw std::invalid_argument("decision rule has wrong node count");
    for (std::size_t i = 0; i < cfg.n_nodes; ++i) {
      if (actions[i].size() != static_cast<std::size_t>(cfg.e_max[i] + 1))
        throw std::invalid_argument("decision rule row " + std::to_string(i) +
                                    " has wrong length");
      if (actions[i][0] != 0)
        throw std::invalid_argument("decision rule transmits at empty battery");
      for (int a : actions[i])
        if (a < 0 || a >= cfg.a_levels)
          throw std::invalid_argument("decision rule index off the action grid");
    }
  }

  auto operator<=>(const DecisionRule&) const = default;
};

// Sparse row of a local transition matrix: at most three successor levels.
struct LocalRow {
  std::array<int, 3> next{};
  std::array<double, 3> prob{};
  int size = 0;

  void add(int level, double p) {
    next[size] = level;
    prob[size] = p;
    ++size;
  }
};

inline int battery_step(int level, bool transmitted, bool arrived, int e_max) {
  if (transmitted && level == 0)
    throw std::invalid_argument("cannot transmit with an empty battery");
  return std::min(e_max, level - (transmitted ? 1 : 0) + (arrived ? 1 : 0));
}

// Successor distribution of one battery under transmission probability `a`.
inline LocalRow local_row(int level, double a, double p_b, int e_max) {
  if (level < 0 || level > e_max)
    throw std::out_of_range("battery level out of range");
  if (level == 0 && a > 0.0)
    throw std::invalid_argument("nonzero action at an empty battery");
  LocalRow row;
  if (level == e_max) {
    // Arrival is lost when the battery is full and nothing is sent.
    row.add(e_max - 1, a * (1.0 - p_b));
    row.add(e_max, (1.0 - a) + a * p_b);
    return row;
  }
  if (level > 0) row.add(level - 1, (1.0 - p_b) * a);
  row.add(level, (1.0 - p_b) * (1.0 - a) + p_b * a);
  row.add(level + 1, p_b * (1.0 - a));
  return row;
}

inline double local_transition_prob(int level, double a, int next_level,
                                    std::size_t node, const NetworkConfig& cfg) {
  const int e_max = cfg.e_max.at(node);
  if (next_level < 0 || next_level > e_max)
    throw std::out_of_range("next battery level out of range");
  const LocalRow row = local_row(level, a, cfg.p_b[node], e_max);
  for (int k = 0; k < row.size; ++k)
    if (row.next[k] == next_level) return row.prob[k];
  return 0.0;
}

// Joint rows visit successors of every node's local row; callback receives
// (next state index, probability).
template <class Fn>
void for_each_successor(const StateSpace& space,
                        std::span<const LocalRow> rows, Fn&& fn) {
  const std::size_t n = rows.size();
  std::vector<int> pos(n, 0);
  while (true) {
    std::size_t idx = 0;
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      idx += static_cast<std::size_t>(rows[i].next[pos[i]]) * space.stride(i);
      p *= rows[i].prob[pos[i]];
    }
    fn(idx, p);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++pos[i] < rows[i].size) break;
      pos[i] = 0;
    }
    if (i == n) return;
  }
}

inline double joint_transition_prob(std::span<const int> levels,
                                    const DecisionRule& sigma,
                                    std::span<const int> next_levels,
                                    const NetworkConfig& cfg) {
  const ActionGrid grid(cfg.a_levels);
  double p = 1.0;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i)
    p *= local_transition_prob(levels[i], grid[sigma.at(i, levels[i])],
                               next_levels[i], i, cfg);
  return p;
}

// Number of joint decision rules with sigma^i(0) = 0.
inline long double decision_rule_count(const NetworkConfig& cfg) {
  long double count = 1.0L;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i)
    count *= std::pow(static_cast<long double>(cfg.a_levels),
                      static_cast<long double>(cfg.e_max[i]));
  return count;
}

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

// All local rules of one node, lexicographic in (level 1, ..., level e_max).
inline std::vector<std::vector<int>> enumerate_local_rules(int e_max,
                                                           int a_levels) {
  std::vector<std::vector<int>> out;
  std::vector<int> rule(static_cast<std::size_t>(e_max + 1), 0);
  while (true) {
    out.push_back(rule);
    int pos = e_max;
    while (pos >= 1 && ++rule[pos] == a_levels) rule[pos--] = 0;
    if (pos < 1) return out;
  }
}

// Visits every joint rule in lexicographic order (node-major, then level,
// then grid index). Throws EnumerationCapExceeded before visiting anything
// when the count is above `cap`.
template <class Fn>
void enumerate_decision_rules(const NetworkConfig& cfg, Fn&& fn,
                              std::uint64_t cap = kDefaultEnumerationCap) {
  const long double count = decision_rule_count(cfg);
  if (count > static_cast<long double>(cap))
    throw EnumerationCapExceeded(count, cap);
  std::vector<std::vector<std::vector<int>>> local;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i)
    local.push_back(enumerate_local_rules(cfg.e_max[i], cfg.a_levels));
  std::vector<std::size_t> pos(cfg.n_nodes, 0);
  DecisionRule rule;
  rule.actions.resize(cfg.n_nodes);
  while (true) {
    for (std::size_t i = 0; i < cfg.n_nodes; ++i) rule.actions[i] = local[i][pos[i]];
    fn(static_cast<const DecisionRule&>(rule));
    std::size_t i = cfg.n_nodes;
    while (i > 0) {
      --i;
      if (++pos[i] < local[i].size()) break;
      pos[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace ehdec
