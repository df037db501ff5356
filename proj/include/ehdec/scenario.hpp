#pragma once

#include "ehdec/model.hpp"
#include "ehdec/reward.hpp"

namespace ehdec {

// A validated network configuration with its derived tables.
struct Scenario {
  NetworkConfig cfg;
  StateSpace space;
  ActionGrid grid;
  RewardModel rewards;

  explicit Scenario(NetworkConfig config) : cfg(std::move(config)) {
    cfg.validate();
    space = StateSpace(cfg.e_max);
    grid = ActionGrid(cfg.a_levels);
    rewards = RewardModel(cfg);
  }

  std::size_t n_nodes() const noexcept { return cfg.n_nodes; }
  double beta() const noexcept { return cfg.beta; }
  std::size_t initial_state() const { return space.index(cfg.e0); }

  LocalRow row(std::size_t node, int level, int action) const {
    return local_row(level, grid[action], cfg.p_b[node], cfg.e_max[node]);
  }
};

}  // namespace ehdec
