#pragma once

// Monte Carlo simulator of the slotted collision channel with energy
// harvesting batteries, plus exact per-slot marginals from chained occupancy
// updates for comparison.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ehdec/centralized.hpp"
#include "ehdec/occupancy.hpp"
#include "ehdec/rng.hpp"
#include "ehdec/scenario.hpp"
#include "ehdec/solver.hpp"

namespace ehdec {

enum class DiscountMode { weight, termination };
enum class RewardSampling { sampled, expected };
enum class PolicySource { solver, parametric, centralized };

inline const char* to_string(DiscountMode m) {
  return m == DiscountMode::weight ? "weight" : "termination";
}
inline const char* to_string(RewardSampling m) {
  return m == RewardSampling::sampled ? "sampled" : "expected";
}
inline const char* to_string(PolicySource m) {
  switch (m) {
    case PolicySource::solver: return "solver";
    case PolicySource::parametric: return "parametric";
    case PolicySource::centralized: return "centralized";
  }
  return "?";
}

struct SimulationConfig {
  std::uint64_t runs = 10000;
  std::size_t slots = 200;
  std::uint64_t seed = 1;
  PolicySource policy = PolicySource::solver;
  DiscountMode discount = DiscountMode::weight;
  RewardSampling reward = RewardSampling::sampled;
  std::vector<int> theta;  // per-node parameter index for PolicySource::parametric
  unsigned threads = 1;

  void validate() const {
    if (runs < 1) throw ConfigError("simulation.runs", "must be >= 1");
    if (slots < 1) throw ConfigError("simulation.slots", "must be >= 1");
  }
};

// Per-slot statistics; per-node arrays are indexed [slot * nodes + node].
struct SlotStats {
  std::size_t slots = 0;
  std::size_t nodes = 0;
  std::uint64_t runs = 0;
  std::vector<double> tx_prob;
  std::vector<double> mean_battery;
  std::vector<double> success_rate;
  std::vector<double> collision_rate;  // per slot
  std::vector<std::uint64_t> active;   // runs still operating at each slot
  double reward = 0.0;
  double reward_se = 0.0;

  double tx(std::size_t k, std::size_t i) const { return tx_prob[k * nodes + i]; }
  double battery(std::size_t k, std::size_t i) const { return mean_battery[k * nodes + i]; }
  double success(std::size_t k, std::size_t i) const { return success_rate[k * nodes + i]; }
};

// Decentralized Markov policy: node i reads only its own battery level.
struct DecentralizedActions {
  const MarkovPolicy* policy;
  void operator()(std::size_t slot, std::span<const int> levels, std::span<int> out) const {
    const DecisionRule& rule = policy->at(slot);
    for (std::size_t i = 0; i < levels.size(); ++i) out[i] = rule.at(i, levels[i]);
  }
};

// Centralized stationary policy indexed by joint state.
struct CentralizedActions {
  const std::vector<std::vector<int>>* table;
  const StateSpace* space;
  void operator()(std::size_t, std::span<const int> levels, std::span<int> out) const {
    const auto& a = (*table)[space->index(levels)];
    std::copy(a.begin(), a.end(), out.begin());
  }
};

inline MarkovPolicy parametric_policy(const Scenario& sc, std::span<const int> theta,
                                      std::size_t horizon = 1) {
  if (theta.size() != sc.n_nodes())
    throw ConfigError("simulation.theta", "expected one parameter per node");
  const ClippedLinearFamily family(sc.cfg);
  DecisionRule rule;
  for (std::size_t i = 0; i < sc.n_nodes(); ++i) {
    if (theta[i] < 0 || theta[i] >= family.levels(i))
      throw ConfigError("simulation.theta[" + std::to_string(i) + "]", "out of range");
    rule.actions.push_back(family.local_rule(i, theta[i]));
  }
  return MarkovPolicy{std::vector<DecisionRule>(horizon, rule)};
}

namespace detail {

struct ChunkTotals {
  std::vector<std::uint64_t> tx, battery, success;  // [slot * nodes + node]
  std::vector<std::uint64_t> collisions, active;    // [slot]
  double reward_sum = 0.0;
  double reward_sq = 0.0;
};

inline constexpr std::uint64_t kRunsPerChunk = 4096;

// Fixed binary reduction tree over chunk partial sums.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return xs[0];
  const std::size_t mid = xs.size() / 2;
  return pairwise_sum(xs.first(mid)) + pairwise_sum(xs.subspan(mid));
}

}  // namespace detail

template <class ActionFn>
SlotStats simulate(const Scenario& sc, const ActionFn& actions, const SimulationConfig& sim) {
  sim.validate();
  const std::size_t n = sc.n_nodes();
  const std::size_t slots = sim.slots;
  const CounterRng rng{sim.seed};
  const double beta = sc.beta();

  std::vector<std::vector<double>> thresholds(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < sc.grid.levels(); ++j)
      thresholds[i].push_back(threshold_from_action(sc.grid[j], sc.cfg.lambda[i]));

  const std::uint64_t n_chunks = (sim.runs + detail::kRunsPerChunk - 1) / detail::kRunsPerChunk;
  std::vector<detail::ChunkTotals> chunks(n_chunks);

  auto run_chunk = [&](std::uint64_t c) {
    detail::ChunkTotals& t = chunks[c];
    t.tx.assign(slots * n, 0);
    t.battery.assign(slots * n, 0);
    t.success.assign(slots * n, 0);
    t.collisions.assign(slots, 0);
    t.active.assign(slots, 0);
    std::vector<double> rewards;
    std::vector<int> levels(n), act(n);
    std::vector<char> sent(n);
    std::vector<double> nu(n);
    const std::uint64_t first = c * detail::kRunsPerChunk;
    const std::uint64_t last = std::min(sim.runs, first + detail::kRunsPerChunk);
    for (std::uint64_t run = first; run < last; ++run) {
      std::copy(sc.cfg.e0.begin(), sc.cfg.e0.end(), levels.begin());
      double total = 0.0;
      double discount = 1.0;
      for (std::size_t k = 0; k < slots; ++k) {
        ++t.active[k];
        actions(k, levels, act);
        int transmitters = 0;
        std::size_t who = 0;
        for (std::size_t i = 0; i < n; ++i) {
          t.battery[k * n + i] += static_cast<std::uint64_t>(levels[i]);
          sent[i] = 0;
          if (levels[i] == 0 || act[i] == 0) continue;
          const double u = rng.uniform(run, k, i, DrawPurpose::fading);
          const double h = -std::log1p(-u);
          nu[i] = std::log1p(sc.cfg.lambda[i] * h);
          if (nu[i] >= thresholds[i][static_cast<std::size_t>(act[i])]) {
            sent[i] = 1;
            ++transmitters;
            who = i;
            ++t.tx[k * n + i];
          }
        }
        double slot_reward = 0.0;
        if (sim.reward == RewardSampling::expected) {
          slot_reward = sc.rewards.global_reward(act);
        } else if (transmitters == 1) {
          slot_reward = sc.cfg.weight[who] * nu[who];
        }
        if (transmitters == 1) ++t.success[k * n + who];
        if (transmitters > 1) ++t.collisions[k];
        total += (sim.discount == DiscountMode::weight ? discount : 1.0) * slot_reward;
        discount *= beta;
        for (std::size_t i = 0; i < n; ++i) {
          const bool arrived = rng.uniform(run, k, i, DrawPurpose::arrival) < sc.cfg.p_b[i];
          levels[i] = battery_step(levels[i], sent[i] != 0, arrived, sc.cfg.e_max[i]);
        }
        if (sim.discount == DiscountMode::termination &&
            rng.uniform(run, k, 0, DrawPurpose::termination) >= beta)
          break;
      }
      rewards.push_back(total);
    }
    t.reward_sum = detail::pairwise_sum(rewards);
    for (double& r : rewards) r *= r;
    t.reward_sq = detail::pairwise_sum(rewards);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(sim.threads, static_cast<unsigned>(n_chunks)));
  if (workers == 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::uint64_t c; (c = next.fetch_add(1)) < n_chunks;) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  SlotStats st;
  st.slots = slots;
  st.nodes = n;
  st.runs = sim.runs;
  std::vector<std::uint64_t> tx(slots * n, 0), bat(slots * n, 0), suc(slots * n, 0);
  std::vector<std::uint64_t> col(slots, 0), act(slots, 0);
  std::vector<double> sums, sqs;
  for (const auto& t : chunks) {
    for (std::size_t x = 0; x < slots * n; ++x) {
      tx[x] += t.tx[x];
      bat[x] += t.battery[x];
      suc[x] += t.success[x];
    }
    for (std::size_t k = 0; k < slots; ++k) {
      col[k] += t.collisions[k];
      act[k] += t.active[k];
    }
    sums.push_back(t.reward_sum);
    sqs.push_back(t.reward_sq);
  }
  st.tx_prob.resize(slots * n);
  st.mean_battery.resize(slots * n);
  st.success_rate.resize(slots * n);
  st.collision_rate.resize(slots);
  st.active = act;
  for (std::size_t k = 0; k < slots; ++k) {
    const double denom = act[k] > 0 ? static_cast<double>(act[k]) : 1.0;
    st.collision_rate[k] = static_cast<double>(col[k]) / denom;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t x = k * n + i;
      st.tx_prob[x] = static_cast<double>(tx[x]) / denom;
      st.mean_battery[x] = static_cast<double>(bat[x]) / denom;
      st.success_rate[x] = static_cast<double>(suc[x]) / denom;
    }
  }
  const double runs = static_cast<double>(sim.runs);
  const double mean = detail::pairwise_sum(sums) / runs;
  const double second = detail::pairwise_sum(sqs) / runs;
  st.reward = mean;
  st.reward_se = sim.runs > 1 ? std::sqrt(std::max(0.0, second - mean * mean) / (runs - 1.0)) : 0.0;
  return st;
}

// Exact per-slot expectations under a Markov policy started at e0.
struct ExactMarginals {
  std::size_t slots = 0;
  std::size_t nodes = 0;
  std::vector<double> tx_prob, mean_battery, success_rate;  // [slot * nodes + node]
  std::vector<double> collision_rate;

  double tx(std::size_t k, std::size_t i) const { return tx_prob[k * nodes + i]; }
  double battery(std::size_t k, std::size_t i) const { return mean_battery[k * nodes + i]; }
};

inline ExactMarginals exact_marginals(const MarkovPolicy& pi, const Scenario& sc,
                                      std::size_t slots) {
  const std::size_t n = sc.n_nodes();
  ExactMarginals m;
  m.slots = slots;
  m.nodes = n;
  m.tx_prob.assign(slots * n, 0.0);
  m.mean_battery.assign(slots * n, 0.0);
  m.success_rate.assign(slots * n, 0.0);
  m.collision_rate.assign(slots, 0.0);
  OccupancyState eta = OccupancyState::degenerate(sc.space.size(), sc.initial_state());
  std::vector<double> a(n);
  for (std::size_t k = 0; k < slots; ++k) {
    const DecisionRule& rule = pi.at(k);
    for (std::size_t s = 0; s < sc.space.size(); ++s) {
      const double p = eta[s];
      if (p == 0.0) continue;
      const auto lv = sc.space.levels(s);
      double idle = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = sc.grid[rule.at(i, lv[i])];
        idle *= 1.0 - a[i];
      }
      double single = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double solo = a[i];
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) solo *= 1.0 - a[j];
        single += solo;
        m.tx_prob[k * n + i] += p * a[i];
        m.mean_battery[k * n + i] += p * lv[i];
        m.success_rate[k * n + i] += p * solo;
      }
      m.collision_rate[k] += p * std::max(0.0, 1.0 - idle - single);
    }
    eta = occupancy_update(eta, rule, sc);
  }
  return m;
}

// One row per (slot, node). Exact columns are empty when no marginals are given.
inline void write_slot_stats_csv(std::ostream& os, const SlotStats& st,
                                 const ExactMarginals* exact = nullptr) {
  os << "slot,node,tx_prob,mean_battery,collision_rate,success_rate,exact_tx_prob,"
        "exact_mean_battery\n";
  os.precision(10);
  for (std::size_t k = 0; k < st.slots; ++k)
    for (std::size_t i = 0; i < st.nodes; ++i) {
      os << k << ',' << (i + 1) << ',' << st.tx(k, i) << ',' << st.battery(k, i) << ','
         << st.collision_rate[k] << ',' << st.success(k, i) << ',';
      if (exact && k < exact->slots) os << exact->tx(k, i) << ',' << exact->battery(k, i);
      else os << ',';
      os << '\n';
    }
}

}  // namespace ehdec
