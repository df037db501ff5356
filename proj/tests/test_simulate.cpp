#include <gtest/gtest.h>

#include <sstream>

#include "ehdec/simulate.hpp"

using namespace ehdec;

namespace {

MarkovPolicy short_solve(const Scenario& sc) {
  SolverOptions opt;
  opt.max_trials = 3;
  return mps_solve(sc, opt).policy;
}

}  // namespace

TEST(CounterRng, PureFunctionOfKey) {
  const CounterRng a{5}, b{5}, c{6};
  EXPECT_EQ(a.bits(1, 2, 0, DrawPurpose::fading), b.bits(1, 2, 0, DrawPurpose::fading));
  EXPECT_NE(a.bits(1, 2, 0, DrawPurpose::fading), c.bits(1, 2, 0, DrawPurpose::fading));
  EXPECT_NE(a.bits(1, 2, 0, DrawPurpose::fading), a.bits(1, 2, 0, DrawPurpose::arrival));
  double mean = 0.0;
  for (std::uint64_t r = 0; r < 100000; ++r) {
    const double u = a.uniform(r, 0, 0, DrawPurpose::arrival);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    mean += u;
  }
  EXPECT_NEAR(mean / 100000, 0.5, 3 * std::sqrt(1.0 / 12 / 100000));
}

TEST(Simulate, DeadNetworkEarnsNothing) {
  auto cfg = NetworkConfig::two_node_default();
  cfg.p_b = {0.0, 0.0};
  const Scenario sc(cfg);
  const int theta[] = {5, 5};
  const auto pi = parametric_policy(sc, theta);
  SimulationConfig sim;
  sim.runs = 500;
  sim.slots = 50;
  const auto st = simulate(sc, DecentralizedActions{&pi}, sim);
  EXPECT_EQ(st.reward, 0.0);
  for (double p : st.tx_prob) EXPECT_EQ(p, 0.0);
  for (double b : st.mean_battery) EXPECT_EQ(b, 0.0);
}

TEST(Simulate, SingleNodeAlwaysCharged) {
  NetworkConfig cfg;
  cfg.n_nodes = 1;
  cfg.e_max = {3};
  cfg.p_b = {1.0};
  cfg.lambda = {6};
  cfg.weight = {1};
  cfg.e0 = {3};
  const Scenario sc(cfg);
  const int theta[] = {cfg.theta_levels - 1};
  const auto pi = parametric_policy(sc, theta);
  SimulationConfig sim;
  sim.runs = 20000;
  sim.slots = 300;
  const auto st = simulate(sc, DecentralizedActions{&pi}, sim);
  EXPECT_LE(std::abs(st.reward - g(1.0, 6.0) / (1 - cfg.beta)), 3 * st.reward_se);
  for (std::size_t k = 0; k < sim.slots; ++k) {
    EXPECT_EQ(st.tx(k, 0), 1.0);
    EXPECT_EQ(st.battery(k, 0), 3.0);
  }
}

TEST(Simulate, SolverPolicyMatchesExactEvaluation) {
  const Scenario sc(NetworkConfig::two_node_default());
  const MarkovPolicy pi = short_solve(sc);
  SimulationConfig sim;
  sim.runs = 20000;
  sim.slots = pi.horizon();
  const double exact = evaluate_policy(pi, OccupancyState::degenerate(36, 0), sc);
  const auto sampled = simulate(sc, DecentralizedActions{&pi}, sim);
  EXPECT_LE(std::abs(sampled.reward - exact), 3 * sampled.reward_se);
  sim.reward = RewardSampling::expected;
  const auto expected = simulate(sc, DecentralizedActions{&pi}, sim);
  EXPECT_LE(std::abs(expected.reward - exact), 3 * expected.reward_se);
  EXPECT_LT(expected.reward_se, sampled.reward_se);

  sim.reward = RewardSampling::sampled;
  sim.discount = DiscountMode::termination;
  const auto term = simulate(sc, DecentralizedActions{&pi}, sim);
  EXPECT_LE(std::abs(term.reward - exact), 3 * term.reward_se);
  EXPECT_LT(term.active.back(), term.active.front());
}

TEST(Simulate, ReproducibleAcrossSeedsAndThreads) {
  auto cfg = NetworkConfig::two_node_default();
  cfg.e0 = {2, 4};
  const Scenario sc(cfg);
  const int theta[] = {3, 4};
  const auto pi = parametric_policy(sc, theta);
  SimulationConfig sim;
  sim.runs = 9000;  // three chunks, the last one partial
  sim.slots = 40;
  sim.seed = 7;
  const auto a = simulate(sc, DecentralizedActions{&pi}, sim);
  const auto b = simulate(sc, DecentralizedActions{&pi}, sim);
  sim.threads = 3;
  const auto c = simulate(sc, DecentralizedActions{&pi}, sim);
  EXPECT_EQ(a.reward, b.reward);
  EXPECT_EQ(a.reward, c.reward);
  EXPECT_EQ(a.reward_se, c.reward_se);
  EXPECT_EQ(a.tx_prob, c.tx_prob);
  EXPECT_EQ(a.mean_battery, c.mean_battery);
  sim.seed = 8;
  EXPECT_NE(simulate(sc, DecentralizedActions{&pi}, sim).reward, a.reward);
}

TEST(Simulate, GreedyCentralizedMatchesValueIteration) {
  auto cfg = NetworkConfig::two_node_default();
  cfg.e0 = {3, 2};
  const Scenario sc(cfg);
  const ValueTable v = value_iteration(sc);
  const auto table = greedy_actions(v, sc);
  SimulationConfig sim;
  sim.runs = 20000;
  sim.slots = 250;
  sim.reward = RewardSampling::expected;
  const auto st = simulate(sc, CentralizedActions{&table, &sc.space}, sim);
  EXPECT_LE(std::abs(st.reward - v[sc.initial_state()]), 3 * st.reward_se);
}

TEST(Simulate, MonteCarloMarginalsTrackExactOnes) {
  const Scenario sc(NetworkConfig::two_node_default());
  const int theta[] = {5, 3};
  const auto pi = parametric_policy(sc, theta);
  SimulationConfig sim;
  sim.runs = 20000;
  sim.slots = 60;
  const auto st = simulate(sc, DecentralizedActions{&pi}, sim);
  const auto ex = exact_marginals(pi, sc, sim.slots);
  for (std::size_t k = 0; k < sim.slots; ++k)
    for (std::size_t i = 0; i < 2; ++i) {
      const double p = ex.tx(k, i);
      EXPECT_LE(std::abs(st.tx(k, i) - p), 4 * std::sqrt(p * (1 - p) / 20000) + 1e-12);
      EXPECT_LE(std::abs(st.battery(k, i) - ex.battery(k, i)), 4 * 5.0 / std::sqrt(20000.0));
    }
  EXPECT_EQ(ex.tx(0, 0), 0.0);
  EXPECT_NEAR(ex.battery(1, 0), 0.1, 1e-15);
}

TEST(SlotStatsCsv, Schema) {
  const Scenario sc(NetworkConfig::two_node_default());
  const int theta[] = {5, 5};
  const auto pi = parametric_policy(sc, theta);
  SimulationConfig sim;
  sim.runs = 10;
  sim.slots = 3;
  const auto st = simulate(sc, DecentralizedActions{&pi}, sim);
  const auto ex = exact_marginals(pi, sc, 3);
  std::ostringstream with, without;
  write_slot_stats_csv(with, st, &ex);
  write_slot_stats_csv(without, st);
  std::istringstream in(with.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "slot,node,tx_prob,mean_battery,collision_rate,success_rate,exact_tx_prob,"
            "exact_mean_battery");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 4), "0,1,");
  const std::string full = with.str(), bare = without.str();
  EXPECT_EQ(std::count(full.begin(), full.end(), '\n'), 7);
  EXPECT_EQ(bare.substr(bare.size() - 3), ",,\n");
}

TEST(ParametricPolicy, RejectsBadTheta) {
  const Scenario sc(NetworkConfig::two_node_default());
  const int bad[] = {0, 6};
  EXPECT_THROW(parametric_policy(sc, bad), ConfigError);
  const int short_theta[] = {1};
  EXPECT_THROW(parametric_policy(sc, short_theta), ConfigError);
}
