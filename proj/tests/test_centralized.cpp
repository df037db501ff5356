#include <gtest/gtest.h>

#include "ehdec/centralized.hpp"
#include "ehdec/occupancy.hpp"

using namespace ehdec;

namespace {

NetworkConfig small_config() {
  NetworkConfig cfg;
  cfg.e_max = {1, 1};
  cfg.a_levels = 3;
  cfg.e0 = {0, 0};
  return cfg;
}

// Dense Gauss-Seidel value iteration over a reversed state order, written
// against the raw transition function rather than the sparse rows.
std::vector<double> brute_force_vi(const Scenario& sc) {
  std::vector<double> v(sc.space.size(), 0.0);
  for (int sweep = 0; sweep < 2000; ++sweep) {
    double change = 0.0;
    for (std::size_t s = sc.space.size(); s-- > 0;) {
      const auto lv = sc.space.levels(s);
      double best = -1.0;
      for (int a1 = 0; a1 < sc.grid.levels(); ++a1)
        for (int a2 = 0; a2 < sc.grid.levels(); ++a2) {
          if ((lv[0] == 0 && a1 > 0) || (lv[1] == 0 && a2 > 0)) continue;
          const int act[] = {a1, a2};
          double q = sc.rewards.global_reward(act);
          for (std::size_t t = 0; t < sc.space.size(); ++t) {
            const auto nx = sc.space.levels(t);
            q += sc.beta() * local_transition_prob(lv[0], sc.grid[a1], nx[0], 0, sc.cfg) *
                 local_transition_prob(lv[1], sc.grid[a2], nx[1], 1, sc.cfg) * v[t];
          }
          best = std::max(best, q);
        }
      change = std::max(change, std::abs(best - v[s]));
      v[s] = best;
    }
    if (change < 1e-14) break;
  }
  return v;
}

}  // namespace

TEST(BellmanBackup, MyopicReducesToSoloCorner) {
  auto cfg = NetworkConfig::two_node_default();
  cfg.beta = 0.0;
  const Scenario sc(cfg);
  ValueTable zero;
  zero.values.assign(sc.space.size(), 0.0);
  const int lv[] = {5, 5};
  const auto b = bellman_backup(zero, sc.space.index(lv), sc);
  EXPECT_NEAR(b.value, sc.rewards.g_at(0, 10), 1e-15);
  EXPECT_EQ(b.action, (std::vector<int>{10, 0}));
}

TEST(BellmanBackup, EmptyBatteriesForcedIdle) {
  const Scenario sc(NetworkConfig::two_node_default());
  const ValueTable v = value_iteration(sc);
  const int lv[] = {0, 0};
  const std::size_t s = sc.space.index(lv);
  const auto b = bellman_backup(v, s, sc);
  EXPECT_EQ(b.action, (std::vector<int>{0, 0}));
  double expected = 0.0;
  for (std::size_t t = 0; t < sc.space.size(); ++t)
    expected += joint_transition_prob(lv, DecisionRule::idle(sc.cfg), sc.space.levels(t), sc.cfg) * v[t];
  EXPECT_NEAR(b.value, sc.beta() * expected, 1e-12);
}

TEST(ValueIteration, SmallInstanceMatchesIndependentSolvers) {
  const Scenario sc(small_config());
  const ValueTable v = value_iteration(sc, 1e-11);
  const auto brute = brute_force_vi(sc);
  // Frozen from tests/oracles/reference_values.py (numpy, closed-form g).
  const double frozen[] = {3.0965140345326185, 4.992179882051942, 4.696233903698059,
                           6.043754079185941};
  for (std::size_t s = 0; s < 4; ++s) {
    EXPECT_NEAR(v[s], brute[s], 1e-9);
    EXPECT_NEAR(v[s], frozen[s], 1e-9);
  }
}

TEST(ValueIteration, DefaultScenarioRegressionAnchor) {
  const Scenario sc(NetworkConfig::two_node_default());
  const ValueTable v = value_iteration(sc);
  const int full[] = {5, 5}, empty[] = {0, 0}, mixed[] = {0, 5};
  EXPECT_NEAR(v[sc.space.index(full)], 12.354760378374056, 2e-9);
  EXPECT_NEAR(v[sc.space.index(empty)], 3.3264542161893846, 2e-9);
  EXPECT_NEAR(v[sc.space.index(mixed)], 8.981579542495474, 2e-9);
}

TEST(ValueIteration, DeadNetworkIsZero) {
  auto cfg = NetworkConfig::two_node_default();
  cfg.p_b = {0.0, 0.0};
  const Scenario sc(cfg);
  const ValueTable v = value_iteration(sc);
  EXPECT_EQ(v[sc.initial_state()], 0.0);
}

TEST(ValueIteration, MonotoneInEnergyAndBounded) {
  const Scenario sc(NetworkConfig::two_node_default());
  const ValueTable v = value_iteration(sc);
  const double cap = sc.rewards.r_max() / (1 - sc.beta());
  for (std::size_t s = 0; s < sc.space.size(); ++s) {
    EXPECT_GE(v[s], 0.0);
    EXPECT_LE(v[s], cap);
    const auto lv = sc.space.levels(s);
    for (std::size_t i = 0; i < 2; ++i) {
      if (lv[i] == 5) continue;
      std::vector<int> up(lv.begin(), lv.end());
      ++up[i];
      EXPECT_GE(v[sc.space.index(up)], v[s] - 1e-12);
    }
  }
}

TEST(ValueIteration, ResidualsContract) {
  const Scenario sc(NetworkConfig::two_node_default());
  const ValueTable v = value_iteration(sc);
  for (std::size_t k = 2; k < v.residual_trace.size(); ++k)
    EXPECT_LE(v.residual_trace[k], v.residual_trace[k - 1] + 1e-15);
  EXPECT_LE(v.residual, 1e-9 * (1 - 0.9) / (2 * 0.9));
}

TEST(ValueIteration, SweepCapRaises) {
  const Scenario sc(NetworkConfig::two_node_default());
  EXPECT_THROW(value_iteration(sc, 1e-9, 3), ValueIterationDiverged);
  EXPECT_THROW(value_iteration(sc, 0.0), std::invalid_argument);
}

TEST(CornerValues, SeedTheCornerBound) {
  const Scenario sc(NetworkConfig::two_node_default());
  const ValueTable v = value_iteration(sc);
  const auto corners = corner_values(v);
  ASSERT_EQ(corners.size(), sc.space.size());
  const BoundPointSet set(corners);
  for (std::size_t s = 0; s < sc.space.size(); ++s) {
    EXPECT_EQ(corners[s], v[s]);
    EXPECT_NEAR(set.y0(OccupancyState::degenerate(sc.space.size(), s)), v[s], 1e-15);
  }
  double mean = 0.0;
  for (double c : corners) mean += c;
  mean /= static_cast<double>(corners.size());
  EXPECT_NEAR(set.y0(OccupancyState::uniform(sc.space.size())), mean, 1e-12);
}

TEST(ValueTable, CsvDump) {
  const Scenario sc(small_config());
  const ValueTable v = value_iteration(sc);
  std::ostringstream os;
  write_values_csv(os, v, sc);
  const std::string out = os.str();
  EXPECT_EQ(out.substr(0, out.find('\n')), "index,e1,e2,value");
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 5);
}
