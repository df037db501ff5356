#include <gtest/gtest.h>

#include <random>

#include "ehdec/occupancy.hpp"

using namespace ehdec;

namespace {

std::vector<double> random_simplex(std::mt19937_64& gen, std::size_t n, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  double m = 0.0;
  for (double& p : v) m += (p = u(gen) < zero_prob ? 0.0 : u(gen));
  if (m == 0.0) v[0] = m = 1.0;
  for (double& p : v) p /= m;
  return v;
}

DecisionRule random_rule(std::mt19937_64& gen, const NetworkConfig& cfg) {
  DecisionRule rule = DecisionRule::idle(cfg);
  for (auto& row : rule.actions)
    for (std::size_t e = 1; e < row.size(); ++e) row[e] = static_cast<int>(gen() % cfg.a_levels);
  return rule;
}

}  // namespace

TEST(OccupancyUpdate, IdentityDynamics) {
  auto cfg = NetworkConfig::two_node_default();
  cfg.p_b = {0.0, 0.0};
  const Scenario sc(cfg);
  const int lv[] = {2, 4};
  const auto eta = OccupancyState::degenerate(sc.space.size(), sc.space.index(lv));
  EXPECT_EQ(occupancy_update(eta, DecisionRule::idle(cfg), sc), eta);
}

TEST(OccupancyUpdate, ArrivalsFromEmpty) {
  const Scenario sc(NetworkConfig::two_node_default());
  const auto eta = OccupancyState::degenerate(sc.space.size(), 0);
  const auto next = occupancy_update(eta, DecisionRule::idle(sc.cfg), sc);
  const int s00[] = {0, 0}, s01[] = {0, 1}, s10[] = {1, 0}, s11[] = {1, 1};
  EXPECT_NEAR(next[sc.space.index(s00)], 0.81, 1e-15);
  EXPECT_NEAR(next[sc.space.index(s01)], 0.09, 1e-15);
  EXPECT_NEAR(next[sc.space.index(s10)], 0.09, 1e-15);
  EXPECT_NEAR(next[sc.space.index(s11)], 0.01, 1e-15);
}

TEST(OccupancyUpdate, MatchesDenseJointTransition) {
  NetworkConfig cfg;
  cfg.e_max = {3, 4};
  cfg.p_b = {0.15, 0.4};
  cfg.a_levels = 5;
  const Scenario sc(cfg);
  std::mt19937_64 gen(3);
  for (int t = 0; t < 20; ++t) {
    const OccupancyState eta(random_simplex(gen, sc.space.size(), 0.3));
    const DecisionRule rule = random_rule(gen, cfg);
    const auto next = occupancy_update(eta, rule, sc);
    for (std::size_t n = 0; n < sc.space.size(); ++n) {
      double dense = 0.0;
      for (std::size_t s = 0; s < sc.space.size(); ++s)
        dense += joint_transition_prob(sc.space.levels(s), rule, sc.space.levels(n), cfg) * eta[s];
      EXPECT_NEAR(next[n], dense, 1e-14);
    }
  }
}

TEST(OccupancyUpdate, MassPreservedOverChainedUpdates) {
  const Scenario sc(NetworkConfig::two_node_default());
  std::mt19937_64 gen(17);
  OccupancyState eta = OccupancyState::degenerate(sc.space.size(), 0);
  for (int k = 0; k < 1000; ++k) {
    eta = occupancy_update(eta, random_rule(gen, sc.cfg), sc);
    ASSERT_NEAR(eta.mass(), 1.0, 1e-12);
  }
}

// Product-form occupancies stay product-form under local rules.
TEST(OccupancyUpdate, ProductFormPreserved) {
  NetworkConfig cfg;
  cfg.e_max = {3, 5};
  cfg.p_b = {0.2, 0.3};
  cfg.a_levels = 6;
  const Scenario sc(cfg);
  std::mt19937_64 gen(21);
  for (int t = 0; t < 20; ++t) {
    const auto m1 = random_simplex(gen, 4), m2 = random_simplex(gen, 6);
    std::vector<double> joint(sc.space.size());
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 6; ++b) joint[a + 4 * b] = m1[a] * m2[b];
    auto next = occupancy_update(OccupancyState(joint), random_rule(gen, cfg), sc);
    std::vector<double> n1(4, 0.0), n2(6, 0.0);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 6; ++b) {
        n1[a] += next[a + 4 * b];
        n2[b] += next[a + 4 * b];
      }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 6; ++b) EXPECT_NEAR(next[a + 4 * b], n1[a] * n2[b], 1e-10);
  }
}

TEST(OccupancyState, RejectsNegativeAndEmpty) {
  EXPECT_THROW(OccupancyState(std::vector<double>{0.5, -0.1}), std::invalid_argument);
  EXPECT_THROW(OccupancyState(std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST(Y0, DotProductWithCorners) {
  std::mt19937_64 gen(8);
  const auto corners = random_simplex(gen, 36);
  const BoundPointSet set(corners);
  EXPECT_EQ(set.y0(OccupancyState::degenerate(36, 7)), corners[7]);
  for (int t = 0; t < 20; ++t) {
    const auto eta = random_simplex(gen, 36);
    double dot = 0.0;
    for (std::size_t s = 0; s < 36; ++s) dot += eta[s] * corners[s];
    EXPECT_NEAR(set.y0(OccupancyState(eta)), dot, 1e-12);
  }
}

TEST(Sawtooth, EmptyPointSetIsCornerBound) {
  std::mt19937_64 gen(9);
  const BoundPointSet set(random_simplex(gen, 10));
  const OccupancyState eta(random_simplex(gen, 10));
  EXPECT_EQ(set.sawtooth(eta), set.y0(eta));
}

TEST(Sawtooth, TwoStateHandExample) {
  BoundPointSet set({1.0, 2.0});
  ASSERT_TRUE(set.add_point(OccupancyState({0.5, 0.5}), 1.2));
  EXPECT_NEAR(set.sawtooth(OccupancyState({0.25, 0.75})), 1.60, 1e-12);
  EXPECT_NEAR(set.sawtooth(OccupancyState({0.5, 0.5})), 1.2, 1e-12);
}

TEST(AddBoundPoint, NonImprovingPointRejected) {
  BoundPointSet set({1.0, 2.0});
  const OccupancyState eta({0.5, 0.5});
  EXPECT_FALSE(set.add_point(eta, 1.5));
  EXPECT_EQ(set.size(), 0u);
  EXPECT_THROW(set.add_point(eta, std::nan("")), std::invalid_argument);
}

// Naive sawtooth over all points in insertion order, without pruning.
double naive_sawtooth(const BoundPointSet& set, const OccupancyState& eta) {
  double best = 0.0;
  for (const auto& pt : set.points()) {
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < eta.size(); ++s)
      if (pt.eta[s] > BoundPointSet::kSupportFloor) ratio = std::min(ratio, eta[s] / pt.eta[s]);
    best = std::min(best, (pt.value - set.y0(pt.eta)) * ratio);
  }
  return set.y0(eta) + best;
}

TEST(Sawtooth, PropertiesOnRandomSets) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 12;
  std::vector<double> corners(n);
  for (double& c : corners) c = 1.0 + 5.0 * u(gen);
  BoundPointSet set(corners);
  std::vector<OccupancyState> queries;
  for (int q = 0; q < 100; ++q) queries.emplace_back(random_simplex(gen, n, q % 3 == 0 ? 0.4 : 0.0));
  std::vector<double> before(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) before[q] = set.sawtooth(queries[q]);

  for (int k = 0; k < 60; ++k) {
    // Non-degenerate points (at least two states in the support).
    std::vector<double> p = random_simplex(gen, n, 0.5);
    if (std::count_if(p.begin(), p.end(), [](double x) { return x > 0; }) < 2) continue;
    const OccupancyState eta(p);
    const double y0 = set.y0(eta);
    const double v = y0 - u(gen) * 0.5 * y0;
    if (set.add_point(eta, v)) {
      EXPECT_LE(set.sawtooth(eta), v + 1e-12);
    }
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const double now = set.sawtooth(queries[q]);
      EXPECT_LE(now, before[q] + 1e-12);  // monotone in the point set
      EXPECT_LE(now, set.y0(queries[q]) + 1e-12);
      EXPECT_NEAR(now, naive_sawtooth(set, queries[q]), 1e-12);
      before[q] = now;
    }
  }
  ASSERT_GT(set.size(), 10u);
  for (std::size_t s = 0; s < n; ++s)
    EXPECT_NEAR(set.sawtooth(OccupancyState::degenerate(n, s)), corners[s], 1e-12);
}

TEST(AddBoundPoint, ImprovingPointIsTightAtItself) {
  BoundPointSet set({3.0, 1.0, 2.0});
  const OccupancyState eta({0.2, 0.3, 0.5});
  const double v = set.y0(eta) - 0.4;
  ASSERT_TRUE(set.add_point(eta, v));
  EXPECT_NEAR(set.sawtooth(eta), v, 1e-12);
}
