#pragma once

// Threshold-based single-user reward under V = ln(1 + Lambda H), H ~ Exp(1),
// and the collision-channel global reward built on it.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "ehdec/model.hpp"

namespace ehdec {

inline constexpr double kQuadratureTolerance = 1e-10;

// P(V >= v) = exp(-(e^v - 1) / Lambda).
inline double ccdf_v(double v, double lambda) {
  if (v <= 0.0) return 1.0;
  return std::exp(-std::expm1(v) / lambda);
}

// Inverse of ccdf_v: the reward threshold that yields transmission
// probability `a`. a = 0 maps to +inf.
inline double threshold_from_action(double a, double lambda) {
  if (a < 0.0 || a > 1.0)
    throw std::domain_error("transmission probability outside [0, 1]");
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  if (a == 1.0) return 0.0;
  return std::log1p(-lambda * std::log(a));
}

// E[V 1{V >= threshold(a)}], integrated in h = (e^v - 1) / Lambda so the
// integrand is ln(1 + Lambda h) e^{-h} on [-ln a, inf).
inline double g(double a, double lambda, double tol = kQuadratureTolerance) {
  if (a < 0.0 || a > 1.0)
    throw std::domain_error("transmission probability outside [0, 1]");
  if (a == 0.0) return 0.0;
  const double lower = -std::log(a);
  auto integrand = [lambda](double h) {
    return std::log1p(lambda * h) * std::exp(-h);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value =
      integrator.integrate(integrand, lower, std::numeric_limits<double>::infinity(),
                           tol, &error, &l1, &levels);
  return value;
}

// r(a) = sum_i w^i g^i(a^i) prod_{j != i} (1 - a^j).
inline double global_reward(std::span<const double> actions,
                            std::span<const double> weights,
                            std::span<const double> g_values) {
  const std::size_t n = actions.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (actions[i] == 0.0) continue;
    double solo = weights[i] * g_values[i];
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) solo *= 1.0 - actions[j];
    total += solo;
  }
  return total;
}

// Per-node g tables on the action grid plus the global reward on grid indices.
class RewardModel {
 public:
  RewardModel() = default;

  explicit RewardModel(const NetworkConfig& cfg, double tol = kQuadratureTolerance)
      : grid_(cfg.a_levels), weights_(cfg.weight), lambda_(cfg.lambda), tol_(tol) {
    tables_.resize(cfg.n_nodes);
    for (std::size_t i = 0; i < cfg.n_nodes; ++i) {
      tables_[i].resize(static_cast<std::size_t>(cfg.a_levels));
      for (int j = 0; j < cfg.a_levels; ++j) tables_[i][j] = g(grid_[j], cfg.lambda[i], tol);
    }
  }

  const ActionGrid& grid() const noexcept { return grid_; }
  double tolerance() const noexcept { return tol_; }
  double lambda(std::size_t node) const { return lambda_[node]; }
  double weight(std::size_t node) const { return weights_[node]; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> g_table(std::size_t node) const { return tables_[node]; }
  double g_at(std::size_t node, int action) const {
    return tables_[node][static_cast<std::size_t>(action)];
  }

  // Largest single-slot reward: max_i w^i g(1, Lambda^i).
  double r_max() const {
    double best = 0.0;
    for (std::size_t i = 0; i < tables_.size(); ++i)
      best = std::max(best, weights_[i] * tables_[i].back());
    return best;
  }

  double global_reward(std::span<const int> action_idx) const {
    const std::size_t n = action_idx.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (action_idx[i] == 0) continue;
      double solo = weights_[i] * g_at(i, action_idx[i]);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) solo *= 1.0 - grid_[action_idx[j]];
      total += solo;
    }
    return total;
  }

  // r(sigma(e)) for the joint state with the given levels.
  double rule_reward(const DecisionRule& sigma, std::span<const int> levels) const {
    const std::size_t n = levels.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int ai = sigma.at(i, levels[i]);
      if (ai == 0) continue;
      double solo = weights_[i] * g_at(i, ai);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) solo *= 1.0 - grid_[sigma.at(j, levels[j])];
      total += solo;
    }
    return total;
  }

 private:
  ActionGrid grid_;
  std::vector<double> weights_;
  std::vector<double> lambda_;
  std::vector<std::vector<double>> tables_;
  double tol_ = kQuadratureTolerance;
};

// rho(eta, sigma) = sum_e eta(e) r(sigma(e)).
inline double occupancy_reward(std::span<const double> eta, const DecisionRule& sigma,
                               const StateSpace& space, const RewardModel& rewards) {
  double total = 0.0;
  for (std::size_t s = 0; s < space.size(); ++s) {
    if (eta[s] == 0.0) continue;
    total += eta[s] * rewards.rule_reward(sigma, space.levels(s));
  }
  return total;
}

}  // namespace ehdec
