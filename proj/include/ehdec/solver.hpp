#pragma once

// Markov Policy Search over the occupancy MDP: LRTA*-style trials that tighten
// per-depth sawtooth upper bounds along visited occupancy states and keep the
// best greedy trial policy as an exactly evaluated lower bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehdec/centralized.hpp"
#include "ehdec/occupancy.hpp"
#include "ehdec/scenario.hpp"

namespace ehdec {

// Decision rules for slots 0..K-1; slots past K reuse the last rule.
struct MarkovPolicy {
  std::vector<DecisionRule> rules;

  std::size_t horizon() const noexcept { return rules.size(); }
  const DecisionRule& at(std::size_t slot) const {
    if (rules.empty()) throw std::logic_error("empty Markov policy");
    return rules[std::min(slot, rules.size() - 1)];
  }

  bool operator==(const MarkovPolicy&) const = default;
};

// Low-dimensional family of local rules: node i picks one of levels(i)
// parameters, each generating a full local rule.
class ParametricFamily {
 public:
  virtual ~ParametricFamily() = default;
  virtual int levels(std::size_t node) const = 0;
  virtual std::vector<int> local_rule(std::size_t node, int param) const = 0;
};

// sigma^i(e) = min(1, theta e) with theta e_max^i in {0, 1/(L-1), ..., 1},
// rounded half-up to the action grid. Rules are non-decreasing in e and idle
// at e = 0.
class ClippedLinearFamily final : public ParametricFamily {
 public:
  explicit ClippedLinearFamily(const NetworkConfig& cfg)
      : e_max_(cfg.e_max), theta_levels_(cfg.theta_levels), a_levels_(cfg.a_levels) {}

  int levels(std::size_t) const override { return theta_levels_; }

  double theta(std::size_t node, int param) const {
    return static_cast<double>(param) /
           (static_cast<double>(theta_levels_ - 1) * e_max_[node]);
  }

  std::vector<int> local_rule(std::size_t node, int param) const override {
    const int e_max = e_max_[node];
    std::vector<int> rule(static_cast<std::size_t>(e_max + 1), 0);
    // Exact rational rounding of param * e / ((L - 1) e_max) onto the grid.
    const std::int64_t den = static_cast<std::int64_t>(theta_levels_ - 1) * e_max;
    for (int e = 1; e <= e_max; ++e) {
      const std::int64_t num = static_cast<std::int64_t>(param) * e * (a_levels_ - 1);
      const std::int64_t idx = (2 * num + den) / (2 * den);
      rule[static_cast<std::size_t>(e)] =
          static_cast<int>(std::min<std::int64_t>(idx, a_levels_ - 1));
    }
    return rule;
  }

 private:
  std::vector<int> e_max_;
  int theta_levels_;
  int a_levels_;
};

struct BackupResult {
  DecisionRule rule;
  double value = -std::numeric_limits<double>::infinity();
  std::vector<int> choice;  // per-node candidate index of the argmax
  std::size_t candidates = 0;
};

namespace detail {

// Maximizes rho(eta, sigma) + beta sawtooth(next, omega(eta, sigma)) over the
// product of per-node local rule candidates, node 0 most significant, first
// maximum wins.
inline BackupResult backup_over_product(const OccupancyState& eta, const BoundPointSet& next,
                                        const Scenario& sc,
                                        const std::vector<std::vector<std::vector<int>>>& local) {
  const std::size_t n = sc.n_nodes();
  const auto& space = sc.space;
  const auto probs = eta.probs();
  std::vector<std::vector<LocalKernel>> kernels(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& rule : local[i]) kernels[i].push_back(local_kernel(sc, i, rule));

  std::vector<std::size_t> support;
  for (std::size_t s = 0; s < space.size(); ++s)
    if (probs[s] > 0.0) support.push_back(s);

  BackupResult best;
  std::vector<int> pos(n, 0);
  std::vector<const LocalKernel*> chosen(n);
  std::vector<double> scratch;
  std::vector<double> next_eta;
  std::vector<int> act(n);
  const auto weights = sc.rewards.weights();
  while (true) {
    double rho = 0.0;
    for (std::size_t s : support) {
      const auto lv = space.levels(s);
      for (std::size_t i = 0; i < n; ++i)
        act[i] = local[i][static_cast<std::size_t>(pos[i])][static_cast<std::size_t>(lv[i])];
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (act[i] == 0) continue;
        double solo = weights[i] * sc.rewards.g_at(i, act[i]);
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) solo *= 1.0 - sc.grid[act[j]];
        r += solo;
      }
      rho += probs[s] * r;
    }
    double value = rho;
    if (sc.beta() > 0.0) {
      for (std::size_t i = 0; i < n; ++i) chosen[i] = &kernels[i][static_cast<std::size_t>(pos[i])];
      propagate_into(probs, space, chosen, scratch, next_eta);
      value += sc.beta() * next.sawtooth(std::span<const double>(next_eta));
    }
    ++best.candidates;
    if (value > best.value) {
      best.value = value;
      best.choice = pos;
    }
    std::size_t i = n;
    bool done = false;
    while (i > 0) {
      --i;
      if (++pos[i] < static_cast<int>(local[i].size())) break;
      pos[i] = 0;
      if (i == 0) done = true;
    }
    if (done) break;
  }
  best.rule.actions.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    best.rule.actions[i] = local[i][static_cast<std::size_t>(best.choice[i])];
  return best;
}

}  // namespace detail

inline BackupResult backup_exhaustive(const OccupancyState& eta, const BoundPointSet& next,
                                      const Scenario& sc,
                                      std::uint64_t cap = kDefaultEnumerationCap) {
  const long double count = decision_rule_count(sc.cfg);
  if (count > static_cast<long double>(cap)) throw EnumerationCapExceeded(count, cap);
  std::vector<std::vector<std::vector<int>>> local;
  for (std::size_t i = 0; i < sc.n_nodes(); ++i)
    local.push_back(enumerate_local_rules(sc.cfg.e_max[i], sc.cfg.a_levels));
  return detail::backup_over_product(eta, next, sc, local);
}

inline BackupResult backup_parametric(const OccupancyState& eta, const BoundPointSet& next,
                                      const Scenario& sc, const ParametricFamily& family) {
  std::vector<std::vector<std::vector<int>>> local(sc.n_nodes());
  for (std::size_t i = 0; i < sc.n_nodes(); ++i)
    for (int j = 0; j < family.levels(i); ++j) local[i].push_back(family.local_rule(i, j));
  return detail::backup_over_product(eta, next, sc, local);
}

inline BackupResult backup_parametric(const OccupancyState& eta, const BoundPointSet& next,
                                      const Scenario& sc) {
  return backup_parametric(eta, next, sc, ClippedLinearFamily(sc.cfg));
}

// Exact sum_{k<K} beta^k rho(eta_k, sigma_k) with eta_k from chained updates.
// The tail past K contributes nothing.
inline double evaluate_policy(const MarkovPolicy& pi, const OccupancyState& eta0,
                              const Scenario& sc) {
  OccupancyState eta = eta0;
  double total = 0.0;
  double discount = 1.0;
  for (std::size_t k = 0; k < pi.horizon(); ++k) {
    total += discount * occupancy_reward(eta.probs(), pi.rules[k], sc.space, sc.rewards);
    if (k + 1 < pi.horizon()) eta = occupancy_update(eta, pi.rules[k], sc);
    discount *= sc.beta();
  }
  return total;
}

// Smallest K with beta^K r_max / (1 - beta) <= eps_tail.
inline int truncation_horizon(double eps_tail, double beta, double r_max) {
  if (beta == 0.0 || r_max <= 0.0) return 1;
  const double arg = eps_tail * (1.0 - beta) / r_max;
  if (arg >= 1.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(std::log(arg) / std::log(beta))));
}

inline double tail_bound(int horizon, double beta, double r_max) {
  return std::pow(beta, horizon) * r_max / (1.0 - beta);
}

enum class BackupMode { exhaustive, parametric };

inline const char* to_string(BackupMode m) {
  return m == BackupMode::exhaustive ? "exhaustive" : "parametric";
}

inline BackupMode parse_backup_mode(const std::string& s) {
  if (s == "exhaustive") return BackupMode::exhaustive;
  if (s == "parametric") return BackupMode::parametric;
  throw ConfigError("solver.backup", "expected \"exhaustive\" or \"parametric\", got \"" + s + "\"");
}

struct SolverOptions {
  double eps = 0.0;  // <= 0 selects 1e-3 r_max
  int max_trials = 500;
  BackupMode backup = BackupMode::parametric;
  int horizon = 0;  // 0 selects the truncation rule
  // Bound sets past the horizon are zero instead of the centralized values,
  // so the search targets the K-slot truncated objective exactly.
  bool finite_horizon = false;
  double eps_vi = kDefaultViTolerance;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

struct TrialRecord {
  int trial = 0;
  double upper = 0.0;
  double lower = 0.0;
  double trial_value = 0.0;
};

struct SolveReport {
  double upper = 0.0;
  double lower = 0.0;
  double gap = 0.0;
  int trials = 0;
  bool converged = false;
  MarkovPolicy policy;
  std::vector<TrialRecord> trace;
  int horizon = 0;
  double eps = 0.0;
  double tail = 0.0;
  double centralized_value = 0.0;
  BackupMode backup = BackupMode::parametric;
  bool finite_horizon = false;
};

class MarkovPolicySearch {
 public:
  MarkovPolicySearch(const Scenario& sc, const ValueTable& vstar, SolverOptions opt)
      : sc_(sc), opt_(opt), family_(sc.cfg) {
    const double r_max = sc.rewards.r_max();
    eps_ = opt.eps > 0.0 ? opt.eps : 1e-3 * r_max;
    horizon_ = opt.horizon > 0 ? opt.horizon : truncation_horizon(eps_ / 2.0, sc.beta(), r_max);
    tail_ = opt.finite_horizon ? 0.0 : tail_bound(horizon_, sc.beta(), r_max);
    const auto corners = corner_values(vstar);
    sets_.reserve(static_cast<std::size_t>(horizon_) + 1);
    for (int k = 0; k < horizon_; ++k) sets_.emplace_back(corners);
    sets_.emplace_back(opt.finite_horizon ? std::vector<double>(corners.size(), 0.0) : corners);
    eta0_ = OccupancyState::degenerate(sc.space.size(), sc.initial_state());
    centralized_ = vstar[sc.initial_state()];
  }

  int horizon() const noexcept { return horizon_; }
  double eps() const noexcept { return eps_; }
  const BoundPointSet& bounds(int depth) const { return sets_[static_cast<std::size_t>(depth)]; }
  const OccupancyState& initial_occupancy() const noexcept { return eta0_; }

  double upper() const { return sets_[0].sawtooth(eta0_); }

  BackupResult backup(const OccupancyState& eta, int depth) const {
    const BoundPointSet& next = sets_[static_cast<std::size_t>(depth) + 1];
    if (opt_.backup == BackupMode::exhaustive)
      return backup_exhaustive(eta, next, sc_, opt_.enumeration_cap);
    return backup_parametric(eta, next, sc_, family_);
  }

  // One forward greedy pass from eta0 recording bounds, then a backward pass
  // re-backing-up the visited states. Returns the greedy trial policy.
  MarkovPolicy trial() {
    MarkovPolicy pi;
    std::vector<OccupancyState> path;
    path.reserve(static_cast<std::size_t>(horizon_));
    OccupancyState eta = eta0_;
    for (int k = 0; k < horizon_; ++k) {
      BackupResult b = backup(eta, k);
      record(k, eta, b.value);
      path.push_back(eta);
      if (k + 1 < horizon_) eta = occupancy_update(eta, b.rule, sc_);
      pi.rules.push_back(std::move(b.rule));
    }
    for (int k = horizon_ - 1; k >= 0; --k)
      record(k, path[static_cast<std::size_t>(k)], backup(path[static_cast<std::size_t>(k)], k).value);
    return pi;
  }

  SolveReport run() {
    SolveReport rep;
    rep.horizon = horizon_;
    rep.eps = eps_;
    rep.tail = tail_;
    rep.centralized_value = centralized_;
    rep.backup = opt_.backup;
    rep.finite_horizon = opt_.finite_horizon;
    rep.lower = -std::numeric_limits<double>::infinity();
    for (int t = 1; t <= opt_.max_trials; ++t) {
      MarkovPolicy pi = trial();
      const double value = evaluate_policy(pi, eta0_, sc_);
      if (value > rep.lower) {
        rep.lower = value;
        rep.policy = std::move(pi);
      }
      rep.upper = upper();
      rep.trials = t;
      rep.trace.push_back({t, rep.upper, rep.lower, value});
      if (rep.upper - rep.lower <= eps_) {
        rep.converged = true;
        break;
      }
    }
    rep.gap = rep.upper - rep.lower;
    return rep;
  }

 private:
  void record(int depth, const OccupancyState& eta, double value) {
    BoundPointSet& set = sets_[static_cast<std::size_t>(depth)];
    if (value < set.sawtooth(eta) - BoundPointSet::kImprovementSlack) set.add_point(eta, value);
  }

  const Scenario& sc_;
  SolverOptions opt_;
  ClippedLinearFamily family_;
  double eps_ = 0.0;
  int horizon_ = 1;
  double tail_ = 0.0;
  double centralized_ = 0.0;
  OccupancyState eta0_;
  std::vector<BoundPointSet> sets_;
};

inline SolveReport mps_solve(const Scenario& sc, const ValueTable& vstar,
                             const SolverOptions& opt = {}) {
  if (opt.max_trials < 1) throw ConfigError("solver.max_trials", "must be >= 1");
  MarkovPolicySearch search(sc, vstar, opt);
  return search.run();
}

inline SolveReport mps_solve(const Scenario& sc, const SolverOptions& opt = {}) {
  return mps_solve(sc, value_iteration(sc, opt.eps_vi), opt);
}

}  // namespace ehdec
