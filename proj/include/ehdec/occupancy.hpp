#pragma once

// Occupancy states (distributions over joint battery levels), their exact
// propagation under a decision rule, and the sawtooth upper bound over the
// occupancy simplex.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ehdec/scenario.hpp"

namespace ehdec {

class OccupancyState {
 public:
  OccupancyState() = default;
  explicit OccupancyState(std::vector<double> probs) : probs_(std::move(probs)) {
    for (double p : probs_)
      if (!(p >= 0.0)) throw std::invalid_argument("occupancy entries must be >= 0");
    normalize();
  }

  static OccupancyState degenerate(std::size_t size, std::size_t state) {
    OccupancyState eta;
    eta.probs_.assign(size, 0.0);
    eta.probs_.at(state) = 1.0;
    return eta;
  }

  static OccupancyState uniform(std::size_t size) {
    OccupancyState eta;
    eta.probs_.assign(size, 1.0 / static_cast<double>(size));
    return eta;
  }

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t s) const { return probs_[s]; }
  std::span<const double> probs() const noexcept { return probs_; }

  double mass() const {
    double m = 0.0;
    for (double p : probs_) m += p;
    return m;
  }

  bool operator==(const OccupancyState&) const = default;

 private:
  void normalize() {
    const double m = mass();
    if (!(m > 0.0)) throw std::invalid_argument("occupancy state has zero mass");
    for (double& p : probs_) p /= m;
  }

  std::vector<double> probs_;
};

// kernels[i][e] is node i's successor row from local level e.
using LocalKernel = std::vector<LocalRow>;

inline LocalKernel local_kernel(const Scenario& sc, std::size_t node,
                                std::span<const int> local_rule) {
  LocalKernel k(local_rule.size());
  for (std::size_t e = 0; e < local_rule.size(); ++e)
    k[e] = sc.row(node, static_cast<int>(e), local_rule[e]);
  return k;
}

// Applies each node's kernel along its own axis of the joint distribution.
// `scratch` and `out` are resized as needed; `out` is not renormalized.
inline void propagate_into(std::span<const double> in, const StateSpace& space,
                           std::span<const LocalKernel* const> kernels,
                           std::vector<double>& scratch, std::vector<double>& out) {
  out.assign(in.begin(), in.end());
  scratch.resize(in.size());
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    std::fill(scratch.begin(), scratch.end(), 0.0);
    const std::size_t stride = space.stride(i);
    const LocalKernel& kernel = *kernels[i];
    for (std::size_t s = 0; s < out.size(); ++s) {
      const double p = out[s];
      if (p == 0.0) continue;
      const int d = space.level(s, i);
      const std::size_t base = s - static_cast<std::size_t>(d) * stride;
      const LocalRow& row = kernel[static_cast<std::size_t>(d)];
      for (int k = 0; k < row.size; ++k)
        scratch[base + static_cast<std::size_t>(row.next[k]) * stride] += p * row.prob[k];
    }
    out.swap(scratch);
  }
}

inline OccupancyState propagate(const OccupancyState& eta, const StateSpace& space,
                                std::span<const LocalKernel* const> kernels) {
  std::vector<double> scratch;
  std::vector<double> out;
  propagate_into(eta.probs(), space, kernels, scratch, out);
  return OccupancyState(std::move(out));
}

inline OccupancyState occupancy_update(const OccupancyState& eta, const DecisionRule& sigma,
                                       const Scenario& sc) {
  std::vector<LocalKernel> kernels;
  std::vector<const LocalKernel*> ptrs;
  kernels.reserve(sc.n_nodes());
  for (std::size_t i = 0; i < sc.n_nodes(); ++i)
    kernels.push_back(local_kernel(sc, i, sigma.actions[i]));
  for (const auto& k : kernels) ptrs.push_back(&k);
  return propagate(eta, sc.space, ptrs);
}

// Corner values plus visited (occupancy, upper bound) points.
class BoundPointSet {
 public:
  static constexpr double kSupportFloor = 1e-15;
  static constexpr double kImprovementSlack = 1e-12;

  struct Point {
    OccupancyState eta;
    double value = 0.0;
    double corner_bound = 0.0;  // y0(eta) at insertion
    std::vector<std::pair<std::size_t, double>> support;  // (state, 1 / eta(state))
    double gain() const { return value - corner_bound; }
  };

  BoundPointSet() = default;
  explicit BoundPointSet(std::vector<double> corners) : corners_(std::move(corners)) {}

  std::span<const double> corners() const noexcept { return corners_; }
  const std::vector<Point>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

  double y0(const OccupancyState& eta) const { return y0(eta.probs()); }
  double sawtooth(const OccupancyState& eta) const { return sawtooth(eta.probs()); }

  double y0(std::span<const double> p) const {
    double acc = 0.0;
    for (std::size_t s = 0; s < corners_.size(); ++s) acc += p[s] * corners_[s];
    return acc;
  }

  // y0(eta) + min_l (v_l - y0(eta_l)) min_{theta in supp eta_l} eta(theta) / eta_l(theta).
  // Each min ratio is <= 1, so points are scanned by decreasing |gain| and the
  // scan stops once no remaining point can beat the best correction.
  double sawtooth(std::span<const double> p) const {
    const double base = y0(p);
    double best = 0.0;  // largest |correction| found so far
    for (std::size_t idx : by_gain_) {
      const Point& pt = points_[idx];
      const double mag = -pt.gain();
      if (mag <= best) break;
      double ratio = std::numeric_limits<double>::infinity();
      for (const auto& [state, inv] : pt.support) {
        ratio = std::min(ratio, p[state] * inv);
        if (mag * ratio <= best) break;
      }
      best = std::max(best, mag * ratio);
    }
    return base - best;
  }

  // Stores the point iff it lowers the corner bound at eta.
  bool add_point(const OccupancyState& eta, double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("bound value must be finite");
    const double corner = y0(eta);
    if (!(value < corner - kImprovementSlack)) return false;
    Point pt{eta, value, corner, {}};
    const auto p = eta.probs();
    for (std::size_t s = 0; s < p.size(); ++s)
      if (p[s] > kSupportFloor) pt.support.emplace_back(s, 1.0 / p[s]);
    points_.push_back(std::move(pt));
    const std::size_t idx = points_.size() - 1;
    const double g = points_[idx].gain();
    auto pos = std::upper_bound(by_gain_.begin(), by_gain_.end(), g,
                                [this](double gv, std::size_t j) { return gv < points_[j].gain(); });
    by_gain_.insert(pos, idx);
    return true;
  }

 private:
  std::vector<double> corners_;
  std::vector<Point> points_;
  std::vector<std::size_t> by_gain_;  // indices sorted by gain, most negative first
};

}  // namespace ehdec
