// Copyright 2026 The revprice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "revprice/forward_pricing.hpp"
#include "revprice/market_model.hpp"
#include "revprice/random.hpp"

namespace revprice {

/// How the operator chooses the minimum participation price of a slot.
class PminPolicy {
 public:
  enum class Kind { lemma1, ratio, absolute };

  /// Smallest floor at which no accepted bid earns less than the forward
  /// contract it replaces: p * total_demand / Q.
  static PminPolicy lemma1() { return PminPolicy(Kind::lemma1, 0.0); }

  /// Floor at a fixed fraction r of the posted price, r in [0, 1].
  static PminPolicy ratio(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("PminPolicy::ratio: r must lie in [0, 1]");
    return PminPolicy(Kind::ratio, r);
  }

  static PminPolicy absolute(double a) {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("PminPolicy::absolute: floor must be finite and >= 0");
    return PminPolicy(Kind::absolute, a);
  }

  Kind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }

  double resolve(double posted_price, double total_demand, const MarketConfig& config) const;

  friend bool operator==(const PminPolicy&, const PminPolicy&) = default;

 private:
  PminPolicy(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

/// Stage III announcement for one slot.
struct ReverseSetup {
  std::vector<double> recommended;
  double min_price = 0.0;
  double posted_price = 0.0;
  double residual = 0.0;
  /// False when there is nothing to sell (no residual or no demand) or the
  /// floor leaves no room below the posted price. Settlement is then skipped.
  bool active = false;
};

/// Stage IV result for one slot.
struct SettlementResult {
  std::vector<double> bids;
  std::vector<bool> participants;
  double threshold = 0.0;
  std::vector<bool> accepted;
  std::vector<double> allocations;
  std::vector<double> payments;
  std::vector<double> payoffs;
  double total_allocation = 0.0;
  double total_payment = 0.0;
  double total_payoff = 0.0;
};

inline double residual_resource(double total_demand, const MarketConfig& config) {
  if (!(total_demand >= 0.0)) throw std::domain_error("residual_resource: total_demand must be >= 0");
  return std::max(config.total_resource - total_demand, 0.0);
}

/// Proportional residual recommendation x_i = s_i + (s_i / sum_j s_j) * Q_r.
///
/// Computed as s_i * (Q / sum_j s_j). If rounding pushes the sum past Q the
/// common scale is stepped down one ulp at a time, so sum_i x_i <= Q holds
/// exactly in floating point while x_i >= s_i is preserved.
inline std::vector<double> recommend_allocations(std::span<const double> demands,
                                                 const MarketConfig& config) {
  double total = 0.0;
  for (double s : demands) {
    if (!(s >= 0.0)) throw std::domain_error("recommend_allocations: demands must be >= 0");
    total += s;
  }
  std::vector<double> x(demands.begin(), demands.end());
  const double residual = residual_resource(total, config);
  if (!(total > 0.0) || !(residual > 0.0)) return x;

  const double Q = config.total_resource;
  double scale = std::max(Q / total, 1.0);
  for (;;) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = demands[i] * scale;
      sum += x[i];
    }
    if (sum <= Q || scale <= 1.0) break;
    scale = std::max(std::nextafter(scale, 0.0), 1.0);
  }
  return x;
}

/// Lower bound p * total_demand / Q on the floor price.
inline double revenue_safe_min_price(double posted_price, double total_demand, const MarketConfig& config) {
  if (!(config.total_resource > 0.0))
    throw std::domain_error("revenue_safe_min_price: total_resource must be > 0");
  return posted_price * total_demand / config.total_resource;
}

inline double PminPolicy::resolve(double posted_price, double total_demand,
                                  const MarketConfig& config) const {
  switch (kind_) {
    case Kind::lemma1:
      // With no capacity there is no residual to sell; close the stage.
      if (!(config.total_resource > 0.0)) return posted_price;
      return revenue_safe_min_price(posted_price, total_demand, config);
    case Kind::ratio:
      return value_ * posted_price;
    case Kind::absolute:
      return value_;
  }
  return posted_price;
}

/// Stage III: residual, recommended bundles, floor price.
inline ReverseSetup reverse_setup(const ForwardOutcome& forward, const PminPolicy& policy,
                                  const MarketConfig& config) {
  ReverseSetup setup;
  setup.posted_price = forward.posted_price;
  setup.residual = residual_resource(forward.total_demand, config);
  setup.recommended = recommend_allocations(forward.demands, config);
  setup.min_price = policy.resolve(forward.posted_price, forward.total_demand, config);
  setup.active = forward.total_demand > 0.0 && setup.residual > 0.0 &&
                 setup.min_price >= 0.0 && setup.min_price < setup.posted_price;
  return setup;
}

/// Unit price v at which buying x at v pays off exactly as much as buying s at p:
/// v = [theta * ln((1 + x) / (1 + s)) + p * s] / x.
inline double indifference_price(double theta, double recommended_x, double demand_s,
                                 double posted_price) {
  if (!(recommended_x > 0.0))
    throw std::domain_error("indifference_price: recommended quantity must be > 0");
  if (!(demand_s >= 0.0)) throw std::domain_error("indifference_price: demand must be >= 0");
  return (theta * (std::log1p(recommended_x) - std::log1p(demand_s)) + posted_price * demand_s) /
         recommended_x;
}

/// Users willing to name a price: a positive recommended bundle whose
/// indifference price is at least the floor. Empty when the stage is closed.
inline std::vector<bool> participation_set(const DemandRealization& realization,
                                           const ReverseSetup& setup,
                                           std::span<const double> demands) {
  const std::size_t n = realization.theta.size();
  if (setup.recommended.size() != n || demands.size() != n)
    throw std::invalid_argument("participation_set: size mismatch");
  std::vector<bool> flags(n, false);
  if (!setup.active) return flags;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = setup.recommended[i];
    if (!(x > 0.0)) continue;
    flags[i] = setup.min_price <=
               indifference_price(realization.theta[i], x, demands[i], setup.posted_price);
  }
  return flags;
}

/// Expected-payoff-maximizing bid against a threshold uniform on [p_min, p]:
///   b* = [theta * ln((1 + x) / (1 + s)) + s * p + x * p_min] / (2x),
/// the midpoint of the floor and the indifference price. Clamped into
/// [p_min, p].
inline double optimal_bid(double theta, double recommended_x, double demand_s,
                          double posted_price, double min_price) {
  if (!(min_price >= 0.0) || !(min_price <= posted_price))
    throw std::domain_error("optimal_bid: floor must lie in [0, posted_price]");
  const double v = indifference_price(theta, recommended_x, demand_s, posted_price);
  if (min_price > v) throw std::domain_error("optimal_bid: user is not a participant");
  const double x = recommended_x;
  const double b =
      (theta * (std::log1p(x) - std::log1p(demand_s)) + demand_s * posted_price + x * min_price) /
      (2.0 * x);
  return std::clamp(b, min_price, posted_price);
}

/// Expected payoff of bidding b when the threshold is uniform on [p_min, p]:
/// payoff(theta, x, b) with probability (b - p_min) / (p - p_min), the forward
/// payoff payoff(theta, s, p) otherwise.
inline double expected_bid_payoff(double bid, double theta, double recommended_x, double demand_s,
                                  double posted_price, double min_price) {
  if (!(min_price < posted_price))
    throw std::domain_error("expected_bid_payoff: empty threshold interval");
  if (!(bid >= min_price && bid <= posted_price))
    throw std::domain_error("expected_bid_payoff: bid outside [min_price, posted_price]");
  const double width = posted_price - min_price;
  return payoff(theta, recommended_x, bid) * (bid - min_price) / width +
         payoff(theta, demand_s, posted_price) * (posted_price - bid) / width;
}

/// Optimal bid for participants, 0 for everyone else.
inline std::vector<double> optimal_bids(const DemandRealization& realization,
                                        const ReverseSetup& setup, std::span<const double> demands,
                                        const std::vector<bool>& participants) {
  const std::size_t n = realization.theta.size();
  if (participants.size() != n) throw std::invalid_argument("optimal_bids: size mismatch");
  std::vector<double> bids(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!participants[i]) continue;
    bids[i] = optimal_bid(realization.theta[i], setup.recommended[i], demands[i],
                          setup.posted_price, setup.min_price);
  }
  return bids;
}

/// Stage IV settlement. Draws one hidden threshold for the slot, uniform on
/// [p_min, p]; a participant is accepted iff bid >= threshold and then buys
/// the recommended bundle at the bid. Everyone else keeps the forward
/// contract (s_i at p).
template <FullRangeEngine G>
SettlementResult settle(const DemandRealization& realization, const ReverseSetup& setup,
                        std::span<const double> demands, std::span<const double> bids, G& rng) {
  if (!setup.active) throw std::logic_error("settle: reverse stage is not active for this slot");
  const std::size_t n = realization.theta.size();
  if (bids.size() != n) throw std::invalid_argument("settle: bids size mismatch");

  SettlementResult out;
  out.participants = participation_set(realization, setup, demands);
  const double p = setup.posted_price;
  const double floor = setup.min_price;
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok = out.participants[i] ? (bids[i] >= floor && bids[i] <= p) : bids[i] == 0.0;
    if (!ok) throw std::invalid_argument("settle: bids inconsistent with the participation set");
  }

  out.bids.assign(bids.begin(), bids.end());
  out.threshold = uniform_between(rng, floor, p);
  out.accepted.assign(n, false);
  out.allocations.resize(n);
  out.payments.resize(n);
  out.payoffs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = realization.theta[i];
    const bool accepted = out.participants[i] && bids[i] >= out.threshold;
    out.accepted[i] = accepted;
    if (accepted) {
      const double x = setup.recommended[i];
      out.allocations[i] = x;
      out.payments[i] = bids[i] * x;
      out.payoffs[i] = payoff(theta, x, bids[i]);
    } else {
      out.allocations[i] = demands[i];
      out.payments[i] = p * demands[i];
      out.payoffs[i] = payoff(theta, demands[i], p);
    }
    out.total_allocation += out.allocations[i];
    out.total_payment += out.payments[i];
    out.total_payoff += out.payoffs[i];
  }
  return out;
}

}  // namespace revprice
