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
#include <limits>
#include <stdexcept>
#include <vector>

#include "revprice/market_model.hpp"

namespace revprice {

/// Stage I/II outcome of one slot: the posted price and every user's demand
/// response to it.
struct ForwardOutcome {
  double posted_price = 0.0;
  std::vector<double> demands;
  std::vector<double> payments;
  std::vector<double> payoffs;
  double total_demand = 0.0;
};

/// Lowest posted price that keeps worst-case aggregate demand within capacity:
/// sum_i (mean_i + spread_i) / (Q + I).
inline double optimal_forward_price(const DemandModel& model, std::size_t slot,
                                    const MarketConfig& config) {
  model.check_slot(slot);
  if (model.num_users() != config.num_users)
    throw std::invalid_argument("optimal_forward_price: model and config disagree on num_users");
  double top = 0.0;
  for (std::size_t i = 0; i < model.num_users(); ++i) top += model.upper(i, slot);
  if (!(top > 0.0))
    throw std::domain_error("optimal_forward_price: willingness to pay is identically zero");
  return top / (config.total_resource + static_cast<double>(config.num_users));
}

/// Worst-case aggregate demand sum_i ((mean_i + spread_i) / p - 1), without the
/// per-user clamp. Equals Q at the optimal forward price.
inline double worst_case_aggregate_demand(const DemandModel& model, std::size_t slot,
                                          double unit_price) {
  model.check_slot(slot);
  if (!(unit_price > 0.0))
    throw std::domain_error("worst_case_aggregate_demand: unit_price must be > 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < model.num_users(); ++i)
    sum += model.upper(i, slot) / unit_price - 1.0;
  return sum;
}

struct AdmissionCheck {
  bool holds = false;
  /// The weakest user's lowest willingness to pay is zero; no positive price
  /// admits that user in every realization.
  bool choke = false;
  /// Capacity the market would need: sum_i (mean_i + spread_i) / min_i(mean_i - spread_i) - I.
  double required_resource = std::numeric_limits<double>::infinity();
};

/// Whether every user buys a positive amount at the optimal forward price for
/// every realization, i.e. Q > sum_i (mean_i + spread_i) / min_i (mean_i - spread_i) - I.
/// Users need not be pre-sorted; the minimum plays the role of the last user.
inline AdmissionCheck admission_condition(const DemandModel& model, std::size_t slot,
                                          const MarketConfig& config) {
  model.check_slot(slot);
  double top = 0.0;
  double weakest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < model.num_users(); ++i) {
    top += model.upper(i, slot);
    weakest = std::min(weakest, model.lower(i, slot));
  }
  AdmissionCheck out;
  if (!(weakest > 0.0)) {
    out.choke = true;
    return out;
  }
  out.required_resource = top / weakest - static_cast<double>(config.num_users);
  out.holds = config.total_resource > out.required_resource;
  return out;
}

inline bool admission_condition_holds(const DemandModel& model, std::size_t slot,
                                      const MarketConfig& config) {
  return admission_condition(model, slot, config).holds;
}

/// Payoff-maximizing quantity at a posted price: (theta / p - 1)^+.
inline double user_demand(double theta, double unit_price) {
  if (!(unit_price > 0.0)) throw std::domain_error("user_demand: unit_price must be > 0");
  if (!(theta >= 0.0)) throw std::domain_error("user_demand: theta must be >= 0");
  return std::max(theta / unit_price - 1.0, 0.0);
}

inline ForwardOutcome forward_outcome(const DemandRealization& realization, double posted_price,
                                      const MarketConfig& config) {
  if (realization.theta.size() != config.num_users)
    throw std::invalid_argument("forward_outcome: realization size differs from num_users");
  ForwardOutcome out;
  out.posted_price = posted_price;
  const std::size_t n = realization.theta.size();
  out.demands.resize(n);
  out.payments.resize(n);
  out.payoffs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = realization.theta[i];
    const double s = user_demand(theta, posted_price);
    out.demands[i] = s;
    out.payments[i] = posted_price * s;
    out.payoffs[i] = payoff(theta, s, posted_price);
    out.total_demand += s;
  }
  return out;
}

}  // namespace revprice
