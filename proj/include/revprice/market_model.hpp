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

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "revprice/random.hpp"

namespace revprice {

/// Global market parameters: capacity, population and horizon.
///
/// Slots are addressed by a zero-based index everywhere in the library. The
/// one-based slot number h = index + 1 only appears where a rule is written in
/// terms of it (ThetaHighRule) and in the CSV output.
struct MarketConfig {
  double total_resource = 0.0;
  std::size_t num_users = 0;
  std::size_t num_slots = 0;

  /// Throws std::invalid_argument on a malformed market. A capacity of zero is
  /// accepted as the degenerate market in which the reverse stage never opens.
  void validate() const {
    if (!(total_resource >= 0.0) || !std::isfinite(total_resource))
      throw std::invalid_argument("MarketConfig: total_resource must be finite and >= 0");
    if (num_users < 1) throw std::invalid_argument("MarketConfig: num_users must be >= 1");
    if (num_slots < 1) throw std::invalid_argument("MarketConfig: num_slots must be >= 1");
  }
};

/// Willingness-to-pay statistics per user and slot: a mean and the half-width
/// of the bounded uncertainty around it. Stored row-major [user][slot].
class DemandModel {
 public:
  DemandModel(std::size_t num_users, std::size_t num_slots,
              std::vector<double> theta_mean, std::vector<double> theta_spread)
      : num_users_(num_users),
        num_slots_(num_slots),
        mean_(std::move(theta_mean)),
        spread_(std::move(theta_spread)) {
    if (num_users_ < 1 || num_slots_ < 1)
      throw std::invalid_argument("DemandModel: empty user or slot set");
    if (mean_.size() != num_users_ * num_slots_ || spread_.size() != mean_.size())
      throw std::invalid_argument("DemandModel: grid size does not match num_users * num_slots");
    for (std::size_t k = 0; k < mean_.size(); ++k) {
      if (!std::isfinite(mean_[k]) || !(spread_[k] >= 0.0) || !std::isfinite(spread_[k])) {
        std::ostringstream os;
        os << "DemandModel: invalid entry at user " << k / num_slots_ << ", slot "
           << k % num_slots_;
        throw std::invalid_argument(os.str());
      }
      if (mean_[k] - spread_[k] < 0.0) {
        std::ostringstream os;
        os << "DemandModel: negative willingness to pay reachable at user "
           << k / num_slots_ << ", slot " << k % num_slots_;
        throw std::invalid_argument(os.str());
      }
    }
  }

  std::size_t num_users() const noexcept { return num_users_; }
  std::size_t num_slots() const noexcept { return num_slots_; }

  double mean(std::size_t user, std::size_t slot) const { return mean_.at(index(user, slot)); }
  double spread(std::size_t user, std::size_t slot) const { return spread_.at(index(user, slot)); }
  double lower(std::size_t user, std::size_t slot) const { return mean(user, slot) - spread(user, slot); }
  double upper(std::size_t user, std::size_t slot) const { return mean(user, slot) + spread(user, slot); }

  void check_slot(std::size_t slot) const {
    if (slot >= num_slots_) {
      std::ostringstream os;
      os << "slot index " << slot << " out of range (num_slots = " << num_slots_ << ")";
      throw std::out_of_range(os.str());
    }
  }

 private:
  std::size_t index(std::size_t user, std::size_t slot) const {
    if (user >= num_users_) throw std::out_of_range("DemandModel: user index out of range");
    check_slot(slot);
    return user * num_slots_ + slot;
  }

  std::size_t num_users_;
  std::size_t num_slots_;
  std::vector<double> mean_;
  std::vector<double> spread_;
};

/// Realized willingness to pay of every user for one slot.
struct DemandRealization {
  std::vector<double> theta;
};

/// Upper support bound as an affine function of the one-based slot number:
/// hi(h) = slope * h + intercept. A constant bound has slope 0.
struct ThetaHighRule {
  double slope = 0.0;
  double intercept = 0.0;

  static ThetaHighRule constant(double c) { return {0.0, c}; }
  static ThetaHighRule linear(double a, double b) { return {a, b}; }

  double at_slot_number(std::size_t h) const { return slope * static_cast<double>(h) + intercept; }
  bool is_constant() const noexcept { return slope == 0.0; }

  friend bool operator==(const ThetaHighRule&, const ThetaHighRule&) = default;
};

/// User payoff theta * ln(1 + quantity) - unit_price * quantity.
inline double payoff(double theta, double quantity, double unit_price) {
  if (!(theta >= 0.0) || !(quantity >= 0.0) || !(unit_price >= 0.0))
    throw std::domain_error("payoff: theta, quantity and unit_price must be >= 0");
  return theta * std::log1p(quantity) - unit_price * quantity;
}

/// Draws each user's willingness to pay independently and uniformly on
/// [mean - spread, mean + spread] for the given slot.
template <FullRangeEngine G>
DemandRealization sample_demand(const DemandModel& model, std::size_t slot, G& rng) {
  model.check_slot(slot);
  DemandRealization out;
  out.theta.reserve(model.num_users());
  for (std::size_t i = 0; i < model.num_users(); ++i)
    out.theta.push_back(uniform_between(rng, model.lower(i, slot), model.upper(i, slot)));
  return out;
}

/// Identical users whose willingness to pay is uniform on [lo, hi(h)] in slot h.
inline DemandModel uniform_demand_model(double lo, const ThetaHighRule& hi_rule,
                                        std::size_t num_users, std::size_t num_slots) {
  if (!(lo >= 0.0) || !std::isfinite(lo))
    throw std::invalid_argument("uniform_demand_model: lower bound must be finite and >= 0");
  if (num_users < 1 || num_slots < 1)
    throw std::invalid_argument("uniform_demand_model: empty user or slot set");

  std::vector<double> mean(num_users * num_slots);
  std::vector<double> spread(num_users * num_slots);
  for (std::size_t h = 0; h < num_slots; ++h) {
    const double hi = hi_rule.at_slot_number(h + 1);
    if (!(hi >= lo) || !std::isfinite(hi)) {
      std::ostringstream os;
      os << "uniform_demand_model: upper bound " << hi << " below lower bound " << lo
         << " at slot " << h + 1;
      throw std::invalid_argument(os.str());
    }
    for (std::size_t i = 0; i < num_users; ++i) {
      mean[i * num_slots + h] = 0.5 * (lo + hi);
      spread[i * num_slots + h] = 0.5 * (hi - lo);
    }
  }
  return DemandModel(num_users, num_slots, std::move(mean), std::move(spread));
}

inline DemandModel uniform_demand_model(double lo, double hi, std::size_t num_users,
                                        std::size_t num_slots) {
  return uniform_demand_model(lo, ThetaHighRule::constant(hi), num_users, num_slots);
}

}  // namespace revprice
