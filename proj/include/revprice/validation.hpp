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
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "revprice/forward_pricing.hpp"
#include "revprice/market_model.hpp"
#include "revprice/montecarlo.hpp"
#include "revprice/random.hpp"
#include "revprice/reverse_pricing.hpp"
#include "revprice/scenario.hpp"

namespace revprice {

/// Outcome of one oracle check. `margin` is signed so that >= 0 means pass;
/// its unit depends on the check and is named in `detail`.
struct CheckResult {
  std::string name;
  bool passed = false;
  double margin = 0.0;
  std::string detail;
};

/// (theta, recommended_x, demand_s, posted_price, min_price) -> bid.
using BidRule = std::function<double(double, double, double, double, double)>;

struct ValidationOptions {
  std::size_t bid_instances = 200;
  std::size_t demand_instances = 200;
  std::size_t grid_points = 10000;
  std::size_t threshold_draws = 100000;
  double optimality_tolerance = 1e-9;
  double saturation_tolerance = 1e-9;
};

namespace detail {

/// A participant state drawn from the scenario's own demand model.
struct BidState {
  double theta, x, s, p, p_min;
};

inline std::vector<BidState> sample_bid_states(const ScenarioConfig& cfg, std::size_t count,
                                               std::uint64_t seed) {
  const auto market = cfg.market();
  const auto model = cfg.demand_model();
  auto rng = make_stream(mix64(seed ^ 0xb1d5ULL));
  std::vector<BidState> out;
  std::size_t attempts = 0;
  while (out.size() < count && attempts++ < 50 * count) {
    const std::size_t slot = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cfg.num_slots));
    const double p = optimal_forward_price(model, slot, market);
    const auto demand = sample_demand(model, slot, rng);
    const auto fwd = forward_outcome(demand, p, market);
    const auto x = recommend_allocations(fwd.demands, market);
    const std::size_t i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cfg.num_users));
    if (!(x[i] > 0.0)) continue;
    const double v = indifference_price(demand.theta[i], x[i], fwd.demands[i], p);
    const double p_min = std::min(uniform01(rng) * v, std::nextafter(p, 0.0));
    out.push_back({demand.theta[i], x[i], fwd.demands[i], p, p_min});
  }
  return out;
}

}  // namespace detail

/// The rule's bid must do at least as well as every point of a uniform grid
/// over [p_min, p] on the expected-payoff objective.
inline CheckResult check_bid_optimality(const ScenarioConfig& cfg, const BidRule& rule,
                                        const ValidationOptions& opt = {}) {
  CheckResult r{"bid_optimality", true, std::numeric_limits<double>::infinity(), {}};
  const auto states = detail::sample_bid_states(cfg, opt.bid_instances, cfg.master_seed);
  for (const auto& st : states) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < opt.grid_points; ++k) {
      const double b = st.p_min + (st.p - st.p_min) * static_cast<double>(k) /
                                      static_cast<double>(opt.grid_points - 1);
      best = std::max(best, expected_bid_payoff(std::min(b, st.p), st.theta, st.x, st.s, st.p, st.p_min));
    }
    const double bid = rule(st.theta, st.x, st.s, st.p, st.p_min);
    if (!(bid >= st.p_min && bid <= st.p)) {
      r.margin = -std::numeric_limits<double>::infinity();
      break;
    }
    r.margin = std::min(r.margin, expected_bid_payoff(bid, st.theta, st.x, st.s, st.p, st.p_min) - best);
  }
  r.passed = !states.empty() && r.margin >= -opt.optimality_tolerance;
  std::ostringstream os;
  os << states.size() << " participant states, " << opt.grid_points
     << "-point grid; margin = min(expected payoff at bid - grid max)";
  r.detail = os.str();
  return r;
}

/// The closed-form demand must do at least as well as a dense grid on [0, 4s + 4].
inline CheckResult check_demand_optimality(const ScenarioConfig& cfg, const ValidationOptions& opt = {}) {
  CheckResult r{"demand_optimality", true, std::numeric_limits<double>::infinity(), {}};
  const auto market = cfg.market();
  const auto model = cfg.demand_model();
  auto rng = make_stream(mix64(cfg.master_seed ^ 0xde3aULL));
  for (std::size_t n = 0; n < opt.demand_instances; ++n) {
    const std::size_t slot = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cfg.num_slots));
    const double p = optimal_forward_price(model, slot, market);
    const std::size_t i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cfg.num_users));
    const double theta = uniform_between(rng, model.lower(i, slot), model.upper(i, slot));
    const double s = user_demand(theta, p);
    const double hi = 4.0 * s + 4.0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < opt.grid_points; ++k)
      best = std::max(best, payoff(theta, hi * static_cast<double>(k) / static_cast<double>(opt.grid_points - 1), p));
    r.margin = std::min(r.margin, payoff(theta, s, p) - best);
  }
  r.passed = r.margin >= -opt.optimality_tolerance;
  r.detail = std::to_string(opt.demand_instances) + " users; margin = min(payoff at demand - grid max)";
  return r;
}

/// Acceptance frequency of fixed bids through the settlement path, against
/// (b - p_min) / (p - p_min). Margin is the smallest slack to 3 standard errors.
inline CheckResult check_acceptance_law(std::uint64_t seed, const ValidationOptions& opt = {}) {
  CheckResult r{"acceptance_law", true, std::numeric_limits<double>::infinity(), {}};
  const MarketConfig market{4.0, 1, 1};
  const DemandRealization demand{{3.0}};
  const std::vector<double> s{2.0};
  ReverseSetup setup;
  setup.posted_price = 1.0;
  setup.min_price = 0.2;
  setup.recommended = recommend_allocations(s, market);
  setup.residual = residual_resource(2.0, market);
  setup.active = true;

  std::ostringstream os;
  for (double bid : {0.3, 0.6, 0.9}) {
    auto rng = make_stream(derive_seed(seed, 0xacce, static_cast<std::uint64_t>(bid * 10)));
    const std::vector<double> bids{bid};
    std::size_t hits = 0;
    for (std::size_t k = 0; k < opt.threshold_draws; ++k)
      hits += settle(demand, setup, s, bids, rng).accepted[0] ? 1 : 0;
    const double n = static_cast<double>(opt.threshold_draws);
    const double prob = acceptance_probability(bid, setup.min_price, setup.posted_price);
    const double freq = static_cast<double>(hits) / n;
    const double se = std::sqrt(prob * (1.0 - prob) / n);
    r.margin = std::min(r.margin, 3.0 * se - std::abs(freq - prob));
    os << "b=" << bid << " freq=" << freq << " law=" << prob << "; ";
  }
  r.passed = r.margin >= 0.0;
  os << opt.threshold_draws << " draws each";
  r.detail = os.str();
  return r;
}

/// Worst-case demand at the optimal forward price must equal Q in every slot.
inline CheckResult check_price_saturation(const ScenarioConfig& cfg, const ValidationOptions& opt = {}) {
  CheckResult r{"price_saturation", true, std::numeric_limits<double>::infinity(), {}};
  const auto market = cfg.market();
  const auto model = cfg.demand_model();
  for (std::size_t h = 0; h < cfg.num_slots; ++h) {
    const double p = optimal_forward_price(model, h, market);
    const double gap = std::abs(worst_case_aggregate_demand(model, h, p) - market.total_resource);
    r.margin = std::min(r.margin, opt.saturation_tolerance - gap);
  }
  r.passed = r.margin >= 0.0;
  r.detail = "margin = tolerance - max |worst-case demand - Q|";
  return r;
}

/// Runs the horizon at the revenue-safe floor and checks, per accepted trade and
/// per realization, that neither side loses against forward pricing alone and
/// that no slot is over-allocated.
inline std::vector<CheckResult> check_settlement_invariants(const ScenarioConfig& cfg) {
  const auto market = cfg.market();
  const auto model = cfg.demand_model();
  const Scheme reverse[] = {Scheme::reverse_on_forward};
  const auto rows = run_horizon(market, model, reverse, PminPolicy::lemma1(), cfg.run_options());

  std::size_t trade_losses = 0, paired = 0, over = 0;
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& m : rows) {
    trade_losses += m.revenue_loss_trades + m.payoff_loss_trades;
    paired += m.paired_dominance_violations;
    over += m.capacity_violations;
    slack = std::min(slack, market.total_resource - m.max_total_allocation);
  }
  auto negated = [](std::size_t n) { return n == 0 ? 0.0 : -static_cast<double>(n); };
  std::vector<CheckResult> out;
  out.push_back({"trade_dominance", trade_losses == 0, negated(trade_losses),
                 "accepted trades losing revenue or payoff vs forward contract (negated count)"});
  out.push_back({"paired_dominance", paired == 0, negated(paired),
                 "realizations where reverse trails forward (negated count)"});
  out.push_back({"capacity", over == 0, slack, "margin = Q - max total allocation"});
  return out;
}

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
};

inline ValidationReport run_validation(const ScenarioConfig& cfg, const BidRule& rule,
                                       const ValidationOptions& opt = {}) {
  ValidationReport rep;
  rep.checks.push_back(check_bid_optimality(cfg, rule, opt));
  rep.checks.push_back(check_demand_optimality(cfg, opt));
  rep.checks.push_back(check_acceptance_law(cfg.master_seed, opt));
  rep.checks.push_back(check_price_saturation(cfg, opt));
  for (auto& c : check_settlement_invariants(cfg)) rep.checks.push_back(std::move(c));
  return rep;
}

inline ValidationReport run_validation(const ScenarioConfig& cfg, const ValidationOptions& opt = {}) {
  return run_validation(cfg, BidRule(optimal_bid), opt);
}

inline void print_report(std::ostream& out, const ValidationReport& rep) {
  for (const auto& c : rep.checks) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.name << "  margin=" << c.margin << "  ("
        << c.detail << ")\n";
  }
  out << (rep.passed() ? "all checks passed" : "validation FAILED") << '\n';
}

}  // namespace revprice
