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
#include <exception>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <vector>

#include "revprice/forward_pricing.hpp"
#include "revprice/market_model.hpp"
#include "revprice/random.hpp"
#include "revprice/reverse_pricing.hpp"

namespace revprice {

enum class Scheme { forward_only, reverse_on_forward };

inline constexpr std::string_view scheme_name(Scheme s) noexcept {
  return s == Scheme::forward_only ? "forward_only" : "reverse_on_forward";
}

inline constexpr Scheme kBothSchemes[] = {Scheme::forward_only, Scheme::reverse_on_forward};

/// Probability that a bid clears a threshold uniform on [min_price, posted_price].
inline double acceptance_probability(double bid, double min_price, double posted_price) {
  if (!(min_price < posted_price))
    throw std::domain_error("acceptance_probability: empty threshold interval");
  return std::clamp((bid - min_price) / (posted_price - min_price), 0.0, 1.0);
}

/// One realization of one slot, played through every stage of the chosen scheme.
struct GameTrace {
  DemandRealization demand;
  ForwardOutcome forward;
  /// Present for the reverse scheme only.
  std::optional<ReverseSetup> setup;
  /// Present when the reverse stage was active.
  std::optional<SettlementResult> settlement;

  double total_allocation() const {
    return settlement ? settlement->total_allocation : forward.total_demand;
  }
  double total_payment() const {
    if (settlement) return settlement->total_payment;
    double sum = 0.0;
    for (double v : forward.payments) sum += v;
    return sum;
  }
  double total_payoff() const {
    if (settlement) return settlement->total_payoff;
    double sum = 0.0;
    for (double v : forward.payoffs) sum += v;
    return sum;
  }
};

/// Plays a slot: draw demand, Stage II at the posted price and, for the
/// reverse scheme, Stages III and IV. Demand is drawn before the threshold,
/// so two schemes fed identically seeded streams face the same demand.
template <FullRangeEngine G>
GameTrace play_slot(const MarketConfig& config, const DemandModel& model, std::size_t slot,
                    double posted_price, Scheme scheme, const PminPolicy& policy, G& rng) {
  GameTrace trace;
  trace.demand = sample_demand(model, slot, rng);
  trace.forward = forward_outcome(trace.demand, posted_price, config);
  if (scheme == Scheme::forward_only) return trace;

  trace.setup = reverse_setup(trace.forward, policy, config);
  if (!trace.setup->active) return trace;
  const auto participants = participation_set(trace.demand, *trace.setup, trace.forward.demands);
  const auto bids = optimal_bids(trace.demand, *trace.setup, trace.forward.demands, participants);
  trace.settlement = settle(trace.demand, *trace.setup, trace.forward.demands, bids, rng);
  return trace;
}

/// Monte Carlo averages for one (slot, scheme).
struct SlotMetrics {
  std::size_t slot = 0;
  Scheme scheme = Scheme::forward_only;
  double avg_demand = 0.0;
  double avg_revenue = 0.0;
  double avg_payoff = 0.0;
  double avg_utilization = 0.0;
  std::size_t num_realizations = 0;
  bool admission_warning = false;

  double posted_price = 0.0;
  double se_demand = 0.0;
  double se_revenue = 0.0;
  double se_payoff = 0.0;
  double avg_residual = 0.0;
  double avg_participants = 0.0;
  double avg_accepted = 0.0;
  /// Share of realizations in which nobody names a price, including those
  /// where the reverse stage never opened.
  double empty_participation_fraction = 0.0;
  double active_fraction = 0.0;
  double max_total_allocation = 0.0;

  /// Realizations whose total allocation exceeded Q.
  std::size_t capacity_violations = 0;
  /// Accepted trades paying less than the forward contract they replace.
  std::size_t revenue_loss_trades = 0;
  /// Accepted trades leaving the user worse off than the forward contract.
  std::size_t payoff_loss_trades = 0;
  /// Realizations where the reverse scheme falls behind forward pricing on
  /// the same demand draw in revenue, total payoff or total allocation.
  std::size_t paired_dominance_violations = 0;
};

struct RunOptions {
  std::size_t num_realizations = 1000;
  std::uint64_t seed = 0;
  /// Worker threads for realizations. Results do not depend on this value.
  unsigned threads = 1;
};

namespace detail {

struct RealizationSummary {
  double demand = 0.0;
  double revenue = 0.0;
  double payoff = 0.0;
  double residual = 0.0;
  std::size_t participants = 0;
  std::size_t accepted = 0;
  std::size_t revenue_loss = 0;
  std::size_t payoff_loss = 0;
  bool active = false;
  bool dominance_ok = true;
};

template <class F>
void parallel_for_index(std::size_t n, unsigned threads, F&& body) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < n; k += workers) body(k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline RealizationSummary summarize(const GameTrace& t, const MarketConfig& config) {
  RealizationSummary s;
  s.demand = t.total_allocation();
  s.revenue = t.total_payment();
  s.payoff = t.total_payoff();
  s.residual = residual_resource(t.forward.total_demand, config);
  if (!t.settlement) return s;

  s.active = true;
  const auto& st = *t.settlement;
  for (std::size_t i = 0; i < st.accepted.size(); ++i) {
    s.participants += st.participants[i] ? 1 : 0;
    if (!st.accepted[i]) continue;
    ++s.accepted;
    if (st.payments[i] < t.forward.payments[i]) ++s.revenue_loss;
    if (st.payoffs[i] < t.forward.payoffs[i]) ++s.payoff_loss;
  }
  double forward_revenue = 0.0, forward_payoff = 0.0;
  for (std::size_t i = 0; i < t.forward.payments.size(); ++i) {
    forward_revenue += t.forward.payments[i];
    forward_payoff += t.forward.payoffs[i];
  }
  s.dominance_ok = s.revenue >= forward_revenue && s.payoff >= forward_payoff &&
                   s.demand >= t.forward.total_demand;
  return s;
}

inline double mean_of(std::span<const RealizationSummary> rows, double RealizationSummary::*field) {
  double sum = 0.0;
  for (const auto& r : rows) sum += r.*field;
  return sum / static_cast<double>(rows.size());
}

inline double stderr_of(std::span<const RealizationSummary> rows, double RealizationSummary::*field,
                        double mean) {
  if (rows.size() < 2) return 0.0;
  double ss = 0.0;
  for (const auto& r : rows) ss += (r.*field - mean) * (r.*field - mean);
  const double n = static_cast<double>(rows.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace detail

/// Averages `options.num_realizations` independent plays of one slot. The
/// stream of realization k is seeded from (seed, slot, k) alone, so runs are
/// bit-identical for any thread count and paired across schemes.
inline SlotMetrics run_slot(const MarketConfig& config, const DemandModel& model, std::size_t slot,
                            Scheme scheme, const PminPolicy& policy, const RunOptions& options) {
  config.validate();
  model.check_slot(slot);
  if (options.num_realizations < 1) throw std::invalid_argument("run_slot: num_realizations must be >= 1");

  const double price = optimal_forward_price(model, slot, config);
  std::vector<detail::RealizationSummary> rows(options.num_realizations);
  detail::parallel_for_index(rows.size(), options.threads, [&](std::size_t k) {
    auto rng = make_stream(derive_seed(options.seed, slot, k));
    rows[k] = detail::summarize(play_slot(config, model, slot, price, scheme, policy, rng), config);
  });

  SlotMetrics m;
  m.slot = slot;
  m.scheme = scheme;
  m.num_realizations = rows.size();
  m.posted_price = price;
  m.admission_warning = !admission_condition_holds(model, slot, config);

  using S = detail::RealizationSummary;
  m.avg_demand = detail::mean_of(rows, &S::demand);
  m.avg_revenue = detail::mean_of(rows, &S::revenue);
  m.avg_payoff = detail::mean_of(rows, &S::payoff);
  m.avg_residual = detail::mean_of(rows, &S::residual);
  m.se_demand = detail::stderr_of(rows, &S::demand, m.avg_demand);
  m.se_revenue = detail::stderr_of(rows, &S::revenue, m.avg_revenue);
  m.se_payoff = detail::stderr_of(rows, &S::payoff, m.avg_payoff);
  m.avg_utilization = config.total_resource > 0.0 ? m.avg_demand / config.total_resource : 0.0;

  std::size_t participants = 0, accepted = 0, active = 0, empty = 0;
  for (const auto& r : rows) {
    participants += r.participants;
    accepted += r.accepted;
    active += r.active ? 1 : 0;
    empty += r.participants == 0 ? 1 : 0;
    m.revenue_loss_trades += r.revenue_loss;
    m.payoff_loss_trades += r.payoff_loss;
    m.paired_dominance_violations += r.dominance_ok ? 0 : 1;
    m.capacity_violations += r.demand > config.total_resource ? 1 : 0;
    m.max_total_allocation = std::max(m.max_total_allocation, r.demand);
  }
  const double n = static_cast<double>(rows.size());
  m.avg_participants = static_cast<double>(participants) / n;
  m.avg_accepted = static_cast<double>(accepted) / n;
  m.active_fraction = static_cast<double>(active) / n;
  m.empty_participation_fraction = static_cast<double>(empty) / n;
  return m;
}

/// One row per (slot, scheme), slots in order and schemes in the given order.
inline std::vector<SlotMetrics> run_horizon(const MarketConfig& config, const DemandModel& model,
                                            std::span<const Scheme> schemes, const PminPolicy& policy,
                                            const RunOptions& options) {
  std::vector<SlotMetrics> out;
  out.reserve(model.num_slots() * schemes.size());
  for (std::size_t h = 0; h < model.num_slots(); ++h)
    for (Scheme s : schemes) out.push_back(run_slot(config, model, h, s, policy, options));
  return out;
}

struct SweepPoint {
  double ratio = 0.0;
  SlotMetrics forward;
  SlotMetrics reverse;
};

/// Reverse scheme at p_min = ratio * p* for each ratio, against the forward
/// baseline. Every ratio sees the same demand and threshold draws.
inline std::vector<SweepPoint> run_pmin_sweep(const MarketConfig& config, const DemandModel& model,
                                              std::size_t slot, std::span<const double> ratios,
                                              const RunOptions& options) {
  for (double r : ratios)
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("run_pmin_sweep: ratios must lie in [0, 1]");
  const SlotMetrics baseline =
      run_slot(config, model, slot, Scheme::forward_only, PminPolicy::lemma1(), options);
  std::vector<SweepPoint> out;
  out.reserve(ratios.size());
  for (double r : ratios) {
    out.push_back({r, baseline,
                   run_slot(config, model, slot, Scheme::reverse_on_forward, PminPolicy::ratio(r), options)});
  }
  return out;
}

}  // namespace revprice
