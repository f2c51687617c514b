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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any selected criterion fails.
//
//   revprice_acceptance            # all criteria
//   revprice_acceptance 2 4        # selected criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "revprice/revprice.hpp"

namespace {

using namespace revprice;

constexpr std::uint64_t kSeed = 20150601;
constexpr std::size_t kRealizations = 1000;
constexpr std::size_t kSweepSlot = 4;  // slot 5
const MarketConfig kMarket{1000.0, 100, 10};

DemandModel reference_model() { return uniform_demand_model(1.0, ThetaHighRule::linear(2.0, 0.0), 100, 10); }

std::vector<double> sweep_ratios() {
  std::vector<double> r;
  for (int k = 0; k <= 10; ++k) r.push_back(k / 10.0);
  return r;
}

/// Criteria 2, 3, 7 and 8 share the horizon run; 4, 5 and 7 share the sweep.
const std::vector<SlotMetrics>& horizon() {
  static const auto rows =
      run_horizon(kMarket, reference_model(), kBothSchemes, PminPolicy::lemma1(), {kRealizations, kSeed, 1});
  return rows;
}

const std::vector<SweepPoint>& sweep() {
  static const auto pts = [] {
    const auto ratios = sweep_ratios();
    return run_pmin_sweep(kMarket, reference_model(), kSweepSlot, ratios, {kRealizations, kSeed, 1});
  }();
  return pts;
}

struct Log {
  std::ostringstream os;
  bool ok = true;
  void check(bool cond, const std::string& what) {
    os << "      " << (cond ? "ok   " : "FAIL ") << what << '\n';
    ok = ok && cond;
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1. Closed forms against brute-force maximization.
bool closed_form_vs_oracle(Log& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto model = reference_model();
  auto rng = make_stream(derive_seed(kSeed, 0xc1, 0));
  double worst_bid = 0.0, worst_demand = 0.0;
  std::size_t bids = 0, demands = 0;
  while (bids < 1000) {
    const auto h = static_cast<std::size_t>(uniform01(rng) * 10);
    const double p = optimal_forward_price(model, h, kMarket);
    const auto d = sample_demand(model, h, rng);
    const auto fwd = forward_outcome(d, p, kMarket);
    const auto x = recommend_allocations(fwd.demands, kMarket);
    const auto i = static_cast<std::size_t>(uniform01(rng) * 100);

    if (demands < 1000) {
      worst_demand = std::max(worst_demand, std::abs(user_demand(d.theta[i], p) - oracle::demand_by_search(d.theta[i], p)));
      ++demands;
    }
    if (!(x[i] > 0.0)) continue;
    const double v = indifference_price(d.theta[i], x[i], fwd.demands[i], p);
    const double p_min = std::min(uniform01(rng) * v, std::nextafter(p, 0.0));
    const double closed = optimal_bid(d.theta[i], x[i], fwd.demands[i], p, p_min);
    const double searched = oracle::bid_by_search(d.theta[i], x[i], fwd.demands[i], p, p_min);
    worst_bid = std::max(worst_bid, std::abs(closed - searched));
    ++bids;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log.check(worst_bid <= 1e-6, fmt("optimal_bid vs 1e4-grid search: max |diff| = %.3g over %.0f instances (tol 1e-6)", worst_bid, double(bids)));
  log.check(worst_demand <= 1e-6, fmt("user_demand vs 1e4-grid search: max |diff| = %.3g over %.0f instances (tol 1e-6)", worst_demand, double(demands)));
  log.check(secs < 5.0, fmt("runtime %.3f s (limit 5 s)", secs));
  return log.ok;
}

// 2. Triple win at every slot.
bool triple_win(Log& log) {
  const auto& rows = horizon();
  for (std::size_t h = 0; h < 10; ++h) {
    const auto& f = rows[2 * h];
    const auto& r = rows[2 * h + 1];
    const bool strict = r.avg_residual > 0.0 && r.avg_participants > 0.0;
    auto cmp = [&](double a, double b) { return strict ? a > b : a >= b; };
    const bool ok = cmp(r.avg_revenue, f.avg_revenue) && cmp(r.avg_payoff, f.avg_payoff) &&
                    cmp(r.avg_utilization, f.avg_utilization);
    log.check(ok, fmt("slot %.0f: revenue %.2f vs %.2f, ", double(h + 1), r.avg_revenue, f.avg_revenue) +
                      fmt("payoff %.2f vs %.2f, utilization %.4f vs %.4f", r.avg_payoff, f.avg_payoff,
                          r.avg_utilization, f.avg_utilization) +
                      (strict ? " (strict)" : ""));
  }
  return log.ok;
}

// 3. Per-trade dominance over every user-realization pair.
bool per_realization_dominance(Log& log) {
  const auto model = reference_model();
  std::size_t pairs = 0, accepted = 0, revenue_loss = 0, payoff_loss = 0;
  for (std::size_t h = 0; h < 10; ++h) {
    const double p = optimal_forward_price(model, h, kMarket);
    for (std::size_t k = 0; k < kRealizations; ++k) {
      auto rng = make_stream(derive_seed(kSeed, h, k));
      const auto t = play_slot(kMarket, model, h, p, Scheme::reverse_on_forward, PminPolicy::lemma1(), rng);
      pairs += t.demand.theta.size();
      if (!t.settlement) continue;
      const auto& st = *t.settlement;
      for (std::size_t i = 0; i < st.accepted.size(); ++i) {
        if (!st.accepted[i]) continue;
        ++accepted;
        revenue_loss += st.payments[i] < t.forward.payments[i];
        payoff_loss += st.payoffs[i] < t.forward.payoffs[i];
      }
    }
  }
  log.check(pairs == 1000000, fmt("user-realization pairs examined: %.0f", double(pairs)));
  log.check(revenue_loss == 0, fmt("accepted trades paying less than forward: %.0f of %.0f", double(revenue_loss), double(accepted)));
  log.check(payoff_loss == 0, fmt("accepted trades with lower user payoff: %.0f of %.0f", double(payoff_loss), double(accepted)));
  return log.ok;
}

// 4. Revenue shape of the floor-price sweep.
bool sweep_reproduction(Log& log) {
  const auto& pts = sweep();
  auto at = [&](double r) -> const SweepPoint& {
    return *std::find_if(pts.begin(), pts.end(), [&](const auto& p) { return std::abs(p.ratio - r) < 1e-9; });
  };
  const double base = pts.front().forward.avg_revenue;
  for (double r : {0.1, 0.2}) {
    const auto& p = at(r);
    log.check(p.reverse.avg_revenue < base,
              fmt("ratio %.1f: reverse revenue %.3f < forward %.3f (gain %+.2f%%)", r, p.reverse.avg_revenue, base,
                  100 * (p.reverse.avg_revenue / base - 1)));
  }
  for (double r : {0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
    const auto& p = at(r);
    log.check(p.reverse.avg_revenue > base,
              fmt("ratio %.1f: reverse revenue %.3f > forward %.3f (gain %+.2f%%)", r, p.reverse.avg_revenue, base,
                  100 * (p.reverse.avg_revenue / base - 1)));
  }
  const auto best = std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.reverse.avg_revenue < b.reverse.avg_revenue;
  });
  const double gain = best->reverse.avg_revenue / base - 1;
  log.check(best->ratio >= 0.6 - 1e-9 && best->ratio <= 0.8 + 1e-9,
            fmt("revenue-maximizing ratio %.1f in [0.6, 0.8]", best->ratio));
  log.check(gain >= 0.08 && gain <= 0.20, fmt("peak revenue gain %.2f%% in [8%%, 20%%]", 100 * gain));
  for (const auto& p : pts) {
    if (p.ratio < 0.9 - 1e-9) continue;
    log.check(p.reverse.empty_participation_fraction >= 0.95,
              fmt("ratio %.1f: participant set empty in %.1f%% of realizations (need >= 95%%; mean %.2f participants)",
                  p.ratio, 100 * p.reverse.empty_participation_fraction, p.reverse.avg_participants));
    const auto& f = p.forward;
    const auto& r = p.reverse;
    const bool same = std::abs(r.avg_demand - f.avg_demand) <= 3 * f.se_demand &&
                      std::abs(r.avg_revenue - f.avg_revenue) <= 3 * f.se_revenue &&
                      std::abs(r.avg_payoff - f.avg_payoff) <= 3 * f.se_payoff;
    log.check(same, fmt("ratio %.1f: reverse within 3 s.e. of forward (d demand %.3f, d revenue %.3f, d payoff %.3f)",
                        p.ratio, r.avg_demand - f.avg_demand, r.avg_revenue - f.avg_revenue,
                        r.avg_payoff - f.avg_payoff));
  }
  return log.ok;
}

// 5. Demand and payoff fall as the floor rises.
bool sweep_monotonicity(Log& log) {
  const auto& pts = sweep();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const auto& a = pts[k].reverse;
    const auto& b = pts[k + 1].reverse;
    const double tol_d = 2 * std::max(a.se_demand, b.se_demand);
    const double tol_u = 2 * std::max(a.se_payoff, b.se_payoff);
    log.check(b.avg_demand <= a.avg_demand + tol_d && b.avg_payoff <= a.avg_payoff + tol_u,
              fmt("ratio %.1f -> %.1f: ", pts[k].ratio, pts[k + 1].ratio) +
                  fmt("demand %.3f -> %.3f, payoff %.3f -> %.3f", a.avg_demand, b.avg_demand, a.avg_payoff,
                      b.avg_payoff));
  }
  return log.ok;
}

// 6. Acceptance frequency of a fixed bid through the settlement path.
bool acceptance_law(Log& log) {
  const double p = optimal_forward_price(reference_model(), kSweepSlot, kMarket);
  const double p_min = 0.5 * p;
  const MarketConfig market{4.0, 1, 1};
  const DemandRealization d{{3.0 * p}};
  const std::vector<double> s{2.0};
  ReverseSetup setup;
  setup.posted_price = p;
  setup.min_price = p_min;
  setup.recommended = recommend_allocations(s, market);
  setup.residual = 2.0;
  setup.active = true;
  const std::size_t n = 100000;
  for (double frac : {0.1, 0.5, 0.85}) {
    const double bid = p_min + frac * (p - p_min);
    auto rng = make_stream(derive_seed(kSeed, 0xc6, static_cast<std::uint64_t>(frac * 100)));
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) hits += settle(d, setup, s, std::vector<double>{bid}, rng).accepted[0];
    const double prob = acceptance_probability(bid, p_min, p);
    const double freq = static_cast<double>(hits) / static_cast<double>(n);
    const double se = std::sqrt(prob * (1 - prob) / static_cast<double>(n));
    log.check(std::abs(freq - prob) <= 3 * se,
              fmt("bid at %.2f of the interval: frequency %.5f vs law %.5f (3 s.e. = %.5f)", frac, freq, prob, 3 * se));
  }
  return log.ok;
}

// 7. Capacity is never exceeded; worst-case demand saturates it.
bool capacity_safety(Log& log) {
  std::size_t violations = 0;
  double max_alloc = 0;
  for (const auto& m : horizon()) {
    violations += m.capacity_violations;
    max_alloc = std::max(max_alloc, m.max_total_allocation);
  }
  for (const auto& p : sweep()) {
    violations += p.reverse.capacity_violations + p.forward.capacity_violations;
    max_alloc = std::max({max_alloc, p.reverse.max_total_allocation, p.forward.max_total_allocation});
  }
  log.check(violations == 0 && max_alloc <= kMarket.total_resource,
            fmt("over-allocated slot-realizations: %.0f; largest total allocation %.12g (Q = 1000)", double(violations), max_alloc));
  const auto model = reference_model();
  double worst = 0;
  for (std::size_t h = 0; h < 10; ++h) {
    const double p = optimal_forward_price(model, h, kMarket);
    DemandRealization top;
    for (std::size_t i = 0; i < 100; ++i) top.theta.push_back(model.upper(i, h));
    worst = std::max(worst, std::abs(forward_outcome(top, p, kMarket).total_demand - kMarket.total_resource));
  }
  log.check(worst <= 1e-9, fmt("worst-case demand at p*: max |total - Q| = %.3g (tol 1e-9)", worst));
  return log.ok;
}

// 8. Byte-identical CSV across repeats and thread counts.
bool determinism(Log& log) {
  auto csv = [](unsigned threads) {
    const auto rows = run_horizon(kMarket, reference_model(), kBothSchemes, PminPolicy::lemma1(),
                                  {kRealizations, kSeed, threads});
    std::ostringstream os;
    write_horizon_csv(os, rows);
    return os.str();
  };
  const auto a = csv(1), b = csv(1), c = csv(4);
  std::ostringstream ref;
  write_horizon_csv(ref, horizon());
  log.check(a == b, "repeat run, 1 thread: identical bytes");
  log.check(a == c, "4 threads vs 1 thread: identical bytes");
  log.check(a == ref.str(), "matches the criterion-2 table");
  return log.ok;
}

struct Criterion {
  int id;
  const char* title;
  std::function<bool(Log&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "closed-form bid and demand match brute-force maximization", closed_form_vs_oracle},
      {2, "triple win at every slot (revenue, payoff, utilization)", triple_win},
      {3, "per-realization dominance of every accepted trade", per_realization_dominance},
      {4, "floor-price sweep revenue shape at slot 5", sweep_reproduction},
      {5, "sweep demand and payoff nonincreasing in the floor ratio", sweep_monotonicity},
      {6, "threshold acceptance frequency follows the uniform law", acceptance_law},
      {7, "capacity never exceeded; worst case saturates Q", capacity_safety},
      {8, "byte-identical output across repeats and thread counts", determinism},
  };
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) selected.push_back(std::atoi(argv[k]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Log log;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.run(log);
    } catch (const std::exception& e) {
      log.os << "      exception: " << e.what() << '\n';
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%.2f s)\n%s", ok ? "PASS" : "FAIL", c.id, c.title, secs, log.os.str().c_str());
    failures += ok ? 0 : 1;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
