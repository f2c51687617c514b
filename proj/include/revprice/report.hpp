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

#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include "revprice/montecarlo.hpp"

namespace revprice {

/// Numbers in every table use 12 significant digits.
inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline constexpr const char* kHorizonHeader =
    "slot,scheme,avg_demand,avg_revenue,avg_payoff,avg_utilization,admission_warning";
inline constexpr const char* kSweepHeader = "ratio,scheme,avg_demand,avg_revenue,avg_payoff,avg_utilization";

/// Per-slot table. The slot column is one-based.
inline void write_horizon_csv(std::ostream& out, std::span<const SlotMetrics> rows) {
  out << kHorizonHeader << '\n';
  for (const auto& m : rows) {
    out << m.slot + 1 << ',' << scheme_name(m.scheme) << ',' << csv_number(m.avg_demand) << ','
        << csv_number(m.avg_revenue) << ',' << csv_number(m.avg_payoff) << ','
        << csv_number(m.avg_utilization) << ',' << (m.admission_warning ? 1 : 0) << '\n';
  }
}

/// Two rows per ratio, forward baseline first.
inline void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points) {
  out << kSweepHeader << '\n';
  for (const auto& pt : points) {
    for (const SlotMetrics* m : {&pt.forward, &pt.reverse}) {
      out << csv_number(pt.ratio) << ',' << scheme_name(m->scheme) << ','
          << csv_number(m->avg_demand) << ',' << csv_number(m->avg_revenue) << ','
          << csv_number(m->avg_payoff) << ',' << csv_number(m->avg_utilization) << '\n';
    }
  }
}

}  // namespace revprice
