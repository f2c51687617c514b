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

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "revprice/market_model.hpp"
#include "revprice/montecarlo.hpp"
#include "revprice/reverse_pricing.hpp"

namespace revprice {

/// A missing, unknown or malformed configuration key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A file that could not be read or written.
class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Everything needed to reproduce one batch of experiments.
///
/// The file format is one `key = value` per line, `#` starts a comment.
/// Slot numbers in the file are one-based.
///
///   num_users         = 100
///   total_resource    = 1000
///   num_slots         = 10
///   theta_low         = 1
///   theta_high_rule   = linear:2,0      # or constant:c, or a bare number
///   p_min_policy      = lemma1          # or ratio:r, absolute:a
///   num_realizations  = 1000
///   master_seed       = 20150601
///   sweep_slot        = 5               # optional
///   sweep_ratios      = 0,0.1,0.2       # optional
///   threads           = 4               # optional, default 1
struct ScenarioConfig {
  std::size_t num_users = 0;
  double total_resource = 0.0;
  std::size_t num_slots = 0;
  double theta_low = 0.0;
  ThetaHighRule theta_high_rule;
  PminPolicy p_min_policy = PminPolicy::lemma1();
  std::size_t num_realizations = 0;
  std::uint64_t master_seed = 0;
  std::optional<std::size_t> sweep_slot;
  std::vector<double> sweep_ratios;
  unsigned threads = 1;

  MarketConfig market() const { return {total_resource, num_users, num_slots}; }
  DemandModel demand_model() const {
    return uniform_demand_model(theta_low, theta_high_rule, num_users, num_slots);
  }
  RunOptions run_options() const { return {num_realizations, master_seed, threads}; }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_real(const std::string& key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(key, "expected a finite number, got '" + std::string(text) + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigError(key, "expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

inline std::size_t parse_count(const std::string& key, std::string_view text) {
  const auto v = parse_u64(key, text);
  if (v < 1) throw ConfigError(key, "must be >= 1");
  return static_cast<std::size_t>(v);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) return out;
    s.remove_prefix(pos + 1);
  }
}

/// "kind:args" or "kind args".
inline std::pair<std::string_view, std::string_view> split_tagged(std::string_view v) {
  v = trim(v);
  auto pos = v.find(':');
  if (pos == std::string_view::npos) pos = v.find_first_of(" \t");
  if (pos == std::string_view::npos) return {v, {}};
  return {trim(v.substr(0, pos)), trim(v.substr(pos + 1))};
}

inline ThetaHighRule parse_high_rule(const std::string& key, std::string_view v) {
  const auto [kind, args] = split_tagged(v);
  if (kind == "linear") {
    const auto parts = split(args, ',');
    if (parts.size() != 2) throw ConfigError(key, "linear rule needs two coefficients 'linear:a,b'");
    return ThetaHighRule::linear(parse_real(key, parts[0]), parse_real(key, parts[1]));
  }
  if (kind == "constant") return ThetaHighRule::constant(parse_real(key, args));
  if (args.empty()) return ThetaHighRule::constant(parse_real(key, kind));
  throw ConfigError(key, "unknown rule '" + std::string(kind) + "' (expected linear or constant)");
}

inline PminPolicy parse_policy(const std::string& key, std::string_view v) {
  const auto [kind, args] = split_tagged(v);
  try {
    if (kind == "lemma1" && args.empty()) return PminPolicy::lemma1();
    if (kind == "ratio") return PminPolicy::ratio(parse_real(key, args));
    if (kind == "absolute") return PminPolicy::absolute(parse_real(key, args));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
  throw ConfigError(key, "expected lemma1, ratio:r or absolute:a, got '" + std::string(v) + "'");
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = detail::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(std::string(body), "line " + std::to_string(lineno) + " is not 'key = value'");
    std::string key(detail::trim(body.substr(0, eq)));
    std::string value(detail::trim(body.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + " has an empty key");
    if (value.empty()) throw ConfigError(key, "empty value");
    if (!kv.emplace(key, std::move(value)).second) throw ConfigError(key, "given more than once");
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = std::move(it->second);
    kv.erase(it);
    return v;
  };
  auto require = [&](const std::string& key) {
    auto v = take(key);
    if (!v) throw ConfigError(key, "missing");
    return *v;
  };

  ScenarioConfig cfg;
  cfg.num_users = detail::parse_count("num_users", require("num_users"));
  cfg.total_resource = detail::parse_real("total_resource", require("total_resource"));
  if (!(cfg.total_resource > 0.0)) throw ConfigError("total_resource", "must be > 0");
  cfg.num_slots = detail::parse_count("num_slots", require("num_slots"));
  cfg.theta_low = detail::parse_real("theta_low", require("theta_low"));
  if (!(cfg.theta_low >= 0.0)) throw ConfigError("theta_low", "must be >= 0");
  cfg.theta_high_rule = detail::parse_high_rule("theta_high_rule", require("theta_high_rule"));
  for (std::size_t h = 1; h <= cfg.num_slots; ++h) {
    if (!(cfg.theta_high_rule.at_slot_number(h) >= cfg.theta_low))
      throw ConfigError("theta_high_rule", "upper bound falls below theta_low at slot " + std::to_string(h));
  }
  cfg.p_min_policy = detail::parse_policy("p_min_policy", require("p_min_policy"));
  cfg.num_realizations = detail::parse_count("num_realizations", require("num_realizations"));
  cfg.master_seed = detail::parse_u64("master_seed", require("master_seed"));

  if (auto v = take("sweep_slot")) {
    const auto slot = detail::parse_count("sweep_slot", *v);
    if (slot > cfg.num_slots) throw ConfigError("sweep_slot", "exceeds num_slots");
    cfg.sweep_slot = slot;
  }
  if (auto v = take("sweep_ratios")) {
    for (auto part : detail::split(*v, ',')) {
      const double r = detail::parse_real("sweep_ratios", part);
      if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("sweep_ratios", "ratios must lie in [0, 1]");
      cfg.sweep_ratios.push_back(r);
    }
  }
  if (auto v = take("threads")) cfg.threads = static_cast<unsigned>(detail::parse_count("threads", *v));

  if (!kv.empty()) throw ConfigError(kv.begin()->first, "unknown key");
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open config file");
  return parse_scenario(in);
}

inline std::string serialize_scenario(const ScenarioConfig& cfg) {
  using detail::format_real;
  std::ostringstream os;
  os << "num_users = " << cfg.num_users << '\n'
     << "total_resource = " << format_real(cfg.total_resource) << '\n'
     << "num_slots = " << cfg.num_slots << '\n'
     << "theta_low = " << format_real(cfg.theta_low) << '\n'
     << "theta_high_rule = linear:" << format_real(cfg.theta_high_rule.slope) << ','
     << format_real(cfg.theta_high_rule.intercept) << '\n'
     << "p_min_policy = ";
  switch (cfg.p_min_policy.kind()) {
    case PminPolicy::Kind::lemma1: os << "lemma1"; break;
    case PminPolicy::Kind::ratio: os << "ratio:" << format_real(cfg.p_min_policy.value()); break;
    case PminPolicy::Kind::absolute: os << "absolute:" << format_real(cfg.p_min_policy.value()); break;
  }
  os << '\n'
     << "num_realizations = " << cfg.num_realizations << '\n'
     << "master_seed = " << cfg.master_seed << '\n';
  if (cfg.sweep_slot) os << "sweep_slot = " << *cfg.sweep_slot << '\n';
  if (!cfg.sweep_ratios.empty()) {
    os << "sweep_ratios = ";
    for (std::size_t k = 0; k < cfg.sweep_ratios.size(); ++k)
      os << (k ? "," : "") << format_real(cfg.sweep_ratios[k]);
    os << '\n';
  }
  os << "threads = " << cfg.threads << '\n';
  return os.str();
}

}  // namespace revprice
