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

// revprice: batch front-end for the forward / reverse pricing simulator.
//
//   revprice simulate --config scenario.cfg --out fig2.csv
//   revprice sweep    --config scenario.cfg --out fig3.csv
//   revprice validate --config scenario.cfg
//
// Exit codes: 0 success, 1 validation failure, 2 config error, 3 I/O error.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "revprice/revprice.hpp"

namespace {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kConfigError = 2, kIoError = 3 };

revprice::ScenarioConfig load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  auto cfg = revprice::load_scenario(path);
  if (seed) cfg.master_seed = *seed;
  return cfg;
}

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw revprice::IoError(path, "cannot open output file");
  writer(out);
  out.flush();
  if (!out) throw revprice::IoError(path, "write failed");
}

int simulate(const std::string& config_path, const std::string& out_path,
             const std::optional<std::uint64_t>& seed) {
  const auto cfg = load(config_path, seed);
  const auto rows = revprice::run_horizon(cfg.market(), cfg.demand_model(), revprice::kBothSchemes,
                                          cfg.p_min_policy, cfg.run_options());
  for (const auto& m : rows) {
    if (m.admission_warning && m.scheme == revprice::Scheme::forward_only)
      std::cerr << "warning: slot " << m.slot + 1
                << ": capacity too small to admit every user at the forward price\n";
  }
  write_file(out_path, [&](std::ostream& os) { revprice::write_horizon_csv(os, rows); });
  return kOk;
}

int sweep(const std::string& config_path, const std::string& out_path,
          const std::optional<std::uint64_t>& seed) {
  const auto cfg = load(config_path, seed);
  if (!cfg.sweep_slot) throw revprice::ConfigError("sweep_slot", "required by the sweep command");
  if (cfg.sweep_ratios.empty()) throw revprice::ConfigError("sweep_ratios", "required by the sweep command");
  const auto points = revprice::run_pmin_sweep(cfg.market(), cfg.demand_model(), *cfg.sweep_slot - 1,
                                               cfg.sweep_ratios, cfg.run_options());
  write_file(out_path, [&](std::ostream& os) { revprice::write_sweep_csv(os, points); });
  return kOk;
}

int validate(const std::string& config_path, const std::optional<std::uint64_t>& seed) {
  const auto cfg = load(config_path, seed);
  const auto report = revprice::run_validation(cfg);
  revprice::print_report(std::cout, report);
  return report.passed() ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward and reverse (name-your-own-price) pricing simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Scenario file (key = value lines)")->required();
    sub->add_option("--seed", seed, "Override master_seed from the config");
  };
  auto* sim = app.add_subcommand("simulate", "Per-slot metrics for both schemes");
  add_common(sim);
  sim->add_option("--out", out_path, "Output CSV path")->required();
  auto* swp = app.add_subcommand("sweep", "Metrics across minimum participation price ratios");
  add_common(swp);
  swp->add_option("--out", out_path, "Output CSV path")->required();
  auto* val = app.add_subcommand("validate", "Run the oracle checks");
  add_common(val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*sim) return simulate(config_path, out_path, seed);
    if (*swp) return sweep(config_path, out_path, seed);
    return validate(config_path, seed);
  } catch (const revprice::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const revprice::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
