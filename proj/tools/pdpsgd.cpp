// Copyright 2026 The pdpsgd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command line front end.
//
//   pdpsgd run       one experiment (several seeds), CSV + JSON output
//   pdpsgd sweep     one sweep axis (skew | weight | interval)
//   pdpsgd calibrate standalone noise-multiplier calibration
//   pdpsgd epsilons  emit the generated per-user budgets
//
// Exit codes: 0 success, 1 usage or config error, 2 guarantee violation,
// 3 runtime failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdpsgd/calibration.hpp"
#include "pdpsgd/dataset.hpp"
#include "pdpsgd/errors.hpp"
#include "pdpsgd/experiment.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitGuarantee = 2;
constexpr int kExitRuntime = 3;

// Seed precedence: --seed flag > config file > PDPSGD_SEED env > 0.
pdpsgd::ExperimentConfig env_defaults() {
  pdpsgd::ExperimentConfig defaults;
  if (const char* env = std::getenv("PDPSGD_SEED")) {
    try {
      defaults.base_seed = std::stoull(env);
    } catch (const std::exception&) {
      throw pdpsgd::FormatError(
          "PDPSGD_SEED must be an unsigned integer, got '" +
          std::string(env) + "'");
    }
  }
  return defaults;
}

struct ConfigArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::string output;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("-c,--config", args.config_path,
                  "Config file (key = value lines)");
  cmd->add_option("--set", args.sets,
                  "Override one config key, as key=value (repeatable)");
  cmd->add_option("--seed", args.seed, "Base seed override");
  cmd->add_option("--seeds", args.seeds, "Seed count override");
  cmd->add_option("-o,--output", args.output, "Output path prefix override");
}

// Throws FormatError on bad input; callers map that to a usage exit.
pdpsgd::ExperimentConfig resolve_config(const ConfigArgs& args) {
  pdpsgd::ExperimentConfig config = env_defaults();
  if (!args.config_path.empty()) {
    config = pdpsgd::load_config(args.config_path, config);
  }
  for (const std::string& item : args.sets) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw pdpsgd::FormatError("--set expects key=value, got '" + item +
                                "'");
    }
    pdpsgd::apply_override(config, item.substr(0, eq), item.substr(eq + 1));
  }
  if (args.seed.has_value()) config.base_seed = *args.seed;
  if (args.seeds.has_value()) config.seeds = *args.seeds;
  if (!args.output.empty()) config.output = args.output;
  return config;
}

void ensure_output_dir(const std::string& prefix) {
  const std::filesystem::path parent =
      std::filesystem::path(prefix).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

int exit_code_for(const pdpsgd::ExperimentResult& result) {
  if (result.errors > 0) return kExitRuntime;
  if (!result.guarantee_all_ok) return kExitGuarantee;
  return 0;
}

void print_summary(const pdpsgd::ExperimentResult& result) {
  std::cout << "algorithm=" << pdpsgd::algorithm_name(result.config.algorithm)
            << " seeds=" << result.config.seeds
            << " mean_test_accuracy=" << result.mean_test_accuracy
            << " std=" << result.std_test_accuracy
            << " mean_iterations=" << result.mean_total_iterations
            << " guarantee_ok=" << (result.guarantee_all_ok ? "true" : "false")
            << " errors=" << result.errors << "\n";
  for (const pdpsgd::SeedOutcome& outcome : result.outcomes) {
    if (!outcome.ok()) {
      std::cerr << "seed " << outcome.seed_index << " failed: "
                << outcome.error << "\n";
    }
  }
}

int run_command(const ConfigArgs& args) {
  const pdpsgd::ExperimentConfig config = resolve_config(args);
  const pdpsgd::ExperimentResult result = pdpsgd::run_experiment(config);
  ensure_output_dir(config.output);
  pdpsgd::write_experiment_csv(result, config.output + ".csv");
  pdpsgd::write_experiment_json(result, config.output + ".json");
  print_summary(result);
  std::cout << "wrote " << config.output << ".csv and " << config.output
            << ".json\n";
  return exit_code_for(result);
}

int sweep_command(const ConfigArgs& args, const std::string& kind_name,
                  const std::vector<double>& values, int jobs) {
  const pdpsgd::ExperimentConfig base = resolve_config(args);
  const pdpsgd::SweepKind kind = pdpsgd::sweep_kind_from_name(kind_name);
  const std::vector<double> cells =
      values.empty() ? pdpsgd::default_sweep_values(kind) : values;
  const pdpsgd::SweepResult sweep =
      pdpsgd::run_sweep(base, kind, cells, jobs);
  ensure_output_dir(base.output);
  pdpsgd::write_sweep_csv(sweep, base.output + ".csv");
  pdpsgd::write_sweep_json(sweep, base.output + ".json");

  int worst = 0;
  for (const pdpsgd::SweepCell& cell : sweep.cells) {
    std::cout << pdpsgd::sweep_kind_name(kind) << "="
              << cell.value << ": ";
    print_summary(cell.result);
    worst = std::max(worst, exit_code_for(cell.result));
  }
  std::cout << "wrote " << base.output << ".csv and " << base.output
            << ".json\n";
  return worst;
}

int calibrate_command(double epsilon, double delta, double sample_rate,
                      long steps, double tolerance,
                      const std::vector<std::string>& history_items) {
  pdpsgd::AccountingHistory history;
  for (const std::string& item : history_items) {
    double sigma = 0.0;
    double rate = 0.0;
    long past_steps = 0;
    if (std::sscanf(item.c_str(), "%lf,%lf,%ld", &sigma, &rate,
                    &past_steps) != 3) {
      throw pdpsgd::FormatError(
          "--history expects noise,rate,steps, got '" + item + "'");
    }
    history.append(sigma, rate, past_steps);
  }
  const pdpsgd::Calibration calibration = pdpsgd::calibrate_noise_multiplier(
      epsilon, delta, sample_rate, steps, tolerance, history);
  nlohmann::ordered_json out;
  out["noise_multiplier"] = calibration.noise_multiplier;
  out["achieved_epsilon"] = calibration.achieved_epsilon;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int epsilons_command(int n, double skew, double eps_lo, double eps_hi,
                     int groups, std::optional<double> c1,
                     std::optional<double> c2, const std::string& output) {
  const std::vector<double> epsilons =
      pdpsgd::generate_epsilons(n, skew, eps_lo, eps_hi, groups, c1, c2);
  std::string text = "user_id,epsilon\n";
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", i, epsilons[i]);
    text += buf;
  }
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::trunc);
    if (!out) {
      throw pdpsgd::FormatError(output + ": cannot open file for writing");
    }
    out << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized differentially private SGD toolkit"};
  app.require_subcommand(1);

  ConfigArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  add_config_options(run, run_args);

  ConfigArgs sweep_args;
  std::string sweep_kind = "skew";
  std::vector<double> sweep_values;
  int sweep_jobs = 1;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a one-axis sweep");
  add_config_options(sweep, sweep_args);
  sweep->add_option("--kind", sweep_kind,
                    "Sweep axis: skew | weight | interval");
  sweep->add_option("--values", sweep_values,
                    "Sweep values (defaults depend on the axis)");
  sweep->add_option("--jobs", sweep_jobs, "Max parallel cells");

  double cal_epsilon = 1.0;
  double cal_delta = 1e-5;
  double cal_rate = 0.01;
  long cal_steps = 1000;
  double cal_tolerance = 0.01;
  std::vector<std::string> cal_history;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Calibrate a noise multiplier");
  calibrate->add_option("--epsilon", cal_epsilon, "Target epsilon")
      ->required();
  calibrate->add_option("--delta", cal_delta, "Target delta");
  calibrate->add_option("--sample-rate", cal_rate, "Poisson sample rate")
      ->required();
  calibrate->add_option("--steps", cal_steps, "Step count")->required();
  calibrate->add_option("--tolerance", cal_tolerance,
                        "Epsilon tolerance of the bisection");
  calibrate->add_option("--history", cal_history,
                        "Prior invocation as noise,rate,steps (repeatable)");

  int eps_n = 20000;
  double eps_skew = 0.0;
  double eps_lo = 0.5;
  double eps_hi = 1.0;
  int eps_groups = 20;
  std::optional<double> eps_c1;
  std::optional<double> eps_c2;
  std::string eps_output;
  CLI::App* epsilons =
      app.add_subcommand("epsilons", "Emit generated per-user budgets");
  epsilons->add_option("--n", eps_n, "Number of users");
  epsilons->add_option("--skew", eps_skew, "Skew exponent");
  epsilons->add_option("--eps-lo", eps_lo, "Smallest budget");
  epsilons->add_option("--eps-hi", eps_hi, "Largest budget");
  epsilons->add_option("--groups", eps_groups, "Number of budget groups");
  epsilons->add_option("--c1", eps_c1, "Shape constant c1 override");
  epsilons->add_option("--c2", eps_c2, "Shape constant c2 override");
  epsilons->add_option("-o,--output", eps_output,
                       "Write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return run_command(run_args);
    if (sweep->parsed()) {
      return sweep_command(sweep_args, sweep_kind, sweep_values, sweep_jobs);
    }
    if (calibrate->parsed()) {
      return calibrate_command(cal_epsilon, cal_delta, cal_rate, cal_steps,
                               cal_tolerance, cal_history);
    }
    if (epsilons->parsed()) {
      return epsilons_command(eps_n, eps_skew, eps_lo, eps_hi, eps_groups,
                              eps_c1, eps_c2, eps_output);
    }
  } catch (const pdpsgd::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
