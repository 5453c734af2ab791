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
// Batch experiment runner: loads a key=value config, executes one algorithm
// across several seeds (or a sweep over one axis), and writes a CSV of
// per-round records plus a JSON summary.

#ifndef PDPSGD_EXPERIMENT_HPP_
#define PDPSGD_EXPERIMENT_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pdpsgd/dataset.hpp"
#include "pdpsgd/trainer.hpp"

namespace pdpsgd {

enum class Algorithm {
  kPdpsgdFixed,
  kPdpsgdAdaptive,
  kDpsgd,
  kSampling,
  kAdapdp,
};

std::string algorithm_name(Algorithm algorithm);
Algorithm algorithm_from_name(const std::string& name);

struct ExperimentConfig {
  // Dataset: "synthetic" generates class blobs; "idx" loads IDX files.
  std::string dataset = "synthetic";
  int synthetic_n = 5000;
  int synthetic_test_n = 1000;
  int synthetic_dim = 20;
  int synthetic_classes = 5;
  double synthetic_separation = 6.0;
  std::uint64_t dataset_seed = 42;
  std::string idx_images;
  std::string idx_labels;
  std::string idx_test_images;
  std::string idx_test_labels;

  // Per-user budgets: n_groups values spread over [eps_lo, eps_hi], counts
  // shaped by skew.
  double eps_lo = 0.5;
  double eps_hi = 1.0;
  double skew = 0.0;
  int n_groups = 20;

  Algorithm algorithm = Algorithm::kPdpsgdFixed;
  double dpsgd_epsilon = 0.5;  // budget for the uniform baseline
  TrainConfig train;

  int seeds = 3;
  std::uint64_t base_seed = 0;
  std::string output = "results";
};

// Parses `key = value` lines (# comments allowed) on top of `defaults`.
// Unknown keys raise FormatError naming the line. Algorithm-dependent
// defaults (threshold loss and its weights) apply before explicit keys
// override them.
ExperimentConfig parse_config_text(const std::string& text,
                                   const ExperimentConfig& defaults = {});
ExperimentConfig load_config(const std::string& path,
                             const ExperimentConfig& defaults = {});

// Applies one key=value override on top of a parsed config.
void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value);

// The resolved config as ordered key=value pairs, for echoing into reports.
std::map<std::string, std::string> config_items(const ExperimentConfig& config);

struct SeedOutcome {
  int seed_index = 0;
  RunMetrics metrics;
  double wall_ms = 0.0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SeedOutcome> outcomes;
  double mean_test_accuracy = 0.0;
  double std_test_accuracy = 0.0;
  double mean_total_iterations = 0.0;
  bool guarantee_all_ok = true;
  int errors = 0;
};

// Runs `config.seeds` independent trainings at seeds base_seed + 0, 1, ...
// Per-seed failures are recorded, not thrown.
ExperimentResult run_experiment(const ExperimentConfig& config);

enum class SweepKind { kSkew, kWeight, kInterval };

std::string sweep_kind_name(SweepKind kind);
SweepKind sweep_kind_from_name(const std::string& name);
std::vector<double> default_sweep_values(SweepKind kind);

struct SweepCell {
  double value = 0.0;
  ExperimentResult result;
};

struct SweepResult {
  SweepKind kind = SweepKind::kSkew;
  std::vector<SweepCell> cells;
};

// One run_experiment per value: skew sets the budget skew, weight sets
// (w1, 1 - w1) on the fixed-loss algorithm, interval sets
// eps_hi = eps_lo + value. Cells run on up to `jobs` threads; each cell owns
// its ledger and RNG streams.
SweepResult run_sweep(const ExperimentConfig& base, SweepKind kind,
                      std::span<const double> values, int jobs);

// The fixed CSV header shared by all metrics files.
extern const char kCsvHeader[];

// Per-(seed, round) CSV rows for one experiment, without the header line.
std::vector<std::string> csv_rows(const ExperimentResult& result);

// Atomic (tmp + rename) writers. Sweep CSV carries one header plus
// "# cell: kind=value" group markers; sweep JSON is a cell array.
void write_experiment_csv(const ExperimentResult& result,
                          const std::string& path);
void write_experiment_json(const ExperimentResult& result,
                           const std::string& path);
void write_sweep_csv(const SweepResult& sweep, const std::string& path);
void write_sweep_json(const SweepResult& sweep, const std::string& path);

// Loads the configured dataset pair (train, test); exposed for tests.
std::pair<LabeledDataset, LabeledDataset> load_datasets(
    const ExperimentConfig& config);

// The per-user privacy requirements the experiment grants: epsilons from
// generate_epsilons, per-user delta round_cap * delta, base delta = delta.
PrivacySpec build_privacy_spec(const ExperimentConfig& config, int n);

}  // namespace pdpsgd

#endif  // PDPSGD_EXPERIMENT_HPP_
