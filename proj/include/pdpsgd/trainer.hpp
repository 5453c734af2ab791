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
// Differentially private SGD trainers.
//
// train_pdpsgd runs the personalized algorithm: per round it picks a
// threshold tau over the remaining budgets, calibrates noise for a
// (tau, delta) round, samples participants with the personalized
// probabilities, trains with clipped noisy SGD, and charges the ledger.
// Baselines: uniform DP-SGD (one budget for everyone), a sample-once
// baseline (threshold + personalized sampling, then one uniform DP-SGD
// run), and an adaptive ensemble variant that trains one model per round
// at a fixed noise multiplier until the round budget is exhausted.

#ifndef PDPSGD_TRAINER_HPP_
#define PDPSGD_TRAINER_HPP_

#include <cstdint>
#include <vector>

#include "pdpsgd/dataset.hpp"
#include "pdpsgd/ledger.hpp"
#include "pdpsgd/model.hpp"
#include "pdpsgd/rdp.hpp"
#include "pdpsgd/threshold.hpp"

namespace pdpsgd {

struct TrainConfig {
  ModelKind model = ModelKind::kLogistic;
  int hidden_width = 64;
  double learning_rate = 0.05;
  double clip_norm = 1.0;
  int batch_size = 64;
  int rounds = 5;            // k
  int epochs_per_round = 2;  // n_e
  double delta = 1e-5;
  double tolerance = 0.01;   // calibration tolerance beta
  ThresholdLoss loss = ThresholdLoss::kFixed;
  double w1 = 0.7;
  double w2 = 0.3;
  int grid_points = 501;
  int round_cap = 10;        // ledger R_max
  double initial_noise_multiplier = 1.3;
  std::uint64_t seed = 0;
  // Records per-step clipped-gradient norms so tests can assert the clip
  // bound; costs one extra norm pass per example.
  bool instrument_clipping = false;
};

struct RoundRecord {
  int round = 0;
  double tau = 0.0;
  double sigma = 0.0;
  double epsilon_spent = 0.0;
  int sampled = 0;
  long iterations = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double wall_ms = 0.0;
};

struct RunMetrics {
  std::vector<RoundRecord> rounds;
  long total_iterations = 0;
  // Epsilon of all rounds composed by the accountant at the run's delta;
  // 0 when no steps ran.
  double total_epsilon = 0.0;
  double final_train_accuracy = 0.0;
  double final_test_accuracy = 0.0;
  double max_clipped_norm = 0.0;  // only filled under instrument_clipping
  bool guarantee_ok = true;
};

struct PdpResult {
  ModelParams params;
  BudgetLedger ledger;
  RunMetrics metrics;
};

struct DpsgdResult {
  ModelParams params;
  RunMetrics metrics;
};

// Per-round models with their ensemble weights tau_T * |D_T|.
struct EnsembleModel {
  std::vector<ModelParams> models;
  std::vector<double> weights;
};

struct AdaResult {
  EnsembleModel ensemble;
  BudgetLedger ledger;
  RunMetrics metrics;
};

// Weighted-average-probability prediction accuracy of an ensemble.
double ensemble_accuracy(const EnsembleModel& ensemble,
                         const LabeledDataset& data);

// The personalized algorithm over `config.rounds` rounds. Stops early when
// every budget is exhausted or the calibrator reports the next round's
// threshold unreachable.
PdpResult train_pdpsgd(const LabeledDataset& train, const LabeledDataset& test,
                       const PrivacySpec& spec, const TrainConfig& config);

// Uniform DP-SGD at one (epsilon, delta) budget over
// rounds * epochs_per_round epochs.
DpsgdResult train_dpsgd_uniform(const LabeledDataset& train,
                                const LabeledDataset& test, double epsilon,
                                const TrainConfig& config);

// One threshold, one personalized sample, then a single uniform DP-SGD run
// on the sampled set at (tau, delta).
PdpResult train_sampling_baseline(const LabeledDataset& train,
                                  const LabeledDataset& test,
                                  const PrivacySpec& spec,
                                  const TrainConfig& config);

// Per-round models at the fixed initial noise multiplier, stepping until the
// accountant would exceed the round threshold; prediction by weighted
// ensemble.
AdaResult train_adapdp(const LabeledDataset& train, const LabeledDataset& test,
                       const PrivacySpec& spec, const TrainConfig& config);

}  // namespace pdpsgd

#endif  // PDPSGD_TRAINER_HPP_
