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

#include "pdpsgd/trainer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pdpsgd/calibration.hpp"
#include "pdpsgd/errors.hpp"
#include "pdpsgd/kernels.hpp"
#include "pdpsgd/rng.hpp"
#include "pdpsgd/sampling.hpp"

namespace pdpsgd {
namespace {

// Seed stream tags; each (tag, round, ...) tuple gets an independent stream.
constexpr std::uint64_t kTagInit = 1;
constexpr std::uint64_t kTagSample = 2;
constexpr std::uint64_t kTagBatch = 3;
constexpr std::uint64_t kTagNoise = 4;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void validate_config(const TrainConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (!(config.clip_norm > 0.0)) {
    throw std::invalid_argument("clip norm must be positive");
  }
  if (config.batch_size < 1) {
    throw std::invalid_argument("batch size must be at least 1");
  }
  if (config.rounds < 1 || config.epochs_per_round < 1) {
    throw std::invalid_argument("rounds and epochs must be at least 1");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (!(config.tolerance > 0.0)) {
    throw std::invalid_argument("calibration tolerance must be positive");
  }
  if (config.grid_points < 2) {
    throw std::invalid_argument("grid must have at least 2 points");
  }
  if (config.round_cap < 1) {
    throw std::invalid_argument("round cap must be at least 1");
  }
  if (!(config.initial_noise_multiplier > 0.0)) {
    throw std::invalid_argument("initial noise multiplier must be positive");
  }
}

void validate_data(const LabeledDataset& train, const LabeledDataset& test) {
  if (train.size() < 1) {
    throw std::invalid_argument("training set must be non-empty");
  }
  if (test.size() >= 1 && test.num_features != train.num_features) {
    throw std::invalid_argument("train and test feature sizes differ");
  }
}

ModelSpec model_spec_for(const LabeledDataset& train,
                         const LabeledDataset& test,
                         const TrainConfig& config) {
  ModelSpec spec;
  spec.kind = config.model;
  spec.num_features = train.num_features;
  spec.num_classes = std::max(train.num_classes, test.num_classes);
  spec.hidden_width = config.hidden_width;
  return spec;
}

std::vector<int> all_indices(int n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

// One clipped-noisy SGD update: average of clipped per-example gradients
// plus N(0, (sigma * clip)^2) noise per coordinate, normalized by the
// expected batch size.
void sgd_step(ModelParams& params, const LabeledDataset& data,
              std::span<const int> batch, const TrainConfig& config,
              double sigma, double normalizer, NormalSampler& noise,
              std::vector<double>& sum_buf, double* max_clipped_norm) {
  double step_max = 0.0;
  clipped_gradient_sum(params, data, batch, config.clip_norm, sum_buf,
                       max_clipped_norm != nullptr ? &step_max : nullptr);
  if (max_clipped_norm != nullptr) {
    *max_clipped_norm = std::max(*max_clipped_norm, step_max);
  }
  const double noise_std = sigma * config.clip_norm;
  for (std::size_t j = 0; j < params.values.size(); ++j) {
    const double noisy = (sum_buf[j] + noise_std * noise()) / normalizer;
    params.values[j] -= config.learning_rate * noisy;
  }
}

void validate_spec_matches(const PrivacySpec& spec,
                           const LabeledDataset& train) {
  if (static_cast<int>(spec.users.size()) != train.size()) {
    throw std::invalid_argument(
        "privacy spec must cover exactly the training examples");
  }
}

}  // namespace

double ensemble_accuracy(const EnsembleModel& ensemble,
                         const LabeledDataset& data) {
  if (ensemble.models.empty() || data.size() == 0) return 0.0;
  double total_weight = 0.0;
  for (double w : ensemble.weights) total_weight += w;
  const bool uniform = !(total_weight > 0.0);

  const int n = data.size();
  const int classes = ensemble.models.front().spec.num_classes;
  long correct = 0;
#ifdef _OPENMP
#pragma omp parallel reduction(+ : correct)
#endif
  {
    ModelScratch scratch;
    std::vector<double> probs(static_cast<std::size_t>(classes));
    std::vector<double> mix(static_cast<std::size_t>(classes));
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int i = 0; i < n; ++i) {
      std::fill(mix.begin(), mix.end(), 0.0);
      for (std::size_t m = 0; m < ensemble.models.size(); ++m) {
        const double w = uniform ? 1.0 : ensemble.weights[m];
        class_probabilities(ensemble.models[m], data.example(i), scratch,
                            probs);
        for (int c = 0; c < classes; ++c) {
          mix[static_cast<std::size_t>(c)] +=
              w * probs[static_cast<std::size_t>(c)];
        }
      }
      int best = 0;
      for (int c = 1; c < classes; ++c) {
        if (mix[static_cast<std::size_t>(c)] >
            mix[static_cast<std::size_t>(best)]) {
          best = c;
        }
      }
      if (best == data.labels[static_cast<std::size_t>(i)]) ++correct;
    }
  }
  return static_cast<double>(correct) / n;
}

PdpResult train_pdpsgd(const LabeledDataset& train, const LabeledDataset& test,
                       const PrivacySpec& spec, const TrainConfig& config) {
  validate_config(config);
  validate_data(train, test);
  validate_spec_matches(spec, train);
  if (config.rounds > config.round_cap) {
    throw std::invalid_argument("rounds must not exceed the ledger round cap");
  }

  const int n = train.size();
  const std::vector<double> orders = default_integer_orders();
  BudgetLedger ledger(spec, config.round_cap);
  ModelParams params =
      init_params(model_spec_for(train, test, config),
                  derive_seed(config.seed, kTagInit));
  RunMetrics metrics;
  std::vector<double> sum_buf(params.values.size());
  const std::vector<int> everyone = all_indices(n);

  RdpCurve total_curve;
  total_curve.orders = orders;
  total_curve.costs.assign(orders.size(), 0.0);
  bool any_steps = false;

  for (int round = 1; round <= config.rounds; ++round) {
    const auto round_start = Clock::now();
    const std::vector<RemainingBudget> active = ledger.active_budgets();
    if (active.empty()) break;
    std::vector<double> active_eps;
    active_eps.reserve(active.size());
    for (const RemainingBudget& b : active) active_eps.push_back(b.epsilon);
    const ThresholdChoice choice =
        optimize_threshold(active_eps, config.loss, config.w1, config.w2,
                           config.grid_points);

    std::vector<double> remaining(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      remaining[static_cast<std::size_t>(i)] = ledger.remaining_epsilon(i);
    }
    const SamplingPlan plan =
        sampling_probabilities(remaining, choice.tau);
    const std::vector<int> sampled =
        round_sample(everyone, plan, derive_seed(config.seed, kTagSample,
                                                 static_cast<std::uint64_t>(
                                                     round)));

    RoundRecord record;
    record.round = round;
    record.tau = choice.tau;
    record.sampled = static_cast<int>(sampled.size());

    if (sampled.empty()) {
      // The mechanism saw no data, so only the participation delta accrues.
      ledger.charge_round(sampled, 0.0, plan, config.delta);
      record.train_accuracy = dataset_accuracy(params, train);
      record.test_accuracy = dataset_accuracy(params, test);
      record.wall_ms = ms_since(round_start);
      metrics.rounds.push_back(record);
      continue;
    }

    const int n_round = static_cast<int>(sampled.size());
    const double q = std::min(
        1.0, static_cast<double>(config.batch_size) / n_round);
    const long batches_per_epoch =
        (n_round + config.batch_size - 1) / config.batch_size;
    const long steps =
        static_cast<long>(config.epochs_per_round) * batches_per_epoch;

    Calibration calib;
    try {
      calib = calibrate_noise_multiplier(choice.tau, config.delta, q, steps,
                                         config.tolerance, AccountingHistory{},
                                         orders);
    } catch (const BudgetExhaustedError&) {
      // The remaining budgets no longer cover even one round; stop with
      // partial results.
      break;
    }
    record.sigma = calib.noise_multiplier;

    const double normalizer = q * n_round;
    const std::vector<double> rates(static_cast<std::size_t>(n_round), q);
    Rng noise_rng = make_rng(config.seed, kTagNoise,
                             static_cast<std::uint64_t>(round));
    NormalSampler noise(noise_rng);
    long taken = 0;
    for (int epoch = 1; epoch <= config.epochs_per_round; ++epoch) {
      const std::vector<std::vector<int>> batches = poisson_batches(
          sampled, rates, static_cast<int>(batches_per_epoch),
          derive_seed(config.seed, kTagBatch,
                      static_cast<std::uint64_t>(round),
                      static_cast<std::uint64_t>(epoch)));
      for (const std::vector<int>& batch : batches) {
        sgd_step(params, train, batch, config, calib.noise_multiplier,
                 normalizer, noise, sum_buf,
                 config.instrument_clipping ? &metrics.max_clipped_norm
                                            : nullptr);
        ++taken;
      }
    }

    const RdpCurve round_curve =
        subsampled_gaussian_rdp(calib.noise_multiplier, q, steps, orders);
    const double epsilon_spent =
        rdp_to_dp(round_curve, config.delta).epsilon;
    ledger.charge_round(sampled, epsilon_spent, plan, config.delta);
    total_curve = compose(total_curve, round_curve);
    any_steps = true;

    record.epsilon_spent = epsilon_spent;
    record.iterations = taken;
    record.train_accuracy = dataset_accuracy(params, train);
    record.test_accuracy = dataset_accuracy(params, test);
    record.wall_ms = ms_since(round_start);
    metrics.rounds.push_back(record);
    metrics.total_iterations += taken;
  }

  metrics.total_epsilon =
      any_steps ? rdp_to_dp(total_curve, config.delta).epsilon : 0.0;
  metrics.final_train_accuracy = dataset_accuracy(params, train);
  metrics.final_test_accuracy = dataset_accuracy(params, test);
  metrics.guarantee_ok = ledger.guarantee_report().all_ok;
  return {std::move(params), std::move(ledger), std::move(metrics)};
}

DpsgdResult train_dpsgd_uniform(const LabeledDataset& train,
                                const LabeledDataset& test, double epsilon,
                                const TrainConfig& config) {
  validate_config(config);
  validate_data(train, test);
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }

  const auto run_start = Clock::now();
  const int n = train.size();
  const std::vector<double> orders = default_integer_orders();
  const double q =
      std::min(1.0, static_cast<double>(config.batch_size) / n);
  const long batches_per_epoch =
      (n + config.batch_size - 1) / config.batch_size;
  const long total_epochs =
      static_cast<long>(config.rounds) * config.epochs_per_round;
  const long steps = total_epochs * batches_per_epoch;

  const Calibration calib =
      calibrate_noise_multiplier(epsilon, config.delta, q, steps,
                                 config.tolerance, AccountingHistory{},
                                 orders);

  ModelParams params =
      init_params(model_spec_for(train, test, config),
                  derive_seed(config.seed, kTagInit));
  std::vector<double> sum_buf(params.values.size());
  const std::vector<int> everyone = all_indices(n);
  const std::vector<double> rates(static_cast<std::size_t>(n), q);
  const double normalizer = q * n;

  RunMetrics metrics;
  Rng noise_rng = make_rng(config.seed, kTagNoise, 1);
  NormalSampler noise(noise_rng);
  long taken = 0;
  for (long epoch = 1; epoch <= total_epochs; ++epoch) {
    const std::vector<std::vector<int>> batches = poisson_batches(
        everyone, rates, static_cast<int>(batches_per_epoch),
        derive_seed(config.seed, kTagBatch, 1,
                    static_cast<std::uint64_t>(epoch)));
    for (const std::vector<int>& batch : batches) {
      sgd_step(params, train, batch, config, calib.noise_multiplier,
               normalizer, noise, sum_buf,
               config.instrument_clipping ? &metrics.max_clipped_norm
                                          : nullptr);
      ++taken;
    }
  }

  RoundRecord record;
  record.round = 1;
  record.tau = epsilon;
  record.sigma = calib.noise_multiplier;
  record.epsilon_spent = calib.achieved_epsilon;
  record.sampled = n;
  record.iterations = taken;
  record.train_accuracy = dataset_accuracy(params, train);
  record.test_accuracy = dataset_accuracy(params, test);
  record.wall_ms = ms_since(run_start);
  metrics.rounds.push_back(record);
  metrics.total_iterations = taken;
  metrics.total_epsilon = calib.achieved_epsilon;
  metrics.final_train_accuracy = record.train_accuracy;
  metrics.final_test_accuracy = record.test_accuracy;
  metrics.guarantee_ok = calib.achieved_epsilon <= epsilon;
  return {std::move(params), std::move(metrics)};
}

PdpResult train_sampling_baseline(const LabeledDataset& train,
                                  const LabeledDataset& test,
                                  const PrivacySpec& spec,
                                  const TrainConfig& config) {
  validate_config(config);
  validate_data(train, test);
  validate_spec_matches(spec, train);

  const auto run_start = Clock::now();
  const int n = train.size();
  const std::vector<double> orders = default_integer_orders();
  BudgetLedger ledger(spec, config.round_cap);
  ModelParams params =
      init_params(model_spec_for(train, test, config),
                  derive_seed(config.seed, kTagInit));
  RunMetrics metrics;

  std::vector<double> budgets;
  budgets.reserve(spec.users.size());
  for (const UserPrivacy& user : spec.users) budgets.push_back(user.epsilon);
  const ThresholdChoice choice = optimize_threshold(
      budgets, ThresholdLoss::kFixed, config.w1, config.w2,
      config.grid_points);
  const SamplingPlan plan = sampling_probabilities(budgets, choice.tau);
  const std::vector<int> sampled =
      round_sample(all_indices(n), plan,
                   derive_seed(config.seed, kTagSample, 1));

  RoundRecord record;
  record.round = 1;
  record.tau = choice.tau;
  record.sampled = static_cast<int>(sampled.size());

  if (!sampled.empty()) {
    const int n_s = static_cast<int>(sampled.size());
    const double q =
        std::min(1.0, static_cast<double>(config.batch_size) / n_s);
    const long batches_per_epoch =
        (n_s + config.batch_size - 1) / config.batch_size;
    const long total_epochs =
        static_cast<long>(config.rounds) * config.epochs_per_round;
    const long steps = total_epochs * batches_per_epoch;
    const Calibration calib =
        calibrate_noise_multiplier(choice.tau, config.delta, q, steps,
                                   config.tolerance, AccountingHistory{},
                                   orders);
    record.sigma = calib.noise_multiplier;

    std::vector<double> sum_buf(params.values.size());
    const std::vector<double> rates(static_cast<std::size_t>(n_s), q);
    const double normalizer = q * n_s;
    Rng noise_rng = make_rng(config.seed, kTagNoise, 1);
    NormalSampler noise(noise_rng);
    long taken = 0;
    for (long epoch = 1; epoch <= total_epochs; ++epoch) {
      const std::vector<std::vector<int>> batches = poisson_batches(
          sampled, rates, static_cast<int>(batches_per_epoch),
          derive_seed(config.seed, kTagBatch, 1,
                      static_cast<std::uint64_t>(epoch)));
      for (const std::vector<int>& batch : batches) {
        sgd_step(params, train, batch, config, calib.noise_multiplier,
                 normalizer, noise, sum_buf,
                 config.instrument_clipping ? &metrics.max_clipped_norm
                                            : nullptr);
        ++taken;
      }
    }
    record.epsilon_spent = calib.achieved_epsilon;
    record.iterations = taken;
    metrics.total_iterations = taken;
    metrics.total_epsilon = calib.achieved_epsilon;
    ledger.charge_round(sampled, calib.achieved_epsilon, plan, config.delta);
  } else {
    ledger.charge_round(sampled, 0.0, plan, config.delta);
  }

  record.train_accuracy = dataset_accuracy(params, train);
  record.test_accuracy = dataset_accuracy(params, test);
  record.wall_ms = ms_since(run_start);
  metrics.rounds.push_back(record);
  metrics.final_train_accuracy = record.train_accuracy;
  metrics.final_test_accuracy = record.test_accuracy;
  metrics.guarantee_ok = ledger.guarantee_report().all_ok;
  return {std::move(params), std::move(ledger), std::move(metrics)};
}

AdaResult train_adapdp(const LabeledDataset& train, const LabeledDataset& test,
                       const PrivacySpec& spec, const TrainConfig& config) {
  validate_config(config);
  validate_data(train, test);
  validate_spec_matches(spec, train);
  if (config.rounds > config.round_cap) {
    throw std::invalid_argument("rounds must not exceed the ledger round cap");
  }

  const int n = train.size();
  const std::vector<double> orders = default_integer_orders();
  BudgetLedger ledger(spec, config.round_cap);
  const ModelSpec model_spec = model_spec_for(train, test, config);
  const double sigma = config.initial_noise_multiplier;
  EnsembleModel ensemble;
  RunMetrics metrics;
  const std::vector<int> everyone = all_indices(n);

  RdpCurve total_curve;
  total_curve.orders = orders;
  total_curve.costs.assign(orders.size(), 0.0);
  bool any_steps = false;

  for (int round = 1; round <= config.rounds; ++round) {
    const auto round_start = Clock::now();
    const std::vector<RemainingBudget> active = ledger.active_budgets();
    if (active.empty()) break;
    std::vector<double> active_eps;
    active_eps.reserve(active.size());
    for (const RemainingBudget& b : active) active_eps.push_back(b.epsilon);
    const ThresholdChoice choice =
        optimize_threshold(active_eps, config.loss, config.w1, config.w2,
                           config.grid_points);

    std::vector<double> remaining(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      remaining[static_cast<std::size_t>(i)] = ledger.remaining_epsilon(i);
    }
    const SamplingPlan plan =
        sampling_probabilities(remaining, choice.tau);
    const std::vector<int> sampled =
        round_sample(everyone, plan, derive_seed(config.seed, kTagSample,
                                                 static_cast<std::uint64_t>(
                                                     round)));

    RoundRecord record;
    record.round = round;
    record.tau = choice.tau;
    record.sampled = static_cast<int>(sampled.size());

    if (sampled.empty()) {
      ledger.charge_round(sampled, 0.0, plan, config.delta);
      record.train_accuracy = ensemble_accuracy(ensemble, train);
      record.test_accuracy = ensemble_accuracy(ensemble, test);
      record.wall_ms = ms_since(round_start);
      metrics.rounds.push_back(record);
      continue;
    }

    const int n_s = static_cast<int>(sampled.size());
    const double q =
        std::min(1.0, static_cast<double>(config.batch_size) / n_s);
    const RdpCurve one_step = subsampled_gaussian_rdp(sigma, q, 1, orders);
    RdpCurve at_t = one_step;  // reused buffer: costs scaled per t below

    ModelParams round_params =
        init_params(model_spec, derive_seed(config.seed, kTagInit,
                                            static_cast<std::uint64_t>(
                                                round)));
    std::vector<double> sum_buf(round_params.values.size());
    const std::vector<double> rates(static_cast<std::size_t>(n_s), q);
    Rng noise_rng = make_rng(config.seed, kTagNoise,
                             static_cast<std::uint64_t>(round));
    NormalSampler noise(noise_rng);

    // Step until the accountant's next-step epsilon would pass tau, or the
    // current spend is already within tolerance of it.
    long t = 0;
    double eps_current = 0.0;
    while (true) {
      for (std::size_t i = 0; i < one_step.costs.size(); ++i) {
        at_t.costs[i] = one_step.costs[i] * static_cast<double>(t + 1);
      }
      const double eps_next = rdp_to_dp(at_t, config.delta).epsilon;
      if (eps_next > choice.tau) break;
      const std::vector<std::vector<int>> batch = poisson_batches(
          sampled, rates, 1,
          derive_seed(config.seed, kTagBatch,
                      static_cast<std::uint64_t>(round),
                      static_cast<std::uint64_t>(t)));
      sgd_step(round_params, train, batch.front(), config, sigma, q * n_s,
               noise, sum_buf,
               config.instrument_clipping ? &metrics.max_clipped_norm
                                          : nullptr);
      ++t;
      eps_current = eps_next;
      if (eps_current >= choice.tau - config.tolerance) break;
    }

    const double epsilon_spent = t > 0 ? eps_current : 0.0;
    ledger.charge_round(sampled, epsilon_spent, plan, config.delta);
    if (t > 0) {
      RdpCurve spent_curve = one_step;
      for (std::size_t i = 0; i < spent_curve.costs.size(); ++i) {
        spent_curve.costs[i] = one_step.costs[i] * static_cast<double>(t);
      }
      total_curve = compose(total_curve, spent_curve);
      any_steps = true;
      ensemble.models.push_back(std::move(round_params));
      ensemble.weights.push_back(choice.tau * n_s);
    }

    record.sigma = sigma;
    record.epsilon_spent = epsilon_spent;
    record.iterations = t;
    record.train_accuracy = ensemble_accuracy(ensemble, train);
    record.test_accuracy = ensemble_accuracy(ensemble, test);
    record.wall_ms = ms_since(round_start);
    metrics.rounds.push_back(record);
    metrics.total_iterations += t;
  }

  metrics.total_epsilon =
      any_steps ? rdp_to_dp(total_curve, config.delta).epsilon : 0.0;
  metrics.final_train_accuracy = ensemble_accuracy(ensemble, train);
  metrics.final_test_accuracy = ensemble_accuracy(ensemble, test);
  metrics.guarantee_ok = ledger.guarantee_report().all_ok;
  return {std::move(ensemble), std::move(ledger), std::move(metrics)};
}

}  // namespace pdpsgd
