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

#include "pdpsgd/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include <json.hpp>

#include "pdpsgd/errors.hpp"
#include "pdpsgd/rng.hpp"

namespace pdpsgd {
namespace {

using Json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw FormatError("config key '" + key + "': not a number: '" + value +
                      "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long parsed = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw FormatError("config key '" + key + "': not an integer: '" + value +
                      "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long parsed = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(parsed);
  } catch (const std::exception&) {
    throw FormatError("config key '" + key + "': not an unsigned integer: '" +
                      value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw FormatError("config key '" + key + "': not a boolean: '" + value +
                    "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Loss and weight defaults implied by the algorithm choice; explicit loss,
// w1, or w2 keys override them afterwards.
void apply_algorithm_defaults(ExperimentConfig& config) {
  switch (config.algorithm) {
    case Algorithm::kPdpsgdFixed:
      config.train.loss = ThresholdLoss::kFixed;
      config.train.w1 = 0.7;
      config.train.w2 = 0.3;
      break;
    case Algorithm::kPdpsgdAdaptive:
      config.train.loss = ThresholdLoss::kAdaptive;
      break;
    case Algorithm::kSampling:
      config.train.loss = ThresholdLoss::kFixed;
      config.train.w1 = 0.5;
      config.train.w2 = 0.5;
      break;
    case Algorithm::kAdapdp:
      config.train.loss = ThresholdLoss::kFixed;
      config.train.w1 = 0.2;
      config.train.w2 = 0.8;
      break;
    case Algorithm::kDpsgd:
      break;
  }
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

void write_text_atomically(const std::string& path,
                           const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) {
      throw FormatError(tmp + ": cannot open file for writing");
    }
    out << content;
    if (!out) {
      throw FormatError(tmp + ": write failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

Json experiment_summary_json(const ExperimentResult& result) {
  Json per_seed = Json::array();
  for (const SeedOutcome& outcome : result.outcomes) {
    Json entry;
    entry["seed"] = outcome.seed_index;
    if (outcome.ok()) {
      entry["final_test_accuracy"] = outcome.metrics.final_test_accuracy;
      entry["final_train_accuracy"] = outcome.metrics.final_train_accuracy;
      entry["total_iterations"] = outcome.metrics.total_iterations;
      entry["total_epsilon"] = outcome.metrics.total_epsilon;
      entry["rounds"] = outcome.metrics.rounds.size();
      entry["guarantee_ok"] = outcome.metrics.guarantee_ok;
      entry["error"] = nullptr;
    } else {
      entry["error"] = outcome.error;
    }
    entry["wall_ms"] = outcome.wall_ms;
    per_seed.push_back(entry);
  }
  Json summary;
  summary["algorithm"] = algorithm_name(result.config.algorithm);
  summary["seeds"] = result.config.seeds;
  summary["mean_test_accuracy"] = result.mean_test_accuracy;
  summary["std_test_accuracy"] = result.std_test_accuracy;
  summary["mean_total_iterations"] = result.mean_total_iterations;
  summary["guarantee_all_ok"] = result.guarantee_all_ok;
  summary["errors"] = result.errors;
  summary["per_seed"] = per_seed;
  Json config;
  for (const auto& [key, value] : config_items(result.config)) {
    config[key] = value;
  }
  summary["config"] = config;
  return summary;
}

}  // namespace

const char kCsvHeader[] =
    "algorithm,seed,round,tau,sigma,epsilon_spent,train_acc,test_acc,"
    "iterations,wall_ms,guarantee_ok";

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kPdpsgdFixed:
      return "pdpsgd-fixed";
    case Algorithm::kPdpsgdAdaptive:
      return "pdpsgd-adaptive";
    case Algorithm::kDpsgd:
      return "dpsgd";
    case Algorithm::kSampling:
      return "sampling";
    case Algorithm::kAdapdp:
      return "adapdp";
  }
  throw std::invalid_argument("unknown algorithm enum value");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "pdpsgd-fixed") return Algorithm::kPdpsgdFixed;
  if (name == "pdpsgd-adaptive") return Algorithm::kPdpsgdAdaptive;
  if (name == "dpsgd") return Algorithm::kDpsgd;
  if (name == "sampling") return Algorithm::kSampling;
  if (name == "adapdp") return Algorithm::kAdapdp;
  throw FormatError("unknown algorithm: '" + name + "'");
}

void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value) {
  if (key == "dataset") {
    if (value != "synthetic" && value != "idx") {
      throw FormatError("config key 'dataset': expected synthetic or idx");
    }
    config.dataset = value;
  } else if (key == "synthetic-n") {
    config.synthetic_n = static_cast<int>(parse_long(key, value));
  } else if (key == "synthetic-test-n") {
    config.synthetic_test_n = static_cast<int>(parse_long(key, value));
  } else if (key == "synthetic-dim") {
    config.synthetic_dim = static_cast<int>(parse_long(key, value));
  } else if (key == "synthetic-classes") {
    config.synthetic_classes = static_cast<int>(parse_long(key, value));
  } else if (key == "synthetic-separation") {
    config.synthetic_separation = parse_double(key, value);
  } else if (key == "dataset-seed") {
    config.dataset_seed = parse_u64(key, value);
  } else if (key == "idx-images") {
    config.idx_images = value;
  } else if (key == "idx-labels") {
    config.idx_labels = value;
  } else if (key == "idx-test-images") {
    config.idx_test_images = value;
  } else if (key == "idx-test-labels") {
    config.idx_test_labels = value;
  } else if (key == "eps-lo") {
    config.eps_lo = parse_double(key, value);
  } else if (key == "eps-hi") {
    config.eps_hi = parse_double(key, value);
  } else if (key == "skew") {
    config.skew = parse_double(key, value);
  } else if (key == "n-groups") {
    config.n_groups = static_cast<int>(parse_long(key, value));
  } else if (key == "algorithm") {
    config.algorithm = algorithm_from_name(value);
    apply_algorithm_defaults(config);
  } else if (key == "dpsgd-epsilon") {
    config.dpsgd_epsilon = parse_double(key, value);
  } else if (key == "model") {
    if (value == "logistic") {
      config.train.model = ModelKind::kLogistic;
    } else if (value == "hidden") {
      config.train.model = ModelKind::kOneHidden;
    } else {
      throw FormatError("config key 'model': expected logistic or hidden");
    }
  } else if (key == "hidden-width") {
    config.train.hidden_width = static_cast<int>(parse_long(key, value));
  } else if (key == "learning-rate") {
    config.train.learning_rate = parse_double(key, value);
  } else if (key == "clip-norm") {
    config.train.clip_norm = parse_double(key, value);
  } else if (key == "batch-size") {
    config.train.batch_size = static_cast<int>(parse_long(key, value));
  } else if (key == "rounds") {
    config.train.rounds = static_cast<int>(parse_long(key, value));
  } else if (key == "epochs-per-round") {
    config.train.epochs_per_round = static_cast<int>(parse_long(key, value));
  } else if (key == "delta") {
    config.train.delta = parse_double(key, value);
  } else if (key == "tolerance") {
    config.train.tolerance = parse_double(key, value);
  } else if (key == "loss") {
    if (value == "fixed") {
      config.train.loss = ThresholdLoss::kFixed;
    } else if (value == "adaptive") {
      config.train.loss = ThresholdLoss::kAdaptive;
    } else {
      throw FormatError("config key 'loss': expected fixed or adaptive");
    }
  } else if (key == "w1") {
    config.train.w1 = parse_double(key, value);
  } else if (key == "w2") {
    config.train.w2 = parse_double(key, value);
  } else if (key == "grid-points") {
    config.train.grid_points = static_cast<int>(parse_long(key, value));
  } else if (key == "round-cap") {
    config.train.round_cap = static_cast<int>(parse_long(key, value));
  } else if (key == "initial-noise-multiplier") {
    config.train.initial_noise_multiplier = parse_double(key, value);
  } else if (key == "instrument-clipping") {
    config.train.instrument_clipping = parse_bool(key, value);
  } else if (key == "seeds") {
    config.seeds = static_cast<int>(parse_long(key, value));
  } else if (key == "seed") {
    config.base_seed = parse_u64(key, value);
  } else if (key == "output") {
    config.output = value;
  } else {
    throw FormatError("unknown config key: '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text,
                                   const ExperimentConfig& defaults) {
  std::vector<std::pair<std::string, std::string>> items;
  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_number) +
                        ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw FormatError("config line " + std::to_string(line_number) +
                        ": empty key");
    }
    items.emplace_back(key, value);
  }

  ExperimentConfig config = defaults;
  // The algorithm key is applied first so its loss/weight defaults never
  // stomp explicit settings, regardless of key order in the file.
  for (const auto& [key, value] : items) {
    if (key == "algorithm") apply_override(config, key, value);
  }
  for (const auto& [key, value] : items) {
    if (key != "algorithm") apply_override(config, key, value);
  }
  return config;
}

ExperimentConfig load_config(const std::string& path,
                             const ExperimentConfig& defaults) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError(path + ": cannot open config file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), defaults);
}

std::map<std::string, std::string> config_items(
    const ExperimentConfig& config) {
  std::map<std::string, std::string> items;
  items["dataset"] = config.dataset;
  items["synthetic-n"] = std::to_string(config.synthetic_n);
  items["synthetic-test-n"] = std::to_string(config.synthetic_test_n);
  items["synthetic-dim"] = std::to_string(config.synthetic_dim);
  items["synthetic-classes"] = std::to_string(config.synthetic_classes);
  items["synthetic-separation"] = format_double(config.synthetic_separation);
  items["dataset-seed"] = std::to_string(config.dataset_seed);
  items["idx-images"] = config.idx_images;
  items["idx-labels"] = config.idx_labels;
  items["idx-test-images"] = config.idx_test_images;
  items["idx-test-labels"] = config.idx_test_labels;
  items["eps-lo"] = format_double(config.eps_lo);
  items["eps-hi"] = format_double(config.eps_hi);
  items["skew"] = format_double(config.skew);
  items["n-groups"] = std::to_string(config.n_groups);
  items["algorithm"] = algorithm_name(config.algorithm);
  items["dpsgd-epsilon"] = format_double(config.dpsgd_epsilon);
  items["model"] =
      config.train.model == ModelKind::kLogistic ? "logistic" : "hidden";
  items["hidden-width"] = std::to_string(config.train.hidden_width);
  items["learning-rate"] = format_double(config.train.learning_rate);
  items["clip-norm"] = format_double(config.train.clip_norm);
  items["batch-size"] = std::to_string(config.train.batch_size);
  items["rounds"] = std::to_string(config.train.rounds);
  items["epochs-per-round"] = std::to_string(config.train.epochs_per_round);
  items["delta"] = format_double(config.train.delta);
  items["tolerance"] = format_double(config.train.tolerance);
  items["loss"] =
      config.train.loss == ThresholdLoss::kFixed ? "fixed" : "adaptive";
  items["w1"] = format_double(config.train.w1);
  items["w2"] = format_double(config.train.w2);
  items["grid-points"] = std::to_string(config.train.grid_points);
  items["round-cap"] = std::to_string(config.train.round_cap);
  items["initial-noise-multiplier"] =
      format_double(config.train.initial_noise_multiplier);
  items["instrument-clipping"] =
      config.train.instrument_clipping ? "true" : "false";
  items["seeds"] = std::to_string(config.seeds);
  items["seed"] = std::to_string(config.base_seed);
  items["output"] = config.output;
  return items;
}

std::pair<LabeledDataset, LabeledDataset> load_datasets(
    const ExperimentConfig& config) {
  if (config.dataset == "synthetic") {
    if (config.synthetic_n < 1 || config.synthetic_test_n < 0) {
      throw std::invalid_argument("synthetic sizes must be positive");
    }
    // One draw covers train and test so both share the min-max scaling.
    const int total = config.synthetic_n + config.synthetic_test_n;
    const LabeledDataset all = synthetic_dataset(
        total, config.synthetic_dim, config.synthetic_classes,
        config.synthetic_separation, config.dataset_seed);
    LabeledDataset train;
    train.num_features = all.num_features;
    train.num_classes = all.num_classes;
    LabeledDataset test = train;
    const std::size_t split = static_cast<std::size_t>(config.synthetic_n) *
                              static_cast<std::size_t>(all.num_features);
    train.features.assign(all.features.begin(),
                          all.features.begin() + static_cast<long>(split));
    test.features.assign(all.features.begin() + static_cast<long>(split),
                         all.features.end());
    train.labels.assign(all.labels.begin(),
                        all.labels.begin() + config.synthetic_n);
    test.labels.assign(all.labels.begin() + config.synthetic_n,
                       all.labels.end());
    return {std::move(train), std::move(test)};
  }
  if (config.dataset == "idx") {
    LabeledDataset train = load_idx(config.idx_images, config.idx_labels);
    LabeledDataset test;
    if (!config.idx_test_images.empty()) {
      test = load_idx(config.idx_test_images, config.idx_test_labels);
    } else {
      test.num_features = train.num_features;
      test.num_classes = train.num_classes;
    }
    return {std::move(train), std::move(test)};
  }
  throw FormatError("unknown dataset kind: '" + config.dataset + "'");
}

PrivacySpec build_privacy_spec(const ExperimentConfig& config, int n) {
  const std::vector<double> epsilons =
      generate_epsilons(n, config.skew, config.eps_lo, config.eps_hi,
                        config.n_groups);
  PrivacySpec spec;
  spec.base_delta = config.train.delta;
  spec.users.reserve(epsilons.size());
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    UserPrivacy user;
    user.user_id = static_cast<int>(i);
    user.epsilon = epsilons[i];
    user.delta = config.train.delta * config.train.round_cap;
    spec.users.push_back(user);
  }
  return spec;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.seeds < 1) {
    throw std::invalid_argument("seed count must be at least 1");
  }
  ExperimentResult result;
  result.config = config;

  const auto [train, test] = load_datasets(config);
  PrivacySpec spec;
  if (config.algorithm != Algorithm::kDpsgd) {
    spec = build_privacy_spec(config, train.size());
  }

  for (int s = 0; s < config.seeds; ++s) {
    TrainConfig train_config = config.train;
    train_config.seed = config.base_seed + static_cast<std::uint64_t>(s);
    switch (config.algorithm) {
      case Algorithm::kPdpsgdFixed:
        train_config.loss = ThresholdLoss::kFixed;
        break;
      case Algorithm::kPdpsgdAdaptive:
        train_config.loss = ThresholdLoss::kAdaptive;
        break;
      default:
        break;
    }

    SeedOutcome outcome;
    outcome.seed_index = s;
    const auto start = std::chrono::steady_clock::now();
    try {
      switch (config.algorithm) {
        case Algorithm::kPdpsgdFixed:
        case Algorithm::kPdpsgdAdaptive:
          outcome.metrics =
              train_pdpsgd(train, test, spec, train_config).metrics;
          break;
        case Algorithm::kDpsgd:
          outcome.metrics =
              train_dpsgd_uniform(train, test, config.dpsgd_epsilon,
                                  train_config)
                  .metrics;
          break;
        case Algorithm::kSampling:
          outcome.metrics =
              train_sampling_baseline(train, test, spec, train_config)
                  .metrics;
          break;
        case Algorithm::kAdapdp:
          outcome.metrics = train_adapdp(train, test, spec, train_config)
                                .metrics;
          break;
      }
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }
    outcome.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    result.outcomes.push_back(std::move(outcome));
  }

  double sum = 0.0;
  double sum_sq = 0.0;
  double iter_sum = 0.0;
  int ok_count = 0;
  for (const SeedOutcome& outcome : result.outcomes) {
    if (!outcome.ok()) {
      ++result.errors;
      continue;
    }
    const double acc = outcome.metrics.final_test_accuracy;
    sum += acc;
    sum_sq += acc * acc;
    iter_sum += static_cast<double>(outcome.metrics.total_iterations);
    result.guarantee_all_ok =
        result.guarantee_all_ok && outcome.metrics.guarantee_ok;
    ++ok_count;
  }
  if (ok_count > 0) {
    result.mean_test_accuracy = sum / ok_count;
    result.mean_total_iterations = iter_sum / ok_count;
  }
  if (ok_count > 1) {
    const double var =
        (sum_sq - sum * sum / ok_count) / (ok_count - 1);
    result.std_test_accuracy = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  return result;
}

std::string sweep_kind_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::kSkew:
      return "skew";
    case SweepKind::kWeight:
      return "weight";
    case SweepKind::kInterval:
      return "interval";
  }
  throw std::invalid_argument("unknown sweep kind");
}

SweepKind sweep_kind_from_name(const std::string& name) {
  if (name == "skew") return SweepKind::kSkew;
  if (name == "weight") return SweepKind::kWeight;
  if (name == "interval") return SweepKind::kInterval;
  throw FormatError("unknown sweep kind: '" + name + "'");
}

std::vector<double> default_sweep_values(SweepKind kind) {
  switch (kind) {
    case SweepKind::kSkew:
      return {-0.2, 0.0, 0.2};
    case SweepKind::kWeight:
      return {0.3, 0.5, 0.7, 0.9};
    case SweepKind::kInterval:
      return {0.1, 0.3, 0.5, 0.7, 0.9};
  }
  throw std::invalid_argument("unknown sweep kind");
}

SweepResult run_sweep(const ExperimentConfig& base, SweepKind kind,
                      std::span<const double> values, int jobs) {
  if (values.empty()) {
    throw std::invalid_argument("sweep needs at least one value");
  }
  if (jobs < 1) {
    throw std::invalid_argument("jobs must be at least 1");
  }

  std::vector<ExperimentConfig> configs;
  configs.reserve(values.size());
  for (double value : values) {
    ExperimentConfig cell = base;
    switch (kind) {
      case SweepKind::kSkew:
        cell.skew = value;
        break;
      case SweepKind::kWeight:
        cell.algorithm = Algorithm::kPdpsgdFixed;
        cell.train.loss = ThresholdLoss::kFixed;
        cell.train.w1 = value;
        cell.train.w2 = 1.0 - value;
        break;
      case SweepKind::kInterval:
        cell.eps_hi = cell.eps_lo + value;
        break;
    }
    configs.push_back(std::move(cell));
  }

  SweepResult sweep;
  sweep.kind = kind;
  sweep.cells.resize(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    sweep.cells[i].value = values[i];
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) break;
      try {
        sweep.cells[i].result = run_experiment(configs[i]);
      } catch (const std::exception& e) {
        // Whole-cell failures (such as unloadable datasets) become one
        // errored pseudo-seed so the sweep keeps going.
        ExperimentResult failed;
        failed.config = configs[i];
        SeedOutcome outcome;
        outcome.error = e.what();
        failed.outcomes.push_back(std::move(outcome));
        failed.errors = 1;
        sweep.cells[i].result = std::move(failed);
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), configs.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (std::thread& thread : threads) thread.join();
  }
  return sweep;
}

std::vector<std::string> csv_rows(const ExperimentResult& result) {
  std::vector<std::string> rows;
  const std::string name = algorithm_name(result.config.algorithm);
  for (const SeedOutcome& outcome : result.outcomes) {
    if (!outcome.ok()) continue;
    const char* verdict = outcome.metrics.guarantee_ok ? "true" : "false";
    for (const RoundRecord& round : outcome.metrics.rounds) {
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "%s,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%ld,%.3f,%s",
                    name.c_str(), outcome.seed_index, round.round, round.tau,
                    round.sigma, round.epsilon_spent, round.train_accuracy,
                    round.test_accuracy, round.iterations, round.wall_ms,
                    verdict);
      rows.push_back(buf);
    }
  }
  return rows;
}

void write_experiment_csv(const ExperimentResult& result,
                          const std::string& path) {
  std::string content = kCsvHeader;
  content += '\n';
  for (const std::string& row : csv_rows(result)) {
    content += row;
    content += '\n';
  }
  write_text_atomically(path, content);
}

void write_experiment_json(const ExperimentResult& result,
                           const std::string& path) {
  Json doc;
  doc["generated_at"] = iso8601_utc_now();
  doc["experiment"] = experiment_summary_json(result);
  write_text_atomically(path, doc.dump(2) + "\n");
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
  std::string content = kCsvHeader;
  content += '\n';
  const std::string kind = sweep_kind_name(sweep.kind);
  for (const SweepCell& cell : sweep.cells) {
    content += "# cell: " + kind + "=" + format_double(cell.value) + "\n";
    for (const std::string& row : csv_rows(cell.result)) {
      content += row;
      content += '\n';
    }
  }
  write_text_atomically(path, content);
}

void write_sweep_json(const SweepResult& sweep, const std::string& path) {
  Json cells = Json::array();
  for (const SweepCell& cell : sweep.cells) {
    Json entry;
    entry["value"] = cell.value;
    entry["experiment"] = experiment_summary_json(cell.result);
    cells.push_back(entry);
  }
  Json doc;
  doc["generated_at"] = iso8601_utc_now();
  doc["sweep"] = sweep_kind_name(sweep.kind);
  doc["cells"] = cells;
  write_text_atomically(path, doc.dump(2) + "\n");
}

}  // namespace pdpsgd
