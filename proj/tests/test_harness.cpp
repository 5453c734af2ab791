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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdpsgd/dataset.hpp"
#include "pdpsgd/errors.hpp"
#include "pdpsgd/experiment.hpp"
#include "pdpsgd/trainer.hpp"

using namespace pdpsgd;

namespace {

const std::filesystem::path kTmp = "harness_test_tmp";

struct TmpDir {
  TmpDir() { std::filesystem::create_directories(kTmp); }
  ~TmpDir() { std::filesystem::remove_all(kTmp); }
};

// A small, fast synthetic setup shared by the end-to-end cases.
ExperimentConfig small_experiment() {
  ExperimentConfig config;
  config.synthetic_n = 60;
  config.synthetic_test_n = 30;
  config.synthetic_dim = 4;
  config.synthetic_classes = 2;
  config.synthetic_separation = 6.0;
  config.dataset_seed = 9;
  config.eps_lo = 0.5;
  config.eps_hi = 1.0;
  config.n_groups = 3;
  config.train.learning_rate = 0.3;
  config.train.batch_size = 16;
  config.train.rounds = 2;
  config.train.epochs_per_round = 1;
  config.seeds = 2;
  config.base_seed = 5;
  return config;
}

std::string serialize(const std::map<std::string, std::string>& items) {
  std::ostringstream out;
  for (const auto& [key, value] : items) {
    out << key << " = " << value << "\n";
  }
  return out.str();
}

std::vector<std::string> split_fields(const std::string& row) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(row);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  return fields;
}

void check_same_outcomes(const ExperimentResult& a, const ExperimentResult& b) {
  REQUIRE(a.outcomes.size() == b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    CHECK(a.outcomes[i].seed_index == b.outcomes[i].seed_index);
    CHECK(a.outcomes[i].error == b.outcomes[i].error);
    const RunMetrics& ma = a.outcomes[i].metrics;
    const RunMetrics& mb = b.outcomes[i].metrics;
    CHECK(ma.rounds.size() == mb.rounds.size());
    CHECK(ma.total_iterations == mb.total_iterations);
    CHECK(ma.total_epsilon == mb.total_epsilon);
    CHECK(ma.final_train_accuracy == mb.final_train_accuracy);
    CHECK(ma.final_test_accuracy == mb.final_test_accuracy);
    CHECK(ma.guarantee_ok == mb.guarantee_ok);
  }
  CHECK(a.mean_test_accuracy == b.mean_test_accuracy);
  CHECK(a.std_test_accuracy == b.std_test_accuracy);
  CHECK(a.mean_total_iterations == b.mean_total_iterations);
  CHECK(a.guarantee_all_ok == b.guarantee_all_ok);
  CHECK(a.errors == b.errors);
}

// An experiment result with fixed numbers, for exact report expectations.
ExperimentResult handmade_result() {
  ExperimentResult result;
  result.config.algorithm = Algorithm::kPdpsgdFixed;
  result.config.seeds = 2;

  SeedOutcome ok;
  ok.seed_index = 0;
  RoundRecord first;
  first.round = 1;
  first.tau = 0.5;
  first.sigma = 1.25;
  first.epsilon_spent = 0.4;
  first.sampled = 40;
  first.iterations = 10;
  first.train_accuracy = 0.9;
  first.test_accuracy = 0.8;
  first.wall_ms = 3.0;
  RoundRecord second = first;
  second.round = 2;
  second.tau = 0.25;
  second.epsilon_spent = 0.2;
  second.wall_ms = 2.5;
  ok.metrics.rounds = {first, second};
  ok.metrics.total_iterations = 20;
  ok.metrics.total_epsilon = 0.65;
  ok.metrics.final_train_accuracy = 0.9;
  ok.metrics.final_test_accuracy = 0.8;
  ok.metrics.guarantee_ok = true;
  ok.wall_ms = 5.5;

  SeedOutcome bad;
  bad.seed_index = 1;
  bad.error = "boom";
  bad.wall_ms = 0.25;

  result.outcomes = {ok, bad};
  result.mean_test_accuracy = 0.8;
  result.std_test_accuracy = 0.0;
  result.mean_total_iterations = 20.0;
  result.guarantee_all_ok = true;
  result.errors = 1;
  return result;
}

}  // namespace

TEST_CASE("config text parses keys, comments, and whitespace") {
  const std::string text =
      "# experiment setup\n"
      "\n"
      "  dataset = synthetic  \n"
      "synthetic-n=120\n"
      "synthetic-test-n = 40\n"
      "synthetic-dim = 6\n"
      "synthetic-classes = 3\n"
      "synthetic-separation = 4.5\n"
      "dataset-seed = 77\n"
      "eps-lo = 0.25\n"
      "eps-hi = 1.5\n"
      "skew = -0.2\n"
      "n-groups = 10\n"
      "algorithm = dpsgd\n"
      "dpsgd-epsilon = 0.75\n"
      "model = hidden\n"
      "hidden-width = 32\n"
      "learning-rate = 0.05\n"
      "clip-norm = 2\n"
      "batch-size = 8\n"
      "rounds = 3\n"
      "epochs-per-round = 2\n"
      "delta = 1e-6\n"
      "tolerance = 0.005\n"
      "loss = adaptive\n"
      "w1 = 0.6\n"
      "w2 = 0.4\n"
      "grid-points = 101\n"
      "round-cap = 4\n"
      "initial-noise-multiplier = 2.5\n"
      "instrument-clipping = true\n"
      "seeds = 4\n"
      "seed = 99\n"
      "output = out/my results\n";

  const ExperimentConfig config = parse_config_text(text);
  CHECK(config.dataset == "synthetic");
  CHECK(config.synthetic_n == 120);
  CHECK(config.synthetic_test_n == 40);
  CHECK(config.synthetic_dim == 6);
  CHECK(config.synthetic_classes == 3);
  CHECK(config.synthetic_separation == 4.5);
  CHECK(config.dataset_seed == 77);
  CHECK(config.eps_lo == 0.25);
  CHECK(config.eps_hi == 1.5);
  CHECK(config.skew == -0.2);
  CHECK(config.n_groups == 10);
  CHECK(config.algorithm == Algorithm::kDpsgd);
  CHECK(config.dpsgd_epsilon == 0.75);
  CHECK(config.train.model == ModelKind::kOneHidden);
  CHECK(config.train.hidden_width == 32);
  CHECK(config.train.learning_rate == 0.05);
  CHECK(config.train.clip_norm == 2.0);
  CHECK(config.train.batch_size == 8);
  CHECK(config.train.rounds == 3);
  CHECK(config.train.epochs_per_round == 2);
  CHECK(config.train.delta == 1e-6);
  CHECK(config.train.tolerance == 0.005);
  CHECK(config.train.loss == ThresholdLoss::kAdaptive);
  CHECK(config.train.w1 == 0.6);
  CHECK(config.train.w2 == 0.4);
  CHECK(config.train.grid_points == 101);
  CHECK(config.train.round_cap == 4);
  CHECK(config.train.initial_noise_multiplier == 2.5);
  CHECK(config.train.instrument_clipping);
  CHECK(config.seeds == 4);
  CHECK(config.base_seed == 99);
  CHECK(config.output == "out/my results");
}

TEST_CASE("empty config text keeps the defaults") {
  const ExperimentConfig config = parse_config_text("# only comments\n\n");
  const ExperimentConfig defaults;
  CHECK(config_items(config) == config_items(defaults));
}

TEST_CASE("algorithm defaults never stomp explicit keys") {
  SUBCASE("explicit weight listed before the algorithm") {
    const ExperimentConfig config = parse_config_text(
        "w1 = 0.9\n"
        "algorithm = adapdp\n");
    CHECK(config.algorithm == Algorithm::kAdapdp);
    CHECK(config.train.loss == ThresholdLoss::kFixed);
    CHECK(config.train.w1 == 0.9);
    CHECK(config.train.w2 == 0.8);
  }

  SUBCASE("explicit loss listed before the algorithm") {
    const ExperimentConfig config = parse_config_text(
        "loss = adaptive\n"
        "algorithm = sampling\n");
    CHECK(config.train.loss == ThresholdLoss::kAdaptive);
    CHECK(config.train.w1 == 0.5);
    CHECK(config.train.w2 == 0.5);
  }

  SUBCASE("algorithm alone applies its defaults") {
    const ExperimentConfig adapdp =
        parse_config_text("algorithm = adapdp\n");
    CHECK(adapdp.train.loss == ThresholdLoss::kFixed);
    CHECK(adapdp.train.w1 == 0.2);
    CHECK(adapdp.train.w2 == 0.8);

    const ExperimentConfig adaptive =
        parse_config_text("algorithm = pdpsgd-adaptive\n");
    CHECK(adaptive.train.loss == ThresholdLoss::kAdaptive);
  }
}

TEST_CASE("config parse errors name the offending input") {
  CHECK_THROWS_WITH_AS(parse_config_text("just words\n"),
                       "config line 1: expected key = value", FormatError);
  CHECK_THROWS_WITH_AS(parse_config_text("a = 1\n\n= 5\n"),
                       "config line 3: empty key", FormatError);
  CHECK_THROWS_WITH_AS(parse_config_text("bogus = 1\n"),
                       "unknown config key: 'bogus'", FormatError);
  CHECK_THROWS_WITH_AS(parse_config_text("eps-lo = abc\n"),
                       "config key 'eps-lo': not a number: 'abc'",
                       FormatError);
  CHECK_THROWS_WITH_AS(parse_config_text("rounds = 2.5\n"),
                       "config key 'rounds': not an integer: '2.5'",
                       FormatError);
  CHECK_THROWS_WITH_AS(parse_config_text("seed = abc\n"),
                       "config key 'seed': not an unsigned integer: 'abc'",
                       FormatError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("instrument-clipping = maybe\n"),
      "config key 'instrument-clipping': not a boolean: 'maybe'", FormatError);
  CHECK_THROWS_WITH_AS(parse_config_text("algorithm = sgd\n"),
                       "unknown algorithm: 'sgd'", FormatError);
  CHECK_THROWS_WITH_AS(parse_config_text("model = linear\n"),
                       "config key 'model': expected logistic or hidden",
                       FormatError);
  CHECK_THROWS_WITH_AS(parse_config_text("loss = quadratic\n"),
                       "config key 'loss': expected fixed or adaptive",
                       FormatError);
  CHECK_THROWS_WITH_AS(parse_config_text("dataset = csv\n"),
                       "config key 'dataset': expected synthetic or idx",
                       FormatError);
}

TEST_CASE("config items round trip through the parser") {
  ExperimentConfig config;
  apply_override(config, "algorithm", "adapdp");
  apply_override(config, "eps-lo", "0.25");
  apply_override(config, "eps-hi", "2");
  apply_override(config, "skew", "0.2");
  apply_override(config, "model", "hidden");
  apply_override(config, "learning-rate", "0.125");
  apply_override(config, "seeds", "7");
  apply_override(config, "output", "runs/cell");

  const std::map<std::string, std::string> items = config_items(config);
  CHECK(items.at("algorithm") == "adapdp");
  CHECK(items.at("eps-lo") == "0.25");
  CHECK(items.at("eps-hi") == "2");
  CHECK(items.at("skew") == "0.2");
  CHECK(items.at("model") == "hidden");
  CHECK(items.at("learning-rate") == "0.125");
  CHECK(items.at("w1") == "0.2");
  CHECK(items.at("w2") == "0.8");
  CHECK(items.at("seeds") == "7");
  CHECK(items.at("output") == "runs/cell");

  // Echoed items parse back to an identical configuration.
  const ExperimentConfig reparsed = parse_config_text(serialize(items));
  CHECK(config_items(reparsed) == items);
}

TEST_CASE("config files load like inline text") {
  TmpDir tmp;
  const std::string path = (kTmp / "exp.conf").string();
  const std::string text = "algorithm = sampling\nseeds = 2\neps-hi = 2\n";
  {
    std::ofstream out(path);
    out << text;
  }
  const ExperimentConfig from_file = load_config(path);
  const ExperimentConfig from_text = parse_config_text(text);
  CHECK(config_items(from_file) == config_items(from_text));

  CHECK_THROWS_WITH_AS(load_config((kTmp / "missing.conf").string()),
                       "harness_test_tmp/missing.conf: cannot open config "
                       "file",
                       FormatError);
}

TEST_CASE("synthetic datasets split out of one draw") {
  const ExperimentConfig config = small_experiment();
  const auto [train, test] = load_datasets(config);
  REQUIRE(train.size() == 60);
  REQUIRE(test.size() == 30);
  CHECK(train.num_features == 4);
  CHECK(test.num_features == 4);
  CHECK(train.num_classes == 2);

  // Train and test are the leading and trailing rows of a single draw, so
  // they share one global feature scaling.
  const LabeledDataset all = synthetic_dataset(90, 4, 2, 6.0, 9);
  for (int i = 0; i < 60; ++i) {
    CHECK(std::equal(train.example(i).begin(), train.example(i).end(),
                     all.example(i).begin()));
    CHECK(train.labels[static_cast<std::size_t>(i)] ==
          all.labels[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < 30; ++i) {
    CHECK(std::equal(test.example(i).begin(), test.example(i).end(),
                     all.example(60 + i).begin()));
    CHECK(test.labels[static_cast<std::size_t>(i)] ==
          all.labels[static_cast<std::size_t>(60 + i)]);
  }

  SUBCASE("zero test rows give an empty but shaped test set") {
    ExperimentConfig no_test = config;
    no_test.synthetic_test_n = 0;
    const auto [train2, test2] = load_datasets(no_test);
    CHECK(train2.size() == 60);
    CHECK(test2.size() == 0);
    CHECK(test2.num_features == 4);
  }

  SUBCASE("invalid sizes and kinds are rejected") {
    ExperimentConfig bad = config;
    bad.synthetic_n = 0;
    CHECK_THROWS_AS(load_datasets(bad), std::invalid_argument);
    bad = config;
    bad.dataset = "weird";
    CHECK_THROWS_WITH_AS(load_datasets(bad),
                         "unknown dataset kind: 'weird'", FormatError);
  }
}

TEST_CASE("idx datasets load through the config") {
  TmpDir tmp;
  LabeledDataset source;
  source.num_features = 3;
  source.num_classes = 2;
  // Feature values on the byte grid so the round trip is exact.
  source.features = {0.0,       1.0 / 255, 2.0 / 255, 1.0,      128.0 / 255,
                     64.0 / 255, 0.0,      0.0,       255.0 / 255};
  source.labels = {0, 1, 0};
  const std::string images = (kTmp / "train-images.idx").string();
  const std::string labels = (kTmp / "train-labels.idx").string();
  write_idx(source, images, labels, 3, 1);

  ExperimentConfig config;
  config.dataset = "idx";
  config.idx_images = images;
  config.idx_labels = labels;

  SUBCASE("train only") {
    const auto [train, test] = load_datasets(config);
    CHECK(train.features == source.features);
    CHECK(train.labels == source.labels);
    CHECK(test.size() == 0);
    CHECK(test.num_features == 3);
  }

  SUBCASE("separate test pair") {
    config.idx_test_images = images;
    config.idx_test_labels = labels;
    const auto [train, test] = load_datasets(config);
    CHECK(test.features == source.features);
    CHECK(test.labels == source.labels);
  }
}

TEST_CASE("privacy specs mirror the configured budgets") {
  ExperimentConfig config = small_experiment();
  config.skew = 0.2;
  config.train.delta = 1e-6;
  config.train.round_cap = 8;

  const PrivacySpec spec = build_privacy_spec(config, 60);
  const std::vector<double> expected =
      generate_epsilons(60, 0.2, 0.5, 1.0, 3);
  REQUIRE(spec.users.size() == 60);
  CHECK(spec.base_delta == 1e-6);
  for (std::size_t i = 0; i < spec.users.size(); ++i) {
    CHECK(spec.users[i].user_id == static_cast<int>(i));
    CHECK(spec.users[i].epsilon == expected[i]);
    CHECK(spec.users[i].delta == 8e-6);
  }
}

TEST_CASE("experiments run every seed and aggregate the outcomes") {
  const ExperimentConfig config = small_experiment();
  const ExperimentResult result = run_experiment(config);

  REQUIRE(result.outcomes.size() == 2);
  double sum = 0.0;
  double sum_sq = 0.0;
  double iters = 0.0;
  for (int s = 0; s < 2; ++s) {
    const SeedOutcome& outcome = result.outcomes[static_cast<std::size_t>(s)];
    REQUIRE(outcome.ok());
    CHECK(outcome.seed_index == s);
    CHECK(outcome.metrics.total_iterations > 0);
    CHECK(outcome.metrics.guarantee_ok);
    CHECK(outcome.wall_ms > 0.0);
    const double acc = outcome.metrics.final_test_accuracy;
    sum += acc;
    sum_sq += acc * acc;
    iters += static_cast<double>(outcome.metrics.total_iterations);
  }
  CHECK(result.errors == 0);
  CHECK(result.guarantee_all_ok);
  CHECK(result.mean_test_accuracy == sum / 2);
  CHECK(result.mean_total_iterations == iters / 2);
  const double var = (sum_sq - sum * sum / 2) / 1;
  CHECK(result.std_test_accuracy == (var > 0.0 ? std::sqrt(var) : 0.0));

  SUBCASE("runs are reproducible") {
    const ExperimentResult again = run_experiment(config);
    check_same_outcomes(result, again);
  }

  SUBCASE("each seed matches a direct training call") {
    const auto [train, test] = load_datasets(config);
    const PrivacySpec spec = build_privacy_spec(config, train.size());
    TrainConfig direct = config.train;
    direct.loss = ThresholdLoss::kFixed;
    direct.seed = config.base_seed + 1;
    const PdpResult expected = train_pdpsgd(train, test, spec, direct);
    const RunMetrics& got = result.outcomes[1].metrics;
    CHECK(got.final_test_accuracy == expected.metrics.final_test_accuracy);
    CHECK(got.final_train_accuracy == expected.metrics.final_train_accuracy);
    CHECK(got.total_epsilon == expected.metrics.total_epsilon);
    CHECK(got.total_iterations == expected.metrics.total_iterations);
  }

  SUBCASE("per seed failures are recorded, not thrown") {
    ExperimentConfig bad = config;
    bad.train.rounds = 11;
    bad.train.round_cap = 10;
    const ExperimentResult failed = run_experiment(bad);
    REQUIRE(failed.outcomes.size() == 2);
    for (const SeedOutcome& outcome : failed.outcomes) {
      CHECK(!outcome.ok());
      CHECK(outcome.error == "rounds must not exceed the ledger round cap");
    }
    CHECK(failed.errors == 2);
    CHECK(failed.mean_test_accuracy == 0.0);
    CHECK(failed.mean_total_iterations == 0.0);
  }

  SUBCASE("seed count is validated") {
    ExperimentConfig bad = config;
    bad.seeds = 0;
    CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
  }
}

TEST_CASE("experiments cover every algorithm") {
  ExperimentConfig config = small_experiment();
  config.seeds = 1;
  for (const char* name :
       {"pdpsgd-fixed", "pdpsgd-adaptive", "dpsgd", "sampling", "adapdp"}) {
    CAPTURE(name);
    apply_override(config, "algorithm", name);
    const ExperimentResult result = run_experiment(config);
    REQUIRE(result.outcomes.size() == 1);
    CHECK(result.outcomes[0].ok());
    CHECK(result.guarantee_all_ok);
  }
}

TEST_CASE("csv rows render one line per surviving round") {
  CHECK(std::string(kCsvHeader) ==
        "algorithm,seed,round,tau,sigma,epsilon_spent,train_acc,test_acc,"
        "iterations,wall_ms,guarantee_ok");

  const ExperimentResult result = handmade_result();
  const std::vector<std::string> rows = csv_rows(result);
  // The errored seed contributes nothing.
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "pdpsgd-fixed,0,1,0.5,1.25,0.4,0.9,0.8,10,3.000,true");
  CHECK(rows[1] == "pdpsgd-fixed,0,2,0.25,1.25,0.2,0.9,0.8,10,2.500,true");

  for (const std::string& row : rows) {
    CHECK(split_fields(row).size() == 11);
  }
}

TEST_CASE("csv rows agree with live experiment records") {
  const ExperimentConfig config = small_experiment();
  const ExperimentResult result = run_experiment(config);
  const std::vector<std::string> rows = csv_rows(result);

  std::size_t expected_rows = 0;
  for (const SeedOutcome& outcome : result.outcomes) {
    if (outcome.ok()) expected_rows += outcome.metrics.rounds.size();
  }
  REQUIRE(rows.size() == expected_rows);

  std::size_t r = 0;
  for (const SeedOutcome& outcome : result.outcomes) {
    for (const RoundRecord& round : outcome.metrics.rounds) {
      const std::vector<std::string> fields = split_fields(rows[r++]);
      REQUIRE(fields.size() == 11);
      CHECK(fields[0] == "pdpsgd-fixed");
      CHECK(std::stoi(fields[1]) == outcome.seed_index);
      CHECK(std::stoi(fields[2]) == round.round);
      CHECK(std::stod(fields[3]) ==
            doctest::Approx(round.tau).epsilon(1e-9));
      CHECK(std::stod(fields[4]) ==
            doctest::Approx(round.sigma).epsilon(1e-9));
      CHECK(std::stod(fields[5]) ==
            doctest::Approx(round.epsilon_spent).epsilon(1e-9));
      CHECK(std::stol(fields[8]) == round.iterations);
      CHECK(fields[10] ==
            (outcome.metrics.guarantee_ok ? "true" : "false"));
    }
  }
}

TEST_CASE("experiment reports are written atomically") {
  TmpDir tmp;
  const ExperimentResult result = handmade_result();

  SUBCASE("csv file") {
    const std::string path = (kTmp / "metrics.csv").string();
    write_experiment_csv(result, path);
    CHECK(!std::filesystem::exists(path + ".tmp"));

    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string expected =
        std::string(kCsvHeader) + "\n" +
        "pdpsgd-fixed,0,1,0.5,1.25,0.4,0.9,0.8,10,3.000,true\n" +
        "pdpsgd-fixed,0,2,0.25,1.25,0.2,0.9,0.8,10,2.500,true\n";
    CHECK(buffer.str() == expected);
  }

  SUBCASE("json file") {
    const std::string path = (kTmp / "summary.json").string();
    write_experiment_json(result, path);
    CHECK(!std::filesystem::exists(path + ".tmp"));

    std::ifstream in(path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    const std::string stamp = doc.at("generated_at");
    REQUIRE(stamp.size() == 20);
    CHECK(stamp[10] == 'T');
    CHECK(stamp.back() == 'Z');

    const auto& experiment = doc.at("experiment");
    CHECK(experiment.at("algorithm") == "pdpsgd-fixed");
    CHECK(experiment.at("seeds") == 2);
    CHECK(experiment.at("errors") == 1);
    CHECK(experiment.at("guarantee_all_ok") == true);
    CHECK(experiment.at("mean_test_accuracy") == 0.8);
    const auto& per_seed = experiment.at("per_seed");
    REQUIRE(per_seed.size() == 2);
    CHECK(per_seed[0].at("error").is_null());
    CHECK(per_seed[0].at("rounds") == 2);
    CHECK(per_seed[0].at("guarantee_ok") == true);
    CHECK(per_seed[1].at("error") == "boom");
    CHECK(experiment.at("config").at("algorithm") == "pdpsgd-fixed");
    CHECK(experiment.at("config").at("eps-lo") == "0.5");
  }

  SUBCASE("unwritable paths raise a format error") {
    const std::string path = (kTmp / "no_dir" / "metrics.csv").string();
    CHECK_THROWS_AS(write_experiment_csv(result, path), FormatError);
  }
}

TEST_CASE("sweeps rerun the experiment per value") {
  ExperimentConfig base = small_experiment();
  base.seeds = 1;

  SUBCASE("single value sweep equals one run") {
    const std::vector<double> values = {0.0};
    const SweepResult sweep =
        run_sweep(base, SweepKind::kSkew, values, 1);
    REQUIRE(sweep.cells.size() == 1);
    CHECK(sweep.cells[0].value == 0.0);
    ExperimentConfig direct = base;
    direct.skew = 0.0;
    check_same_outcomes(sweep.cells[0].result, run_experiment(direct));
  }

  SUBCASE("weight sweep pins the fixed loss algorithm") {
    base.algorithm = Algorithm::kPdpsgdAdaptive;
    base.train.loss = ThresholdLoss::kAdaptive;
    const std::vector<double> values = {0.3, 0.7};
    const SweepResult sweep =
        run_sweep(base, SweepKind::kWeight, values, 1);
    REQUIRE(sweep.cells.size() == 2);
    for (std::size_t i = 0; i < sweep.cells.size(); ++i) {
      const ExperimentConfig& cell = sweep.cells[i].result.config;
      CHECK(cell.algorithm == Algorithm::kPdpsgdFixed);
      CHECK(cell.train.loss == ThresholdLoss::kFixed);
      CHECK(cell.train.w1 == values[i]);
      CHECK(cell.train.w2 == 1.0 - values[i]);
    }
  }

  SUBCASE("interval sweep moves the upper budget") {
    const std::vector<double> values = {0.1, 0.5};
    const SweepResult sweep =
        run_sweep(base, SweepKind::kInterval, values, 1);
    REQUIRE(sweep.cells.size() == 2);
    CHECK(sweep.cells[0].result.config.eps_hi == base.eps_lo + 0.1);
    CHECK(sweep.cells[1].result.config.eps_hi == base.eps_lo + 0.5);
  }

  SUBCASE("parallel cells match serial cells") {
    const std::vector<double> values = {-0.2, 0.0, 0.2};
    const SweepResult serial =
        run_sweep(base, SweepKind::kSkew, values, 1);
    const SweepResult parallel =
        run_sweep(base, SweepKind::kSkew, values, 3);
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
      CHECK(serial.cells[i].value == parallel.cells[i].value);
      check_same_outcomes(serial.cells[i].result, parallel.cells[i].result);
    }
  }

  SUBCASE("whole cell failures become errored outcomes") {
    ExperimentConfig broken = base;
    broken.dataset = "idx";
    broken.idx_images = "missing-images.idx";
    broken.idx_labels = "missing-labels.idx";
    const std::vector<double> values = {0.0};
    const SweepResult sweep =
        run_sweep(broken, SweepKind::kSkew, values, 1);
    REQUIRE(sweep.cells.size() == 1);
    const ExperimentResult& cell = sweep.cells[0].result;
    CHECK(cell.errors == 1);
    REQUIRE(cell.outcomes.size() == 1);
    CHECK(cell.outcomes[0].error == "missing-images.idx: cannot open file");
  }

  SUBCASE("arguments are validated") {
    const std::vector<double> none;
    CHECK_THROWS_AS(run_sweep(base, SweepKind::kSkew, none, 1),
                    std::invalid_argument);
    const std::vector<double> one = {0.0};
    CHECK_THROWS_AS(run_sweep(base, SweepKind::kSkew, one, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("sweep reports carry cell markers and values") {
  TmpDir tmp;
  SweepResult sweep;
  sweep.kind = SweepKind::kSkew;
  SweepCell lo;
  lo.value = -0.2;
  lo.result = handmade_result();
  SweepCell hi;
  hi.value = 0.2;
  hi.result = handmade_result();
  sweep.cells = {lo, hi};

  SUBCASE("csv groups rows under one header") {
    const std::string path = (kTmp / "sweep.csv").string();
    write_sweep_csv(sweep, path);
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    std::size_t headers = 0;
    std::size_t pos = 0;
    while ((pos = content.find("algorithm,seed", pos)) != std::string::npos) {
      ++headers;
      ++pos;
    }
    CHECK(headers == 1);
    CHECK(content.find("# cell: skew=-0.2\n") != std::string::npos);
    CHECK(content.find("# cell: skew=0.2\n") != std::string::npos);
    CHECK(content.find("# cell: skew=-0.2") <
          content.find("# cell: skew=0.2"));
  }

  SUBCASE("json lists one entry per cell") {
    const std::string path = (kTmp / "sweep.json").string();
    write_sweep_json(sweep, path);
    std::ifstream in(path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc.at("sweep") == "skew");
    const auto& cells = doc.at("cells");
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].at("value") == -0.2);
    CHECK(cells[1].at("value") == 0.2);
    CHECK(cells[0].at("experiment").at("algorithm") == "pdpsgd-fixed");
  }
}

TEST_CASE("names round trip for algorithms and sweep kinds") {
  for (Algorithm algorithm :
       {Algorithm::kPdpsgdFixed, Algorithm::kPdpsgdAdaptive, Algorithm::kDpsgd,
        Algorithm::kSampling, Algorithm::kAdapdp}) {
    CHECK(algorithm_from_name(algorithm_name(algorithm)) == algorithm);
  }
  CHECK_THROWS_WITH_AS(algorithm_from_name("sgd"), "unknown algorithm: 'sgd'",
                       FormatError);

  for (SweepKind kind :
       {SweepKind::kSkew, SweepKind::kWeight, SweepKind::kInterval}) {
    CHECK(sweep_kind_from_name(sweep_kind_name(kind)) == kind);
    CHECK(!default_sweep_values(kind).empty());
  }
  CHECK_THROWS_WITH_AS(sweep_kind_from_name("depth"),
                       "unknown sweep kind: 'depth'", FormatError);
}
