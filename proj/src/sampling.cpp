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

#include "pdpsgd/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "pdpsgd/rng.hpp"

namespace pdpsgd {
namespace {

// Bernoulli(rate) with rate 0 and 1 resolved without touching the stream.
bool bernoulli(double rate, Rng& rng) {
  if (rate <= 0.0) return false;
  if (rate >= 1.0) return true;
  return uniform01(rng) <= rate;
}

}  // namespace

double sampling_probability(double epsilon, double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("tau must be positive");
  }
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be non-negative");
  }
  if (epsilon >= tau) return 1.0;
  return std::expm1(epsilon) / std::expm1(tau);
}

SamplingPlan sampling_probabilities(std::span<const double> budgets,
                                    double tau) {
  SamplingPlan plan;
  plan.tau = tau;
  plan.probabilities.reserve(budgets.size());
  for (double epsilon : budgets) {
    plan.probabilities.push_back(sampling_probability(epsilon, tau));
  }
  return plan;
}

std::vector<int> round_sample(std::span<const int> indices,
                              const SamplingPlan& plan, std::uint64_t seed) {
  if (indices.size() != plan.probabilities.size()) {
    throw std::invalid_argument(
        "indices and plan probabilities differ in length");
  }
  Rng rng = make_rng(seed);
  std::vector<int> sampled;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (bernoulli(plan.probabilities[i], rng)) sampled.push_back(indices[i]);
  }
  return sampled;
}

std::vector<std::vector<int>> poisson_batches(std::span<const int> indices,
                                              std::span<const double> rates,
                                              int n_batches,
                                              std::uint64_t seed) {
  if (indices.size() != rates.size()) {
    throw std::invalid_argument("indices and rates differ in length");
  }
  if (n_batches < 0) {
    throw std::invalid_argument("batch count must be non-negative");
  }
  for (double r : rates) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw std::invalid_argument("rates must lie in [0, 1]");
    }
  }
  Rng rng = make_rng(seed);
  std::vector<std::vector<int>> batches(static_cast<std::size_t>(n_batches));
  for (auto& batch : batches) {
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (bernoulli(rates[i], rng)) batch.push_back(indices[i]);
    }
  }
  return batches;
}

}  // namespace pdpsgd
