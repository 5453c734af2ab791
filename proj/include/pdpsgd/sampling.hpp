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
// Personalized participation sampling. A user with budget epsilon_i >= tau
// always participates; below tau the probability tapers as
// (e^{epsilon_i} - 1) / (e^{tau} - 1), which vanishes at zero budget.

#ifndef PDPSGD_SAMPLING_HPP_
#define PDPSGD_SAMPLING_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace pdpsgd {

// Per-user inclusion probabilities for one round.
struct SamplingPlan {
  double tau = 0.0;
  std::vector<double> probabilities;
};

double sampling_probability(double epsilon, double tau);

// Probabilities for a whole budget vector; requires tau > 0 and all budgets
// non-negative.
SamplingPlan sampling_probabilities(std::span<const double> budgets,
                                    double tau);

// One Bernoulli draw per user: indices[i] is included iff a uniform draw
// falls below plan.probabilities[i]. Probabilities at 0 or 1 short-circuit
// without consuming randomness, so adding or removing certain users does not
// shift the stream of the others.
std::vector<int> round_sample(std::span<const int> indices,
                              const SamplingPlan& plan, std::uint64_t seed);

// Poisson batch sampling: for each of `n_batches` batches, element i of
// `indices` is included independently with probability rates[i]. Exact 0 and
// 1 rates short-circuit as in round_sample.
std::vector<std::vector<int>> poisson_batches(std::span<const int> indices,
                                              std::span<const double> rates,
                                              int n_batches,
                                              std::uint64_t seed);

}  // namespace pdpsgd

#endif  // PDPSGD_SAMPLING_HPP_
