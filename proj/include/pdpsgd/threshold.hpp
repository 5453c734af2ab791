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
// Choosing the per-round epsilon threshold tau that the trainer calibrates
// noise against. Users below tau participate with probability < 1 and leave
// part of their budget unused ("under-spend waste"); users above tau cap out
// at tau and cannot spend the excess ("over-spend waste"). The threshold
// minimizes a scalar loss over these two waste totals.

#ifndef PDPSGD_THRESHOLD_HPP_
#define PDPSGD_THRESHOLD_HPP_

#include <span>

namespace pdpsgd {

struct WasteComponents {
  double under = 0.0;
  double over = 0.0;
};

struct ThresholdChoice {
  double tau = 0.0;
  double loss = 0.0;
};

enum class ThresholdLoss {
  kFixed,     // w1 * under + w2 * over
  kAdaptive,  // harmonic mean 2 * under * over / (under + over)
};

// Waste totals at threshold tau for the given budgets. Budgets strictly
// below tau contribute epsilon_i * (1 - pi_i) to `under`; budgets strictly
// above contribute epsilon_i - tau to `over`. Requires tau in
// [min budget, max budget] and tau > 0.
WasteComponents waste_components(std::span<const double> budgets, double tau);

double fixed_loss(const WasteComponents& waste, double w1, double w2);

// Harmonic mean of the two waste totals; defined as 0 when both vanish.
double adaptive_loss(const WasteComponents& waste);

// Grid search over `grid_points` equally spaced thresholds spanning
// [min budget, max budget]. Ties resolve toward the largest tau. Throws
// BudgetExhaustedError when every budget is zero (no positive tau exists).
ThresholdChoice optimize_threshold(std::span<const double> budgets,
                                   ThresholdLoss loss, double w1, double w2,
                                   int grid_points);

}  // namespace pdpsgd

#endif  // PDPSGD_THRESHOLD_HPP_
