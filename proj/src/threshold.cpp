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

#include "pdpsgd/threshold.hpp"

#include <algorithm>
#include <stdexcept>

#include "pdpsgd/errors.hpp"
#include "pdpsgd/sampling.hpp"

namespace pdpsgd {

WasteComponents waste_components(std::span<const double> budgets, double tau) {
  if (budgets.empty()) {
    throw std::invalid_argument("budget list must be non-empty");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("tau must be positive");
  }
  const auto [lo, hi] = std::minmax_element(budgets.begin(), budgets.end());
  if (tau < *lo || tau > *hi) {
    throw std::invalid_argument("tau must lie within the budget range");
  }
  WasteComponents waste;
  for (double epsilon : budgets) {
    if (epsilon < tau) {
      waste.under += epsilon * (1.0 - sampling_probability(epsilon, tau));
    } else if (epsilon > tau) {
      waste.over += epsilon - tau;
    }
  }
  return waste;
}

double fixed_loss(const WasteComponents& waste, double w1, double w2) {
  if (!(w1 >= 0.0) || !(w2 >= 0.0)) {
    throw std::invalid_argument("loss weights must be non-negative");
  }
  return w1 * waste.under + w2 * waste.over;
}

double adaptive_loss(const WasteComponents& waste) {
  const double total = waste.under + waste.over;
  if (total == 0.0) return 0.0;
  return 2.0 * waste.under * waste.over / total;
}

ThresholdChoice optimize_threshold(std::span<const double> budgets,
                                   ThresholdLoss loss, double w1, double w2,
                                   int grid_points) {
  if (budgets.empty()) {
    throw std::invalid_argument("budget list must be non-empty");
  }
  if (grid_points < 2) {
    throw std::invalid_argument("grid must have at least 2 points");
  }
  for (double epsilon : budgets) {
    if (!(epsilon >= 0.0)) {
      throw std::invalid_argument("budgets must be non-negative");
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(budgets.begin(),
                                                  budgets.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi <= 0.0) {
    throw BudgetExhaustedError(
        "all budgets are zero; no positive threshold exists");
  }

  ThresholdChoice best;
  bool found = false;
  for (int i = 0; i < grid_points; ++i) {
    // Clamped so endpoint roundoff cannot push tau outside [lo, hi].
    const double tau = std::clamp(
        lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1), lo, hi);
    // tau = 0 can only occur at the first grid point when the smallest
    // budget is zero; the sampling probability is undefined there.
    if (!(tau > 0.0)) continue;
    const WasteComponents waste = waste_components(budgets, tau);
    const double value = loss == ThresholdLoss::kFixed
                             ? fixed_loss(waste, w1, w2)
                             : adaptive_loss(waste);
    // <= keeps later (larger) tau on ties.
    if (!found || value <= best.loss) {
      best.tau = tau;
      best.loss = value;
      found = true;
    }
  }
  if (!found) {
    throw BudgetExhaustedError(
        "no positive threshold available on the search grid");
  }
  return best;
}

}  // namespace pdpsgd
