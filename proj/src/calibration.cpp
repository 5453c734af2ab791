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

#include "pdpsgd/calibration.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pdpsgd/errors.hpp"

namespace pdpsgd {
namespace {

constexpr int kMaxBisectIterations = 1000;
constexpr int kMaxDoublings = 200;

// True when any curve in the calibration is genuinely subsampled, which
// limits the usable grid to integer orders >= 2.
bool needs_integer_orders(double sample_rate, const AccountingHistory& history) {
  if (sample_rate < 1.0) return true;
  for (const AccountingEntry& entry : history.entries()) {
    if (entry.sample_rate > 0.0 && entry.sample_rate < 1.0) return true;
  }
  return false;
}

// Restricts a grid to the orders the subsampled bound can use. Applied to
// the history curve as well, so every curve in a calibration shares one grid.
std::vector<double> effective_orders(std::span<const double> orders,
                                     double sample_rate,
                                     const AccountingHistory& history) {
  if (!needs_integer_orders(sample_rate, history)) {
    return {orders.begin(), orders.end()};
  }
  std::vector<double> out;
  for (double alpha : orders) {
    if (std::abs(alpha - std::round(alpha)) <= 1e-9 && alpha >= 2.0 - 1e-9) {
      out.push_back(alpha);
    }
  }
  if (out.empty()) {
    throw std::invalid_argument(
        "no integer orders >= 2 available for the subsampled bound");
  }
  return out;
}

}  // namespace

void AccountingHistory::append(double noise_multiplier, double sample_rate,
                               long steps) {
  if (!(noise_multiplier > 0.0)) {
    throw std::invalid_argument("noise multiplier must be positive");
  }
  if (!(sample_rate >= 0.0 && sample_rate <= 1.0)) {
    throw std::invalid_argument("sample rate must lie in [0, 1]");
  }
  if (steps < 1) {
    throw std::invalid_argument("steps must be at least 1");
  }
  entries_.push_back({noise_multiplier, sample_rate, steps});
}

RdpCurve AccountingHistory::to_curve(std::span<const double> orders) const {
  RdpCurve total;
  total.orders.assign(orders.begin(), orders.end());
  total.costs.assign(orders.size(), 0.0);
  for (const AccountingEntry& entry : entries_) {
    total = compose(total, subsampled_gaussian_rdp(entry.noise_multiplier,
                                                   entry.sample_rate,
                                                   entry.steps, total.orders));
  }
  return total;
}

Calibration calibrate_noise_multiplier(double target_epsilon,
                                       double target_delta,
                                       double sample_rate, long steps,
                                       double tolerance,
                                       const AccountingHistory& history,
                                       std::span<const double> orders) {
  if (!(target_epsilon > 0.0)) {
    throw std::invalid_argument("target epsilon must be positive");
  }
  if (!(target_delta > 0.0 && target_delta < 1.0)) {
    throw std::invalid_argument("target delta must lie in (0, 1)");
  }
  if (!(sample_rate > 0.0 && sample_rate <= 1.0)) {
    throw std::invalid_argument("sample rate must lie in (0, 1]");
  }
  if (steps < 1) {
    throw std::invalid_argument("steps must be at least 1");
  }
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("tolerance must be positive");
  }

  const std::vector<double> grid =
      effective_orders(orders, sample_rate, history);
  const RdpCurve history_curve = history.to_curve(grid);

  const auto epsilon_at = [&](double sigma) {
    const RdpCurve round =
        subsampled_gaussian_rdp(sigma, sample_rate, steps, grid);
    return rdp_to_dp(compose(history_curve, round), target_delta).epsilon;
  };

  // Epsilon cannot drop below what the history plus the conversion overhead
  // already cost, no matter how large sigma gets.
  const double floor = rdp_to_dp(history_curve, target_delta).epsilon;
  if (floor >= target_epsilon) {
    throw BudgetExhaustedError(
        "target epsilon " + std::to_string(target_epsilon) +
        " is not reachable: accounting floor is " + std::to_string(floor));
  }

  double high = 10.0;
  double eps_high = epsilon_at(high);
  int doublings = 0;
  while (eps_high > target_epsilon) {
    high *= 2.0;
    eps_high = epsilon_at(high);
    if (++doublings > kMaxDoublings) {
      throw BudgetExhaustedError(
          "no finite noise multiplier reaches target epsilon " +
          std::to_string(target_epsilon));
    }
  }

  double low = 0.0;
  int iterations = 0;
  while (target_epsilon - eps_high > tolerance) {
    if (++iterations > kMaxBisectIterations) {
      throw ConvergenceError("noise calibration failed to converge within " +
                             std::to_string(kMaxBisectIterations) +
                             " bisection iterations");
    }
    const double mid = 0.5 * (low + high);
    const double eps_mid = epsilon_at(mid);
    if (eps_mid > target_epsilon) {
      low = mid;
    } else {
      high = mid;
      eps_high = eps_mid;
    }
  }
  return {high, eps_high};
}

Calibration calibrate_noise_multiplier(double target_epsilon,
                                       double target_delta,
                                       double sample_rate, long steps,
                                       double tolerance,
                                       const AccountingHistory& history) {
  const std::vector<double> orders = default_orders();
  return calibrate_noise_multiplier(target_epsilon, target_delta, sample_rate,
                                    steps, tolerance, history, orders);
}

double get_noise_multiplier(double target_epsilon, double target_delta,
                            double sample_rate, long steps, double tolerance,
                            const AccountingHistory& history) {
  return calibrate_noise_multiplier(target_epsilon, target_delta, sample_rate,
                                    steps, tolerance, history)
      .noise_multiplier;
}

}  // namespace pdpsgd
