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
// Noise multiplier calibration against an epsilon target, optionally on top
// of an accounting history of already-spent mechanism invocations.

#ifndef PDPSGD_CALIBRATION_HPP_
#define PDPSGD_CALIBRATION_HPP_

#include <span>
#include <vector>

#include "pdpsgd/rdp.hpp"

namespace pdpsgd {

// One already-executed block of subsampled Gaussian steps.
struct AccountingEntry {
  double noise_multiplier = 0.0;
  double sample_rate = 0.0;
  long steps = 0;
};

// Append-only record of past mechanism invocations.
class AccountingHistory {
 public:
  void append(double noise_multiplier, double sample_rate, long steps);
  std::span<const AccountingEntry> entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // Composed RDP curve of all entries over the given grid; zero cost when
  // the history is empty. Entries with a sample rate in (0, 1) require a
  // grid of integer orders >= 2.
  RdpCurve to_curve(std::span<const double> orders) const;

 private:
  std::vector<AccountingEntry> entries_;
};

// Result of a calibration: the chosen noise multiplier and the epsilon the
// accountant certifies for history plus the calibrated invocation.
struct Calibration {
  double noise_multiplier = 0.0;
  double achieved_epsilon = 0.0;
};

// Smallest noise multiplier (up to `tolerance` in epsilon) such that the
// history composed with `steps` further steps at `sample_rate` stays within
// (target_epsilon, target_delta)-DP. Found by exponential bracketing from
// sigma = 10 upward, then bisection against sigma = 0.
//
// Throws BudgetExhaustedError when no finite noise level can meet the target
// (the epsilon floor implied by the history and the conversion already
// reaches target_epsilon), and ConvergenceError if bisection fails to
// terminate within its iteration cap.
Calibration calibrate_noise_multiplier(double target_epsilon,
                                       double target_delta,
                                       double sample_rate, long steps,
                                       double tolerance,
                                       const AccountingHistory& history,
                                       std::span<const double> orders);

// Convenience overload using the default order grid.
Calibration calibrate_noise_multiplier(double target_epsilon,
                                       double target_delta,
                                       double sample_rate, long steps,
                                       double tolerance,
                                       const AccountingHistory& history);

// Wrapper returning just the noise multiplier.
double get_noise_multiplier(double target_epsilon, double target_delta,
                            double sample_rate, long steps, double tolerance,
                            const AccountingHistory& history);

}  // namespace pdpsgd

#endif  // PDPSGD_CALIBRATION_HPP_
