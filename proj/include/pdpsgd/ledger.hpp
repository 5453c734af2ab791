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
// Per-user privacy budget bookkeeping across training rounds.
//
// Epsilon accounting: a user sampled in a round is charged that round's
// epsilon cost against their remaining budget, clamped at zero. Delta
// accounting: every user accumulates probability mass pi_i per round whether
// or not they were sampled, because the Bernoulli participation draw itself
// leaks with probability pi_i; the accumulated delta is that mass times the
// base delta, and stays within round_cap * base_delta as long as no more
// than round_cap rounds are charged.

#ifndef PDPSGD_LEDGER_HPP_
#define PDPSGD_LEDGER_HPP_

#include <span>
#include <vector>

#include "pdpsgd/rdp.hpp"
#include "pdpsgd/sampling.hpp"

namespace pdpsgd {

struct RemainingBudget {
  int user_id = 0;
  double epsilon = 0.0;
};

struct UserGuarantee {
  int user_id = 0;
  double spent_epsilon = 0.0;
  double budget_epsilon = 0.0;
  double accumulated_delta = 0.0;
  double delta_bound = 0.0;
  bool ok = false;
};

struct GuaranteeReport {
  std::vector<UserGuarantee> users;
  bool all_ok = false;
};

class BudgetLedger {
 public:
  // Budgets are initialized from the per-user epsilons in `spec`; user ids
  // must be exactly 0..n-1 in order. `round_cap` bounds how many rounds may
  // ever be charged.
  BudgetLedger(const PrivacySpec& spec, int round_cap);

  int user_count() const { return static_cast<int>(initial_.size()); }
  int rounds_elapsed() const { return rounds_elapsed_; }
  int round_cap() const { return round_cap_; }

  double remaining_epsilon(int user_id) const;
  double spent_epsilon(int user_id) const;

  // Users with remaining budget strictly above zero.
  std::vector<RemainingBudget> active_budgets() const;

  // Charges one round: every sampled user pays `epsilon_spent` (clamped at
  // their remaining budget), and every user in the plan accrues
  // pi_i * base_delta of delta, sampled or not. Throws RoundCapError once
  // round_cap rounds have been charged.
  void charge_round(std::span<const int> sampled_ids, double epsilon_spent,
                    const SamplingPlan& plan, double base_delta);

  // Per-user check that spending stayed within budget and accumulated delta
  // within round_cap * base_delta. As long as every charge used the spec's
  // base delta the delta verdict is computed on the accumulated pi mass
  // (each round adds at most 1), so it cannot misreport through float
  // roundoff; charges at other deltas fall back to comparing the plain sum.
  GuaranteeReport guarantee_report() const;

 private:
  std::vector<double> initial_;
  std::vector<double> remaining_;
  std::vector<double> pi_mass_;   // sum of per-round inclusion probabilities
  std::vector<double> acc_delta_; // sum of pi * delta as charged
  double base_delta_ = 0.0;
  bool uniform_delta_ = true;
  int round_cap_ = 0;
  int rounds_elapsed_ = 0;
};

}  // namespace pdpsgd

#endif  // PDPSGD_LEDGER_HPP_
