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

#include "pdpsgd/ledger.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "pdpsgd/errors.hpp"

namespace pdpsgd {

BudgetLedger::BudgetLedger(const PrivacySpec& spec, int round_cap) {
  if (round_cap < 1) {
    throw std::invalid_argument("round cap must be at least 1");
  }
  round_cap_ = round_cap;
  base_delta_ = spec.base_delta;
  if (!spec.users.empty() && !(base_delta_ > 0.0 && base_delta_ < 1.0)) {
    throw std::invalid_argument("base delta must lie in (0, 1)");
  }
  initial_.reserve(spec.users.size());
  for (std::size_t i = 0; i < spec.users.size(); ++i) {
    const UserPrivacy& user = spec.users[i];
    if (user.user_id != static_cast<int>(i)) {
      throw std::invalid_argument("user ids must be 0..n-1 in order");
    }
    if (!(user.epsilon >= 0.0)) {
      throw std::invalid_argument("user budgets must be non-negative");
    }
    initial_.push_back(user.epsilon);
  }
  remaining_ = initial_;
  pi_mass_.assign(initial_.size(), 0.0);
  acc_delta_.assign(initial_.size(), 0.0);
}

double BudgetLedger::remaining_epsilon(int user_id) const {
  if (user_id < 0 || user_id >= user_count()) {
    throw std::invalid_argument("user id out of range");
  }
  return remaining_[static_cast<std::size_t>(user_id)];
}

double BudgetLedger::spent_epsilon(int user_id) const {
  if (user_id < 0 || user_id >= user_count()) {
    throw std::invalid_argument("user id out of range");
  }
  const std::size_t i = static_cast<std::size_t>(user_id);
  return initial_[i] - remaining_[i];
}

std::vector<RemainingBudget> BudgetLedger::active_budgets() const {
  std::vector<RemainingBudget> active;
  for (std::size_t i = 0; i < remaining_.size(); ++i) {
    if (remaining_[i] > 0.0) {
      active.push_back({static_cast<int>(i), remaining_[i]});
    }
  }
  return active;
}

void BudgetLedger::charge_round(std::span<const int> sampled_ids,
                                double epsilon_spent, const SamplingPlan& plan,
                                double base_delta) {
  if (rounds_elapsed_ >= round_cap_) {
    throw RoundCapError("round cap of " + std::to_string(round_cap_) +
                        " rounds already reached");
  }
  if (!(epsilon_spent >= 0.0)) {
    throw std::invalid_argument("epsilon spent must be non-negative");
  }
  if (!(base_delta > 0.0 && base_delta < 1.0)) {
    throw std::invalid_argument("base delta must lie in (0, 1)");
  }
  if (plan.probabilities.size() != initial_.size()) {
    throw std::invalid_argument("plan does not cover every ledger user");
  }
  std::vector<char> seen(initial_.size(), 0);
  for (int id : sampled_ids) {
    if (id < 0 || id >= user_count()) {
      throw std::invalid_argument("sampled user id out of range");
    }
    if (seen[static_cast<std::size_t>(id)]++) {
      throw std::invalid_argument("sampled user ids must be unique");
    }
  }

  for (int id : sampled_ids) {
    const std::size_t i = static_cast<std::size_t>(id);
    remaining_[i] = std::max(remaining_[i] - epsilon_spent, 0.0);
  }
  if (base_delta != base_delta_) uniform_delta_ = false;
  for (std::size_t i = 0; i < initial_.size(); ++i) {
    pi_mass_[i] += plan.probabilities[i];
    acc_delta_[i] += plan.probabilities[i] * base_delta;
  }
  ++rounds_elapsed_;
}

GuaranteeReport BudgetLedger::guarantee_report() const {
  GuaranteeReport report;
  report.all_ok = true;
  const double cap = static_cast<double>(round_cap_);
  for (std::size_t i = 0; i < initial_.size(); ++i) {
    UserGuarantee user;
    user.user_id = static_cast<int>(i);
    user.spent_epsilon = initial_[i] - remaining_[i];
    user.budget_epsilon = initial_[i];
    user.delta_bound = cap * base_delta_;
    const bool spent_ok = user.spent_epsilon <= initial_[i];
    bool delta_ok;
    if (uniform_delta_) {
      user.accumulated_delta = pi_mass_[i] * base_delta_;
      delta_ok = pi_mass_[i] <= cap;
    } else {
      user.accumulated_delta = acc_delta_[i];
      delta_ok = acc_delta_[i] <= user.delta_bound;
    }
    user.ok = spent_ok && delta_ok;
    report.all_ok = report.all_ok && user.ok;
    report.users.push_back(user);
  }
  return report;
}

}  // namespace pdpsgd
