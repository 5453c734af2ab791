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
// Renyi differential privacy accounting for the Poisson-subsampled Gaussian
// mechanism, plus conversions to (epsilon, delta) guarantees.

#ifndef PDPSGD_RDP_HPP_
#define PDPSGD_RDP_HPP_

#include <span>
#include <vector>

namespace pdpsgd {

// An RDP cost curve: cost rho(alpha) at each order alpha of a shared grid.
// Curves produced from the same order grid compose by element-wise addition.
struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> costs;
};

// A converted (epsilon, delta) guarantee together with the order that
// minimized the conversion.
struct DpGuarantee {
  double epsilon = 0.0;
  double delta = 0.0;
  double order = 0.0;
};

// Per-user privacy requirement.
struct UserPrivacy {
  int user_id = 0;
  double epsilon = 0.0;
  double delta = 0.0;
};

// A collection of per-user requirements sharing one base delta.
struct PrivacySpec {
  std::vector<UserPrivacy> users;
  double base_delta = 0.0;
};

// Default order grid: {1 + x/10 : x = 1..99} followed by {12, 13, ..., 64}.
std::vector<double> default_orders();

// Integer orders {2, ..., 10} and {12, ..., 64}; the subset of the default
// grid usable under subsampling, where the bound needs integer orders >= 2.
std::vector<double> default_integer_orders();

// RDP curve of `steps` rounds of the Gaussian mechanism with the given noise
// multiplier on a Poisson subsample of rate `sample_rate`. With rate 1 the
// closed form alpha / (2 sigma^2) applies at any order > 1; with rate in
// (0, 1) only integer orders >= 2 from `orders` are evaluated and the rest
// are dropped. Rate 0 yields zero cost everywhere.
RdpCurve subsampled_gaussian_rdp(double noise_multiplier, double sample_rate,
                                 long steps, std::span<const double> orders);

// Element-wise sum of curves over an identical order grid.
RdpCurve compose(const RdpCurve& a, const RdpCurve& b);

// Tightest (epsilon, delta) guarantee implied by the curve:
// min over alpha of rho(alpha) + log(1/delta) / (alpha - 1).
DpGuarantee rdp_to_dp(const RdpCurve& curve, double delta);

// Converts per-user RDP costs at one common order into per-user
// (epsilon_i, delta_i) requirements. The spec's base delta is the smallest
// per-user delta.
PrivacySpec irdp_to_pdp(double order, std::span<const double> rho,
                        std::span<const double> deltas);

// Classical sufficiency bound for the unamplified single-shot Gaussian
// mechanism at sensitivity 1: any delta strictly above
// (4/5) exp(-sigma^2 epsilon^2 / 2) certifies (epsilon, delta)-DP. Valid
// only for epsilon in (0, 1).
double gaussian_dp_sufficient_delta(double noise_multiplier, double epsilon);

// Exact delta(epsilon) of the single-shot Gaussian mechanism at unit
// sensitivity, used as an independent cross-check of the accountant:
// delta = Phi(1/(2 sigma) - epsilon sigma) - e^epsilon *
//         Phi(-1/(2 sigma) - epsilon sigma).
double analytic_gaussian_delta(double noise_multiplier, double epsilon);

}  // namespace pdpsgd

#endif  // PDPSGD_RDP_HPP_
