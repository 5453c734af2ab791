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

#include "pdpsgd/rdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pdpsgd {
namespace {

constexpr double kIntegerOrderTol = 1e-9;

double log_sum_exp(std::span<const double> values) {
  double max_val = -std::numeric_limits<double>::infinity();
  for (double v : values) max_val = std::max(max_val, v);
  if (!std::isfinite(max_val)) return max_val;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - max_val);
  return max_val + std::log(acc);
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

// One step of the subsampled Gaussian mechanism at integer order alpha >= 2:
// log E[(q e^{Z_1} + (1-q) e^{Z_0})^alpha] expanded binomially, where the
// j-th moment contributes exp((j^2 - j) / (2 sigma^2)).
double log_moment_one_step(int alpha, double q, double sigma) {
  std::vector<double> terms(static_cast<std::size_t>(alpha) + 1);
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  for (int j = 0; j <= alpha; ++j) {
    terms[static_cast<std::size_t>(j)] =
        log_binomial(alpha, j) + j * log_q + (alpha - j) * log_1mq +
        (static_cast<double>(j) * j - j) / (2.0 * sigma * sigma);
  }
  return log_sum_exp(terms);
}

void validate_orders(std::span<const double> orders) {
  if (orders.empty()) {
    throw std::invalid_argument("order grid must be non-empty");
  }
  double prev = 1.0;
  for (double alpha : orders) {
    if (!(alpha > prev)) {
      throw std::invalid_argument(
          "orders must be strictly increasing and greater than 1");
    }
    prev = alpha;
  }
}

bool is_integer_order(double alpha) {
  return std::abs(alpha - std::round(alpha)) <= kIntegerOrderTol;
}

}  // namespace

std::vector<double> default_orders() {
  std::vector<double> orders;
  orders.reserve(99 + 53);
  for (int x = 1; x <= 99; ++x) orders.push_back(1.0 + x / 10.0);
  for (int a = 12; a <= 64; ++a) orders.push_back(static_cast<double>(a));
  return orders;
}

std::vector<double> default_integer_orders() {
  std::vector<double> orders;
  orders.reserve(9 + 53);
  for (int a = 2; a <= 10; ++a) orders.push_back(static_cast<double>(a));
  for (int a = 12; a <= 64; ++a) orders.push_back(static_cast<double>(a));
  return orders;
}

RdpCurve subsampled_gaussian_rdp(double noise_multiplier, double sample_rate,
                                 long steps, std::span<const double> orders) {
  if (!(noise_multiplier > 0.0) || !std::isfinite(noise_multiplier)) {
    throw std::invalid_argument("noise multiplier must be positive");
  }
  if (!(sample_rate >= 0.0 && sample_rate <= 1.0)) {
    throw std::invalid_argument("sample rate must lie in [0, 1]");
  }
  if (steps < 1) {
    throw std::invalid_argument("steps must be at least 1");
  }
  validate_orders(orders);

  RdpCurve curve;
  if (sample_rate == 0.0) {
    curve.orders.assign(orders.begin(), orders.end());
    curve.costs.assign(orders.size(), 0.0);
    return curve;
  }
  if (sample_rate == 1.0) {
    curve.orders.assign(orders.begin(), orders.end());
    curve.costs.resize(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
      // Per-step cost first, then scaled, so the curve is exactly linear
      // in steps.
      const double rho =
          orders[i] / (2.0 * noise_multiplier * noise_multiplier);
      curve.costs[i] = static_cast<double>(steps) * rho;
    }
    return curve;
  }

  // Subsampled case: the bound is only valid at integer orders >= 2.
  for (double alpha : orders) {
    if (!is_integer_order(alpha) || alpha < 2.0 - kIntegerOrderTol) continue;
    const int a = static_cast<int>(std::lround(alpha));
    const double log_moment =
        log_moment_one_step(a, sample_rate, noise_multiplier);
    // The moment is >= 1 analytically; clamp away negative roundoff.
    const double rho = std::max(log_moment, 0.0) / (alpha - 1.0);
    curve.orders.push_back(alpha);
    curve.costs.push_back(steps * rho);
  }
  if (curve.orders.empty()) {
    throw std::invalid_argument(
        "no integer orders >= 2 available for the subsampled bound");
  }
  return curve;
}

RdpCurve compose(const RdpCurve& a, const RdpCurve& b) {
  if (a.orders != b.orders) {
    throw std::invalid_argument("cannot compose curves over different grids");
  }
  if (a.costs.size() != a.orders.size() || b.costs.size() != b.orders.size()) {
    throw std::invalid_argument("curve costs and orders differ in length");
  }
  RdpCurve out;
  out.orders = a.orders;
  out.costs.resize(a.costs.size());
  for (std::size_t i = 0; i < a.costs.size(); ++i) {
    out.costs[i] = a.costs[i] + b.costs[i];
  }
  return out;
}

DpGuarantee rdp_to_dp(const RdpCurve& curve, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (curve.orders.empty() || curve.costs.size() != curve.orders.size()) {
    throw std::invalid_argument("curve is empty or malformed");
  }
  const double log_inv_delta = std::log(1.0 / delta);
  DpGuarantee best;
  best.epsilon = std::numeric_limits<double>::infinity();
  best.delta = delta;
  for (std::size_t i = 0; i < curve.orders.size(); ++i) {
    const double alpha = curve.orders[i];
    if (!(alpha > 1.0)) {
      throw std::invalid_argument("orders must exceed 1");
    }
    if (!(curve.costs[i] >= 0.0)) {
      throw std::invalid_argument("curve costs must be non-negative");
    }
    const double eps = curve.costs[i] + log_inv_delta / (alpha - 1.0);
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.order = alpha;
    }
  }
  return best;
}

PrivacySpec irdp_to_pdp(double order, std::span<const double> rho,
                        std::span<const double> deltas) {
  if (!(order > 1.0)) {
    throw std::invalid_argument("order must exceed 1");
  }
  if (rho.size() != deltas.size() || rho.empty()) {
    throw std::invalid_argument(
        "rho and delta lists must be non-empty and equal in length");
  }
  PrivacySpec spec;
  spec.users.reserve(rho.size());
  spec.base_delta = 1.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] >= 0.0)) {
      throw std::invalid_argument("per-user rho must be non-negative");
    }
    if (!(deltas[i] > 0.0 && deltas[i] < 1.0)) {
      throw std::invalid_argument("per-user delta must lie in (0, 1)");
    }
    UserPrivacy user;
    user.user_id = static_cast<int>(i);
    user.epsilon = rho[i] + std::log(1.0 / deltas[i]) / (order - 1.0);
    user.delta = deltas[i];
    spec.users.push_back(user);
    spec.base_delta = std::min(spec.base_delta, deltas[i]);
  }
  return spec;
}

double gaussian_dp_sufficient_delta(double noise_multiplier, double epsilon) {
  if (!(noise_multiplier > 0.0)) {
    throw std::invalid_argument("noise multiplier must be positive");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::domain_error(
        "the sufficient condition only covers epsilon in (0, 1), got " +
        std::to_string(epsilon));
  }
  const double s = noise_multiplier * epsilon;
  return 0.8 * std::exp(-s * s / 2.0);
}

double analytic_gaussian_delta(double noise_multiplier, double epsilon) {
  if (!(noise_multiplier > 0.0)) {
    throw std::invalid_argument("noise multiplier must be positive");
  }
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be non-negative");
  }
  const double sigma = noise_multiplier;
  const auto norm_cdf = [](double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
  };
  const double a = 1.0 / (2.0 * sigma) - epsilon * sigma;
  const double b = -1.0 / (2.0 * sigma) - epsilon * sigma;
  const double delta = norm_cdf(a) - std::exp(epsilon) * norm_cdf(b);
  return std::clamp(delta, 0.0, 1.0);
}

}  // namespace pdpsgd
