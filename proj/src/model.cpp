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

#include "pdpsgd/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdpsgd/rng.hpp"

namespace pdpsgd {
namespace {

// Flat parameter layout.
// Logistic:   W (classes x features), b (classes).
// One hidden: W1 (hidden x features), b1 (hidden),
//             W2 (classes x hidden), b2 (classes).
struct Layout {
  std::size_t w1 = 0;
  std::size_t b1 = 0;
  std::size_t w2 = 0;
  std::size_t b2 = 0;
  std::size_t total = 0;
};

Layout layout_of(const ModelSpec& spec) {
  const std::size_t d = static_cast<std::size_t>(spec.num_features);
  const std::size_t m = static_cast<std::size_t>(spec.num_classes);
  Layout l;
  if (spec.kind == ModelKind::kLogistic) {
    l.w1 = 0;
    l.b1 = m * d;
    l.total = m * d + m;
  } else {
    const std::size_t h = static_cast<std::size_t>(spec.hidden_width);
    l.w1 = 0;
    l.b1 = h * d;
    l.w2 = h * d + h;
    l.b2 = h * d + h + m * h;
    l.total = h * d + h + m * h + m;
  }
  return l;
}

void validate_spec(const ModelSpec& spec) {
  if (spec.num_features < 1 || spec.num_classes < 2) {
    throw std::invalid_argument(
        "model needs at least 1 feature and 2 classes");
  }
  if (spec.kind == ModelKind::kOneHidden && spec.hidden_width < 1) {
    throw std::invalid_argument("hidden width must be positive");
  }
}

void ensure_scratch(const ModelSpec& spec, ModelScratch& scratch) {
  const std::size_t m = static_cast<std::size_t>(spec.num_classes);
  if (scratch.probs.size() != m) scratch.probs.resize(m);
  if (spec.kind == ModelKind::kOneHidden) {
    const std::size_t h = static_cast<std::size_t>(spec.hidden_width);
    if (scratch.hidden_pre.size() != h) scratch.hidden_pre.resize(h);
    if (scratch.hidden_act.size() != h) scratch.hidden_act.resize(h);
  }
}

// Fills scratch.probs with softmax(logits) and returns the loss for `label`
// (or 0 when label < 0, for prediction-only calls).
double forward(const ModelParams& params, std::span<const double> x,
               int label, ModelScratch& scratch) {
  const ModelSpec& spec = params.spec;
  const Layout l = layout_of(spec);
  const std::size_t d = static_cast<std::size_t>(spec.num_features);
  const std::size_t m = static_cast<std::size_t>(spec.num_classes);
  const double* theta = params.values.data();

  if (spec.kind == ModelKind::kLogistic) {
    for (std::size_t c = 0; c < m; ++c) {
      double z = theta[l.b1 + c];
      const double* row = theta + l.w1 + c * d;
      for (std::size_t j = 0; j < d; ++j) z += row[j] * x[j];
      scratch.probs[c] = z;
    }
  } else {
    const std::size_t h = static_cast<std::size_t>(spec.hidden_width);
    for (std::size_t k = 0; k < h; ++k) {
      double z = theta[l.b1 + k];
      const double* row = theta + l.w1 + k * d;
      for (std::size_t j = 0; j < d; ++j) z += row[j] * x[j];
      scratch.hidden_pre[k] = z;
      scratch.hidden_act[k] = z > 0.0 ? z : 0.0;
    }
    for (std::size_t c = 0; c < m; ++c) {
      double z = theta[l.b2 + c];
      const double* row = theta + l.w2 + c * h;
      for (std::size_t k = 0; k < h; ++k) z += row[k] * scratch.hidden_act[k];
      scratch.probs[c] = z;
    }
  }

  // Stable softmax over the logits currently stored in probs.
  double max_logit = scratch.probs[0];
  for (std::size_t c = 1; c < m; ++c) {
    max_logit = std::max(max_logit, scratch.probs[c]);
  }
  double denom = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    scratch.probs[c] = std::exp(scratch.probs[c] - max_logit);
    denom += scratch.probs[c];
  }
  double loss = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    scratch.probs[c] /= denom;
    if (static_cast<int>(c) == label) {
      loss = -std::log(std::max(scratch.probs[c], 1e-300));
    }
  }
  return loss;
}

void validate_example(const ModelParams& params, std::span<const double> x,
                      int label, bool need_label) {
  validate_spec(params.spec);
  if (params.values.size() != params.spec.param_count()) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  if (x.size() != static_cast<std::size_t>(params.spec.num_features)) {
    throw std::invalid_argument("feature vector has the wrong length");
  }
  if (need_label && (label < 0 || label >= params.spec.num_classes)) {
    throw std::invalid_argument("label out of range");
  }
}

}  // namespace

std::size_t ModelSpec::param_count() const {
  return layout_of(*this).total;
}

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  ModelParams params;
  params.spec = spec;
  params.values.assign(spec.param_count(), 0.0);
  Rng rng = make_rng(seed, 0x696e6974ULL);  // init stream
  const Layout l = layout_of(spec);
  const std::size_t d = static_cast<std::size_t>(spec.num_features);

  const auto fill_uniform = [&](std::size_t begin, std::size_t count,
                                std::size_t fan_in) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < count; ++i) {
      params.values[begin + i] = (2.0 * uniform01(rng) - 1.0) * scale;
    }
  };

  if (spec.kind == ModelKind::kLogistic) {
    fill_uniform(l.w1, l.b1 - l.w1, d);
  } else {
    const std::size_t h = static_cast<std::size_t>(spec.hidden_width);
    fill_uniform(l.w1, l.b1 - l.w1, d);
    fill_uniform(l.w2, l.b2 - l.w2, h);
  }
  return params;
}

void class_probabilities(const ModelParams& params, std::span<const double> x,
                         ModelScratch& scratch, std::span<double> probs_out) {
  validate_example(params, x, -1, false);
  if (probs_out.size() != static_cast<std::size_t>(params.spec.num_classes)) {
    throw std::invalid_argument("probability output has the wrong length");
  }
  ensure_scratch(params.spec, scratch);
  forward(params, x, -1, scratch);
  std::copy(scratch.probs.begin(), scratch.probs.end(), probs_out.begin());
}

double example_loss(const ModelParams& params, std::span<const double> x,
                    int label, ModelScratch& scratch) {
  validate_example(params, x, label, true);
  ensure_scratch(params.spec, scratch);
  return forward(params, x, label, scratch);
}

double example_gradient(const ModelParams& params, std::span<const double> x,
                        int label, ModelScratch& scratch,
                        std::span<double> grad_out) {
  validate_example(params, x, label, true);
  if (grad_out.size() != params.spec.param_count()) {
    throw std::invalid_argument("gradient output has the wrong length");
  }
  ensure_scratch(params.spec, scratch);
  const double loss = forward(params, x, label, scratch);

  const ModelSpec& spec = params.spec;
  const Layout l = layout_of(spec);
  const std::size_t d = static_cast<std::size_t>(spec.num_features);
  const std::size_t m = static_cast<std::size_t>(spec.num_classes);
  const double* theta = params.values.data();
  double* grad = grad_out.data();

  // dL/dlogit_c = p_c - [c == label]
  if (spec.kind == ModelKind::kLogistic) {
    for (std::size_t c = 0; c < m; ++c) {
      const double dz =
          scratch.probs[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
      double* row = grad + l.w1 + c * d;
      for (std::size_t j = 0; j < d; ++j) row[j] = dz * x[j];
      grad[l.b1 + c] = dz;
    }
  } else {
    const std::size_t h = static_cast<std::size_t>(spec.hidden_width);
    for (std::size_t c = 0; c < m; ++c) {
      const double dz =
          scratch.probs[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
      double* row = grad + l.w2 + c * h;
      for (std::size_t k = 0; k < h; ++k) row[k] = dz * scratch.hidden_act[k];
      grad[l.b2 + c] = dz;
    }
    for (std::size_t k = 0; k < h; ++k) {
      double da = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        const double dz =
            scratch.probs[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
        da += dz * theta[l.w2 + c * h + k];
      }
      const double dpre = scratch.hidden_pre[k] > 0.0 ? da : 0.0;
      double* row = grad + l.w1 + k * d;
      for (std::size_t j = 0; j < d; ++j) row[j] = dpre * x[j];
      grad[l.b1 + k] = dpre;
    }
  }
  return loss;
}

int predict_example(const ModelParams& params, std::span<const double> x,
                    ModelScratch& scratch) {
  validate_example(params, x, -1, false);
  ensure_scratch(params.spec, scratch);
  forward(params, x, -1, scratch);
  int best = 0;
  for (int c = 1; c < params.spec.num_classes; ++c) {
    if (scratch.probs[static_cast<std::size_t>(c)] >
        scratch.probs[static_cast<std::size_t>(best)]) {
      best = c;
    }
  }
  return best;
}

}  // namespace pdpsgd
