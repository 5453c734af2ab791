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
// Small classifiers trained with per-example gradients: multinomial logistic
// regression and a one-hidden-layer ReLU network, both under softmax
// cross-entropy. Parameters live in one flat vector so the privacy kernels
// can clip and perturb them uniformly.

#ifndef PDPSGD_MODEL_HPP_
#define PDPSGD_MODEL_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace pdpsgd {

enum class ModelKind {
  kLogistic,
  kOneHidden,
};

struct ModelSpec {
  ModelKind kind = ModelKind::kLogistic;
  int num_features = 0;
  int num_classes = 0;
  int hidden_width = 64;  // used by kOneHidden only

  std::size_t param_count() const;
};

struct ModelParams {
  ModelSpec spec;
  std::vector<double> values;
};

// Reusable per-example buffers so gradient evaluation does not allocate.
struct ModelScratch {
  std::vector<double> hidden_pre;
  std::vector<double> hidden_act;
  std::vector<double> probs;
};

// Uniform init in +/- 1/sqrt(fan_in) per weight matrix; biases start at 0.
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed);

// Softmax class probabilities for one example, written to `probs_out`
// (length num_classes).
void class_probabilities(const ModelParams& params, std::span<const double> x,
                         ModelScratch& scratch, std::span<double> probs_out);

// Cross-entropy loss of one example.
double example_loss(const ModelParams& params, std::span<const double> x,
                    int label, ModelScratch& scratch);

// Gradient of the per-example loss with respect to every parameter, written
// to `grad_out` (length param_count). Returns the loss.
double example_gradient(const ModelParams& params, std::span<const double> x,
                        int label, ModelScratch& scratch,
                        std::span<double> grad_out);

// Predicted class (argmax of the logits; ties resolve to the smallest
// class index).
int predict_example(const ModelParams& params, std::span<const double> x,
                    ModelScratch& scratch);

}  // namespace pdpsgd

#endif  // PDPSGD_MODEL_HPP_
