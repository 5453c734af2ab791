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
// Batch compute kernels. Each kernel has a serial reference and an OpenMP
// variant; both accumulate per-example gradients in fixed 8-example blocks
// added in block order, so results are bitwise identical regardless of
// thread count, and the serial reference doubles as a correctness oracle.

#ifndef PDPSGD_KERNELS_HPP_
#define PDPSGD_KERNELS_HPP_

#include <span>

#include "pdpsgd/dataset.hpp"
#include "pdpsgd/model.hpp"

namespace pdpsgd {

// Accumulation block size shared by the serial and parallel kernels.
inline constexpr int kAccumBlock = 8;

// Sum over the batch of per-example gradients clipped to L2 norm
// <= clip_norm, written to sum_out (length param_count, overwritten).
// When max_clipped_norm is non-null it receives the largest recomputed L2
// norm among the clipped per-example gradients, for instrumentation.
void clipped_gradient_sum_serial(const ModelParams& params,
                                 const LabeledDataset& data,
                                 std::span<const int> batch, double clip_norm,
                                 std::span<double> sum_out,
                                 double* max_clipped_norm = nullptr);

void clipped_gradient_sum_parallel(const ModelParams& params,
                                   const LabeledDataset& data,
                                   std::span<const int> batch,
                                   double clip_norm, std::span<double> sum_out,
                                   double* max_clipped_norm = nullptr);

// Dispatches to the parallel kernel when OpenMP is available.
void clipped_gradient_sum(const ModelParams& params, const LabeledDataset& data,
                          std::span<const int> batch, double clip_norm,
                          std::span<double> sum_out,
                          double* max_clipped_norm = nullptr);

// Number of examples in `subset` whose predicted class matches the label.
long count_correct_serial(const ModelParams& params, const LabeledDataset& data,
                          std::span<const int> subset);

long count_correct_parallel(const ModelParams& params,
                            const LabeledDataset& data,
                            std::span<const int> subset);

long count_correct(const ModelParams& params, const LabeledDataset& data,
                   std::span<const int> subset);

// Accuracy over the whole dataset.
double dataset_accuracy(const ModelParams& params, const LabeledDataset& data);

}  // namespace pdpsgd

#endif  // PDPSGD_KERNELS_HPP_
