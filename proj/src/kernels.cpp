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

#include "pdpsgd/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pdpsgd {
namespace {

void validate_batch(const LabeledDataset& data, std::span<const int> batch) {
  for (int idx : batch) {
    if (idx < 0 || idx >= data.size()) {
      throw std::invalid_argument("batch index out of range");
    }
  }
}

double l2_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

// Accumulates one block of clipped per-example gradients into block_sum
// (overwritten). Returns the largest recomputed post-clip norm in the block
// when track_norm is set, else 0.
double accumulate_block(const ModelParams& params, const LabeledDataset& data,
                        std::span<const int> block, double clip_norm,
                        ModelScratch& scratch, std::vector<double>& grad,
                        std::vector<double>& block_sum, bool track_norm) {
  std::fill(block_sum.begin(), block_sum.end(), 0.0);
  double max_norm = 0.0;
  for (int idx : block) {
    example_gradient(params, data.example(idx),
                     data.labels[static_cast<std::size_t>(idx)], scratch,
                     grad);
    const double norm = l2_norm(grad);
    const double scale = norm > clip_norm ? clip_norm / norm : 1.0;
    for (std::size_t j = 0; j < grad.size(); ++j) {
      const double clipped = scale * grad[j];
      grad[j] = clipped;
      block_sum[j] += clipped;
    }
    if (track_norm) max_norm = std::max(max_norm, l2_norm(grad));
  }
  return max_norm;
}

}  // namespace

void clipped_gradient_sum_serial(const ModelParams& params,
                                 const LabeledDataset& data,
                                 std::span<const int> batch, double clip_norm,
                                 std::span<double> sum_out,
                                 double* max_clipped_norm) {
  if (!(clip_norm > 0.0)) {
    throw std::invalid_argument("clip norm must be positive");
  }
  const std::size_t n_params = params.spec.param_count();
  if (sum_out.size() != n_params) {
    throw std::invalid_argument("sum output has the wrong length");
  }
  validate_batch(data, batch);
  std::fill(sum_out.begin(), sum_out.end(), 0.0);

  ModelScratch scratch;
  std::vector<double> grad(n_params);
  std::vector<double> block_sum(n_params);
  double max_norm = 0.0;
  for (std::size_t start = 0; start < batch.size(); start += kAccumBlock) {
    const std::size_t len = std::min<std::size_t>(kAccumBlock,
                                                  batch.size() - start);
    const double block_norm =
        accumulate_block(params, data, batch.subspan(start, len), clip_norm,
                         scratch, grad, block_sum,
                         max_clipped_norm != nullptr);
    for (std::size_t j = 0; j < n_params; ++j) sum_out[j] += block_sum[j];
    max_norm = std::max(max_norm, block_norm);
  }
  if (max_clipped_norm != nullptr) *max_clipped_norm = max_norm;
}

void clipped_gradient_sum_parallel(const ModelParams& params,
                                   const LabeledDataset& data,
                                   std::span<const int> batch,
                                   double clip_norm, std::span<double> sum_out,
                                   double* max_clipped_norm) {
  if (!(clip_norm > 0.0)) {
    throw std::invalid_argument("clip norm must be positive");
  }
  const std::size_t n_params = params.spec.param_count();
  if (sum_out.size() != n_params) {
    throw std::invalid_argument("sum output has the wrong length");
  }
  validate_batch(data, batch);
  std::fill(sum_out.begin(), sum_out.end(), 0.0);

  const std::size_t n_blocks =
      (batch.size() + kAccumBlock - 1) / kAccumBlock;
  std::vector<std::vector<double>> block_sums(n_blocks);
  std::vector<double> block_norms(n_blocks, 0.0);
  const bool track_norm = max_clipped_norm != nullptr;

#ifdef _OPENMP
#pragma omp parallel
  {
    ModelScratch scratch;
    std::vector<double> grad(n_params);
#pragma omp for schedule(static)
    for (long b = 0; b < static_cast<long>(n_blocks); ++b) {
      const std::size_t start = static_cast<std::size_t>(b) * kAccumBlock;
      const std::size_t len = std::min<std::size_t>(kAccumBlock,
                                                    batch.size() - start);
      block_sums[static_cast<std::size_t>(b)].resize(n_params);
      block_norms[static_cast<std::size_t>(b)] = accumulate_block(
          params, data, batch.subspan(start, len), clip_norm, scratch, grad,
          block_sums[static_cast<std::size_t>(b)], track_norm);
    }
  }
#else
  {
    ModelScratch scratch;
    std::vector<double> grad(n_params);
    for (std::size_t b = 0; b < n_blocks; ++b) {
      const std::size_t start = b * kAccumBlock;
      const std::size_t len = std::min<std::size_t>(kAccumBlock,
                                                    batch.size() - start);
      block_sums[b].resize(n_params);
      block_norms[b] =
          accumulate_block(params, data, batch.subspan(start, len), clip_norm,
                           scratch, grad, block_sums[b], track_norm);
    }
  }
#endif

  // Blocks are reduced in index order, independent of which thread ran them.
  double max_norm = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    for (std::size_t j = 0; j < n_params; ++j) sum_out[j] += block_sums[b][j];
    max_norm = std::max(max_norm, block_norms[b]);
  }
  if (max_clipped_norm != nullptr) *max_clipped_norm = max_norm;
}

void clipped_gradient_sum(const ModelParams& params, const LabeledDataset& data,
                          std::span<const int> batch, double clip_norm,
                          std::span<double> sum_out,
                          double* max_clipped_norm) {
#ifdef _OPENMP
  clipped_gradient_sum_parallel(params, data, batch, clip_norm, sum_out,
                                max_clipped_norm);
#else
  clipped_gradient_sum_serial(params, data, batch, clip_norm, sum_out,
                              max_clipped_norm);
#endif
}

long count_correct_serial(const ModelParams& params, const LabeledDataset& data,
                          std::span<const int> subset) {
  validate_batch(data, subset);
  ModelScratch scratch;
  long correct = 0;
  for (int idx : subset) {
    if (predict_example(params, data.example(idx), scratch) ==
        data.labels[static_cast<std::size_t>(idx)]) {
      ++correct;
    }
  }
  return correct;
}

long count_correct_parallel(const ModelParams& params,
                            const LabeledDataset& data,
                            std::span<const int> subset) {
  validate_batch(data, subset);
  long correct = 0;
#ifdef _OPENMP
#pragma omp parallel reduction(+ : correct)
  {
    ModelScratch scratch;
#pragma omp for schedule(static)
    for (long i = 0; i < static_cast<long>(subset.size()); ++i) {
      if (predict_example(params, data.example(subset[i]), scratch) ==
          data.labels[static_cast<std::size_t>(subset[i])]) {
        ++correct;
      }
    }
  }
#else
  correct = count_correct_serial(params, data, subset);
#endif
  return correct;
}

long count_correct(const ModelParams& params, const LabeledDataset& data,
                   std::span<const int> subset) {
#ifdef _OPENMP
  return count_correct_parallel(params, data, subset);
#else
  return count_correct_serial(params, data, subset);
#endif
}

double dataset_accuracy(const ModelParams& params, const LabeledDataset& data) {
  if (data.size() == 0) return 0.0;
  std::vector<int> all(static_cast<std::size_t>(data.size()));
  std::iota(all.begin(), all.end(), 0);
  return static_cast<double>(count_correct(params, data, all)) / data.size();
}

}  // namespace pdpsgd
