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
// Datasets and per-user privacy budget assignment.

#ifndef PDPSGD_DATASET_HPP_
#define PDPSGD_DATASET_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdpsgd {

// Dense features in [0, 1] with integer class labels; one example per user.
struct LabeledDataset {
  int num_features = 0;
  int num_classes = 0;
  std::vector<double> features;  // row-major, size n * num_features
  std::vector<int> labels;       // size n

  int size() const { return static_cast<int>(labels.size()); }
  std::span<const double> example(int i) const {
    return {features.data() +
                static_cast<std::size_t>(i) * static_cast<std::size_t>(
                                                  num_features),
            static_cast<std::size_t>(num_features)};
  }
};

// Draws n per-user epsilon budgets from n_groups group values equally spaced
// across [eps_min, eps_max]. Group weights follow the shape
// c1 * exp(skew * eps) + c2 and are renormalized so counts sum to n
// (largest-remainder apportionment); skew 0 means equal counts. For skews
// +/-0.2 the constants default to reference values (2.098, -1.715) and
// (1.554, -1.715), which are only meaningful while every group weight stays
// non-negative (they do on [0.5, 1]); any other skew defaults to c1 = 1,
// c2 = 0. A negative group weight is an error. The result lists groups in
// ascending epsilon order.
std::vector<double> generate_epsilons(int n, double skew, double eps_min,
                                      double eps_max, int n_groups,
                                      std::optional<double> c1 = std::nullopt,
                                      std::optional<double> c2 = std::nullopt);

// Gaussian class blobs: class c has an axis-aligned mean of norm
// `separation`; features are standard normal around the mean, then min-max
// scaled to [0, 1] globally. Labels cycle i mod classes before a seeded
// shuffle of the rows, so class and row index end up independent.
LabeledDataset synthetic_dataset(int n, int dim, int classes,
                                 double separation, std::uint64_t seed);

// Reads an IDX image file (magic 0x00000803) and label file (0x00000801)
// into a dataset, scaling bytes to [0, 1]. Malformed input raises
// FormatError naming the byte offset.
LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path);

// Writes the dataset as IDX image/label files with the given row/column
// shape (rows * cols must equal num_features). Features are quantized to
// bytes; a load_idx round trip reproduces the quantized values exactly.
void write_idx(const LabeledDataset& dataset, const std::string& images_path,
               const std::string& labels_path, int rows, int cols);

}  // namespace pdpsgd

#endif  // PDPSGD_DATASET_HPP_
