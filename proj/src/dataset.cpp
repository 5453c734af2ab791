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

#include "pdpsgd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pdpsgd/errors.hpp"
#include "pdpsgd/rng.hpp"

namespace pdpsgd {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be_u32(std::ifstream& in, const std::string& path,
                          std::size_t& offset) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (in.gcount() != 4) {
    throw FormatError(path + ": truncated at byte offset " +
                      std::to_string(offset));
  }
  offset += 4;
  return (static_cast<std::uint32_t>(bytes[0]) << 24) |
         (static_cast<std::uint32_t>(bytes[1]) << 16) |
         (static_cast<std::uint32_t>(bytes[2]) << 8) |
         static_cast<std::uint32_t>(bytes[3]);
}

void write_be_u32(std::ofstream& out, std::uint32_t value) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>((value >> 24) & 0xff),
      static_cast<unsigned char>((value >> 16) & 0xff),
      static_cast<unsigned char>((value >> 8) & 0xff),
      static_cast<unsigned char>(value & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::vector<unsigned char> read_payload(std::ifstream& in,
                                        const std::string& path,
                                        std::size_t count,
                                        std::size_t& offset) {
  std::vector<unsigned char> payload(count);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(count));
  const std::size_t got = static_cast<std::size_t>(in.gcount());
  if (got != count) {
    throw FormatError(path + ": truncated at byte offset " +
                      std::to_string(offset + got));
  }
  offset += count;
  return payload;
}

}  // namespace

std::vector<double> generate_epsilons(int n, double skew, double eps_min,
                                      double eps_max, int n_groups,
                                      std::optional<double> c1,
                                      std::optional<double> c2) {
  if (n < 1) {
    throw std::invalid_argument("n must be at least 1");
  }
  if (!(eps_min < eps_max)) {
    throw std::invalid_argument("eps_min must be below eps_max");
  }
  if (!(eps_min > 0.0)) {
    throw std::invalid_argument("eps_min must be positive");
  }
  if (n_groups < 2) {
    throw std::invalid_argument("need at least 2 groups");
  }

  double shape_c1 = 1.0;
  double shape_c2 = 0.0;
  if (skew == -0.2) {
    shape_c1 = 2.098;
    shape_c2 = -1.715;
  } else if (skew == 0.2) {
    shape_c1 = 1.554;
    shape_c2 = -1.715;
  }
  if (c1.has_value()) shape_c1 = *c1;
  if (c2.has_value()) shape_c2 = *c2;

  std::vector<double> group_eps(static_cast<std::size_t>(n_groups));
  std::vector<double> weights(static_cast<std::size_t>(n_groups));
  double weight_sum = 0.0;
  for (int g = 0; g < n_groups; ++g) {
    const double eps = std::clamp(
        eps_min + (eps_max - eps_min) * static_cast<double>(g) /
                      (n_groups - 1),
        eps_min, eps_max);
    group_eps[static_cast<std::size_t>(g)] = eps;
    const double w =
        skew == 0.0 ? 1.0 : shape_c1 * std::exp(skew * eps) + shape_c2;
    if (w < 0.0) {
      throw std::invalid_argument(
          "group count would be negative at epsilon = " + std::to_string(eps));
    }
    weights[static_cast<std::size_t>(g)] = w;
    weight_sum += w;
  }
  if (!(weight_sum > 0.0)) {
    throw std::invalid_argument("group weights sum to zero");
  }

  // Largest-remainder apportionment of n across groups.
  std::vector<int> counts(static_cast<std::size_t>(n_groups));
  std::vector<double> fractions(static_cast<std::size_t>(n_groups));
  long assigned = 0;
  for (int g = 0; g < n_groups; ++g) {
    const double raw = static_cast<double>(n) *
                       weights[static_cast<std::size_t>(g)] / weight_sum;
    const double base = std::floor(raw);
    counts[static_cast<std::size_t>(g)] = static_cast<int>(base);
    fractions[static_cast<std::size_t>(g)] = raw - base;
    assigned += static_cast<long>(base);
  }
  long leftover = static_cast<long>(n) - assigned;
  std::vector<int> order(static_cast<std::size_t>(n_groups));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return fractions[static_cast<std::size_t>(a)] >
           fractions[static_cast<std::size_t>(b)];
  });
  for (long i = 0; i < leftover; ++i) {
    ++counts[static_cast<std::size_t>(
        order[static_cast<std::size_t>(i % n_groups)])];
  }

  std::vector<double> epsilons;
  epsilons.reserve(static_cast<std::size_t>(n));
  for (int g = 0; g < n_groups; ++g) {
    epsilons.insert(epsilons.end(),
                    static_cast<std::size_t>(counts[static_cast<std::size_t>(
                        g)]),
                    group_eps[static_cast<std::size_t>(g)]);
  }
  return epsilons;
}

LabeledDataset synthetic_dataset(int n, int dim, int classes,
                                 double separation, std::uint64_t seed) {
  if (classes < 2) {
    throw std::invalid_argument("need at least 2 classes");
  }
  if (n < classes) {
    throw std::invalid_argument("need at least one example per class");
  }
  if (dim < 1) {
    throw std::invalid_argument("dimension must be positive");
  }
  if (!(separation >= 0.0)) {
    throw std::invalid_argument("separation must be non-negative");
  }

  // Axis-aligned means: class c sits at +/- separation along axis c % dim,
  // with the sign flipping on each wrap so up to 2 * dim classes get
  // distinct means.
  std::vector<std::vector<double>> means(
      static_cast<std::size_t>(classes),
      std::vector<double>(static_cast<std::size_t>(dim), 0.0));
  for (int c = 0; c < classes; ++c) {
    const int axis = c % dim;
    const double sign = (c / dim) % 2 == 0 ? 1.0 : -1.0;
    means[static_cast<std::size_t>(c)][static_cast<std::size_t>(axis)] =
        sign * separation;
  }

  Rng rng = make_rng(seed, 0x64617461ULL);  // data stream
  NormalSampler normal(rng);
  LabeledDataset data;
  data.num_features = dim;
  data.num_classes = classes;
  data.features.resize(static_cast<std::size_t>(n) *
                       static_cast<std::size_t>(dim));
  data.labels.resize(static_cast<std::size_t>(n));
  std::vector<int> row_of(static_cast<std::size_t>(n));
  std::iota(row_of.begin(), row_of.end(), 0);
  deterministic_shuffle(row_of, rng);
  for (int i = 0; i < n; ++i) {
    const int label = i % classes;
    const int row = row_of[static_cast<std::size_t>(i)];
    data.labels[static_cast<std::size_t>(row)] = label;
    double* x = data.features.data() +
                static_cast<std::size_t>(row) * static_cast<std::size_t>(dim);
    const std::vector<double>& mean = means[static_cast<std::size_t>(label)];
    for (int j = 0; j < dim; ++j) {
      x[j] = mean[static_cast<std::size_t>(j)] + normal();
    }
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : data.features) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  for (double& v : data.features) {
    v = std::clamp((v - lo) / span, 0.0, 1.0);
  }
  return data;
}

LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path) {
  std::ifstream images(images_path, std::ios::binary | std::ios::ate);
  if (!images) {
    throw FormatError(images_path + ": cannot open file");
  }
  const std::uint64_t images_size =
      static_cast<std::uint64_t>(images.tellg());
  images.seekg(0);
  std::size_t offset = 0;
  const std::uint32_t magic = read_be_u32(images, images_path, offset);
  if (magic != kImagesMagic) {
    throw FormatError(images_path + ": bad images magic at byte offset 0");
  }
  const std::uint32_t count = read_be_u32(images, images_path, offset);
  const std::uint32_t rows = read_be_u32(images, images_path, offset);
  const std::uint32_t cols = read_be_u32(images, images_path, offset);
  if (rows == 0 || cols == 0) {
    throw FormatError(images_path + ": zero image dimensions at byte offset 8");
  }
  // Size the payload against the file before allocating, so a corrupt count
  // cannot trigger a huge allocation.
  const std::uint64_t per_image =
      static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
  const std::uint64_t image_body = images_size - 16;
  if (static_cast<std::uint64_t>(count) > image_body / per_image) {
    throw FormatError(images_path + ": truncated at byte offset " +
                      std::to_string(images_size));
  }
  const std::size_t pixels =
      static_cast<std::size_t>(static_cast<std::uint64_t>(count) * per_image);
  if (pixels < image_body) {
    throw FormatError(images_path + ": trailing bytes at byte offset " +
                      std::to_string(16 + pixels));
  }
  const std::vector<unsigned char> image_bytes =
      read_payload(images, images_path, pixels, offset);

  std::ifstream labels(labels_path, std::ios::binary | std::ios::ate);
  if (!labels) {
    throw FormatError(labels_path + ": cannot open file");
  }
  const std::uint64_t labels_size =
      static_cast<std::uint64_t>(labels.tellg());
  labels.seekg(0);
  std::size_t label_offset = 0;
  const std::uint32_t label_magic =
      read_be_u32(labels, labels_path, label_offset);
  if (label_magic != kLabelsMagic) {
    throw FormatError(labels_path + ": bad labels magic at byte offset 0");
  }
  const std::uint32_t label_count =
      read_be_u32(labels, labels_path, label_offset);
  if (label_count != count) {
    throw FormatError(labels_path + ": label count " +
                      std::to_string(label_count) + " at byte offset 4 does " +
                      "not match image count " + std::to_string(count));
  }
  const std::uint64_t label_body = labels_size - 8;
  if (static_cast<std::uint64_t>(label_count) > label_body) {
    throw FormatError(labels_path + ": truncated at byte offset " +
                      std::to_string(labels_size));
  }
  if (label_count < label_body) {
    throw FormatError(labels_path + ": trailing bytes at byte offset " +
                      std::to_string(8 + label_count));
  }
  const std::vector<unsigned char> label_bytes =
      read_payload(labels, labels_path, label_count, label_offset);

  LabeledDataset data;
  data.num_features = static_cast<int>(rows * cols);
  data.features.resize(pixels);
  for (std::size_t i = 0; i < pixels; ++i) {
    data.features[i] = static_cast<double>(image_bytes[i]) / 255.0;
  }
  data.labels.resize(label_count);
  int max_label = 0;
  for (std::size_t i = 0; i < label_bytes.size(); ++i) {
    data.labels[i] = static_cast<int>(label_bytes[i]);
    max_label = std::max(max_label, data.labels[i]);
  }
  data.num_classes = std::max(max_label + 1, 2);
  return data;
}

void write_idx(const LabeledDataset& dataset, const std::string& images_path,
               const std::string& labels_path, int rows, int cols) {
  if (rows < 1 || cols < 1 || rows * cols != dataset.num_features) {
    throw std::invalid_argument(
        "rows * cols must equal the dataset feature count");
  }
  const int n = dataset.size();
  {
    std::ofstream images(images_path, std::ios::binary | std::ios::trunc);
    if (!images) {
      throw FormatError(images_path + ": cannot open file for writing");
    }
    write_be_u32(images, kImagesMagic);
    write_be_u32(images, static_cast<std::uint32_t>(n));
    write_be_u32(images, static_cast<std::uint32_t>(rows));
    write_be_u32(images, static_cast<std::uint32_t>(cols));
    for (double v : dataset.features) {
      const long byte = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
      const unsigned char b = static_cast<unsigned char>(byte);
      images.write(reinterpret_cast<const char*>(&b), 1);
    }
    if (!images) {
      throw FormatError(images_path + ": write failed");
    }
  }
  {
    std::ofstream labels(labels_path, std::ios::binary | std::ios::trunc);
    if (!labels) {
      throw FormatError(labels_path + ": cannot open file for writing");
    }
    write_be_u32(labels, kLabelsMagic);
    write_be_u32(labels, static_cast<std::uint32_t>(n));
    for (int label : dataset.labels) {
      if (label < 0 || label > 255) {
        throw std::invalid_argument("labels must fit in one byte");
      }
      const unsigned char b = static_cast<unsigned char>(label);
      labels.write(reinterpret_cast<const char*>(&b), 1);
    }
    if (!labels) {
      throw FormatError(labels_path + ": write failed");
    }
  }
}

}  // namespace pdpsgd
