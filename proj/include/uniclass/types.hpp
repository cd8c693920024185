// Copyright 2026 The uniclass Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNICLASS_TYPES_HPP_
#define UNICLASS_TYPES_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace uniclass {

// Classifier family: plain inner products W_i^T x, or the normalized variant
// gamma * cos(W_i, x) whose metrics live in [-gamma, gamma].
enum class Family { kLinear, kNormalized };

// Bias modes: all-zero (frozen), one learnable b_i per class, or a single
// learnable scalar shared by every class.
enum class BiasMode { kZero, kDiverse, kUnified };

const char* family_name(Family family);
Family parse_family(const std::string& name);
const char* bias_mode_name(BiasMode mode);
BiasMode parse_bias_mode(const std::string& name);

// Feature vectors with integer class labels; the universe every metric and
// accuracy is computed over.  Features are stored row-major, one row per
// sample.
struct LabeledDataset {
  std::size_t dim = 0;          // M
  std::size_t num_classes = 0;  // N
  std::vector<double> features; // size() * dim
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> feature(std::size_t s) const {
    return {features.data() + s * dim, dim};
  }

  void append(std::span<const double> feature_row, int label);
  // Checks N >= 2, labels in [0, N), finite entries, consistent sizes.
  void validate() const;
};

// Weight matrix (columns W_i stored contiguously), bias vector, family and
// scale.  The head maps a feature vector to N classification metrics.
struct ClassifierHead {
  std::size_t dim = 0;          // M
  std::size_t num_classes = 0;  // N
  Family family = Family::kLinear;
  BiasMode bias_mode = BiasMode::kZero;
  double gamma = 1.0;
  std::vector<double> weights;  // num_classes * dim, column i contiguous
  std::vector<double> bias;     // num_classes

  std::span<const double> weight_column(std::size_t i) const {
    return {weights.data() + i * dim, dim};
  }
  std::span<double> weight_column(std::size_t i) {
    return {weights.data() + i * dim, dim};
  }

  // Enforces the bias-mode shape invariants (zero => all zeros, unified =>
  // all equal), gamma > 0 for the normalized family, finite entries.
  void validate() const;
};

// Per-sample classification metrics c_j(x_s) plus labels.  When
// bias_included is set the stored values are the signed, directly comparable
// metrics: W_j^T x + b_j for the linear family and gamma*cos(W_j, x) - b_j
// for the normalized family, so one threshold convention serves every
// downstream accuracy.
struct MetricBatch {
  std::size_t num_classes = 0;
  std::vector<double> metrics;  // size() * num_classes, row-major
  std::vector<int> labels;
  bool bias_included = false;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t s) const {
    return {metrics.data() + s * num_classes, num_classes};
  }
  double metric(std::size_t s, std::size_t j) const {
    return metrics[s * num_classes + j];
  }

  void validate() const;
};

}  // namespace uniclass

#endif  // UNICLASS_TYPES_HPP_
