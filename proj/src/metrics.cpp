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

#include "uniclass/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "uniclass/error.hpp"
#include "uniclass/kernels.hpp"

namespace uniclass {

namespace {

constexpr double kNormFloor = 1e-12;

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "cosine of vectors with different lengths");
  const double na = std::sqrt(kernels::squared_norm(a.data(), a.size()));
  const double nb = std::sqrt(kernels::squared_norm(b.data(), b.size()));
  require(na > kNormFloor && nb > kNormFloor,
          "cosine of a vector with norm <= 1e-12");
  return kernels::dot(a.data(), b.data(), a.size()) / (na * nb);
}

MetricBatch compute_metrics(const ClassifierHead& head,
                            const LabeledDataset& data, bool include_bias) {
  require(head.dim == data.dim, "head dim ", head.dim,
          " does not match dataset dim ", data.dim);
  require(head.num_classes == data.num_classes, "head has ", head.num_classes,
          " classes but dataset has ", data.num_classes);

  const std::size_t n = data.size();
  const std::size_t num_classes = head.num_classes;
  MetricBatch batch;
  batch.num_classes = num_classes;
  batch.labels = data.labels;
  batch.bias_included = include_bias;
  batch.metrics.resize(n * num_classes);

  if (head.family == Family::kLinear) {
    for (std::size_t s = 0; s < n; ++s) {
      const double* x = data.features.data() + s * head.dim;
      double* out = batch.metrics.data() + s * num_classes;
      for (std::size_t i = 0; i < num_classes; ++i) {
        double value = kernels::dot(head.weight_column(i).data(), x, head.dim);
        if (include_bias) value += head.bias[i];
        out[i] = value;
      }
    }
    return batch;
  }

  // Normalized family: precompute the weight-column norms once.
  std::vector<double> weight_norms(num_classes);
  for (std::size_t i = 0; i < num_classes; ++i) {
    const auto col = head.weight_column(i);
    weight_norms[i] = std::sqrt(kernels::squared_norm(col.data(), col.size()));
    require(weight_norms[i] > kNormFloor, "weight column ", i,
            " has norm <= 1e-12 under the normalized family");
  }
  for (std::size_t s = 0; s < n; ++s) {
    const double* x = data.features.data() + s * head.dim;
    const double x_norm = std::sqrt(kernels::squared_norm(x, head.dim));
    require(x_norm > kNormFloor, "feature vector of sample ", s,
            " has norm <= 1e-12 under the normalized family");
    double* out = batch.metrics.data() + s * num_classes;
    for (std::size_t i = 0; i < num_classes; ++i) {
      const double ip = kernels::dot(head.weight_column(i).data(), x, head.dim);
      double value = head.gamma * ip / (weight_norms[i] * x_norm);
      if (include_bias) value -= head.bias[i];
      out[i] = value;
    }
  }
  return batch;
}

MetricBatch softmax_transform(const MetricBatch& batch) {
  require(batch.size() > 0, "softmax transform of an empty batch");
  MetricBatch out = batch;
  const std::size_t num_classes = batch.num_classes;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    double* row = out.metrics.data() + s * num_classes;
    const double max = *std::max_element(row, row + num_classes);
    double denom = 0.0;
    for (std::size_t j = 0; j < num_classes; ++j) {
      row[j] = std::exp(row[j] - max);
      denom += row[j];
    }
    for (std::size_t j = 0; j < num_classes; ++j) row[j] /= denom;
  }
  return out;
}

}  // namespace uniclass
