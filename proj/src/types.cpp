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

#include "uniclass/types.hpp"

#include <cmath>

#include "uniclass/error.hpp"

namespace uniclass {

const char* family_name(Family family) {
  return family == Family::kLinear ? "linear" : "normalized";
}

Family parse_family(const std::string& name) {
  if (name == "linear") return Family::kLinear;
  if (name == "normalized") return Family::kNormalized;
  fail("unknown classifier family '", name, "' (expected linear|normalized)");
}

const char* bias_mode_name(BiasMode mode) {
  switch (mode) {
    case BiasMode::kZero: return "zero";
    case BiasMode::kDiverse: return "diverse";
    case BiasMode::kUnified: return "unified";
  }
  return "unknown";
}

BiasMode parse_bias_mode(const std::string& name) {
  if (name == "zero") return BiasMode::kZero;
  if (name == "diverse") return BiasMode::kDiverse;
  if (name == "unified") return BiasMode::kUnified;
  fail("unknown bias mode '", name, "' (expected zero|diverse|unified)");
}

void LabeledDataset::append(std::span<const double> feature_row, int label) {
  require(feature_row.size() == dim, "feature length ", feature_row.size(),
          " does not match dataset dim ", dim);
  features.insert(features.end(), feature_row.begin(), feature_row.end());
  labels.push_back(label);
}

void LabeledDataset::validate() const {
  require(dim >= 1, "feature dimension must be >= 1");
  require(num_classes >= 2, "dataset needs at least 2 classes, got ",
          num_classes);
  require(features.size() == labels.size() * dim,
          "feature storage size ", features.size(), " inconsistent with ",
          labels.size(), " samples of dim ", dim);
  for (std::size_t s = 0; s < labels.size(); ++s) {
    require(labels[s] >= 0 && static_cast<std::size_t>(labels[s]) < num_classes,
            "label ", labels[s], " of sample ", s, " outside [0, ",
            num_classes, ")");
  }
  for (double v : features) {
    require(std::isfinite(v), "non-finite feature value");
  }
}

void ClassifierHead::validate() const {
  require(dim >= 1 && num_classes >= 2, "head needs dim >= 1 and N >= 2");
  require(weights.size() == dim * num_classes, "weight storage size ",
          weights.size(), " != ", dim * num_classes);
  require(bias.size() == num_classes, "bias length ", bias.size(), " != N = ",
          num_classes);
  for (double v : weights) require(std::isfinite(v), "non-finite weight");
  for (double v : bias) require(std::isfinite(v), "non-finite bias");
  if (family == Family::kNormalized) {
    require(gamma > 0.0, "normalized family requires gamma > 0, got ", gamma);
  }
  if (bias_mode == BiasMode::kZero) {
    for (double v : bias) {
      require(v == 0.0, "bias mode 'zero' requires all-zero bias");
    }
  } else if (bias_mode == BiasMode::kUnified) {
    for (double v : bias) {
      require(v == bias.front(),
              "bias mode 'unified' requires all bias entries equal");
    }
  }
}

void MetricBatch::validate() const {
  require(num_classes >= 2, "metric batch needs N >= 2");
  require(metrics.size() == labels.size() * num_classes,
          "metric storage size inconsistent with labels");
  for (int label : labels) {
    require(label >= 0 && static_cast<std::size_t>(label) < num_classes,
            "label ", label, " outside [0, ", num_classes, ")");
  }
  for (double v : metrics) require(std::isfinite(v), "non-finite metric");
}

}  // namespace uniclass
