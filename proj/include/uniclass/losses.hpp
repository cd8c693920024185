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

#ifndef UNICLASS_LOSSES_HPP_
#define UNICLASS_LOSSES_HPP_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "uniclass/types.hpp"

namespace uniclass {

// The loss family: SoftMax cross-entropy, one-vs-all BCE, the naive linear
// margin loss, and the class-wise BCE variant in which every term of a class-i
// sample uses that class's own bias b_i.
enum class LossFormula { kSoftmax, kBce, kNaive, kBceClasswise };

// One loss variant: formula x classifier family x bias mode.  The
// softmax/bce formulas crossed with {linear, normalized} x {zero, diverse,
// unified} enumerate the twelve canonical variants; kNaive ignores the bias
// entirely and kBceClasswise requires diverse bias.
struct LossSpec {
  LossFormula formula = LossFormula::kSoftmax;
  Family family = Family::kLinear;
  BiasMode bias_mode = BiasMode::kDiverse;
  double gamma = 1.0;  // used only by the normalized family

  void validate() const;
};

// Canonical names: soft-0, soft-d, soft-u, soft-n0, soft-nd, soft-nu,
// bce-0, bce-d, bce-u, bce-n0, bce-nd, bce-nu.  The library additionally
// understands "naive" and "bce-cw" (class-wise BCE); the CLI exposes only
// the twelve.
std::string loss_name(const LossSpec& spec);
LossSpec parse_loss_name(const std::string& name, double gamma = 1.0);
const std::array<std::string, 12>& canonical_loss_names();

// Analytic partial derivatives of a single-sample loss.
struct LossGradients {
  double value = 0.0;             // the loss itself (training loops want both)
  std::vector<double> d_metrics;  // dL/dc_j, length N (raw, bias-free metrics)
  std::vector<double> d_bias;     // dL/db_j, length N; unified mode stores the
                                  // aggregated scalar replicated in every slot
  std::vector<double> d_weights;  // dL/dW, num_classes * dim, column-major
  std::vector<double> d_feature;  // dL/dx, length dim
};

// Loss of one sample given its raw (bias-free) metrics.  For the normalized
// family the raw metrics are already scaled by gamma.  `bias` must respect
// the spec's bias mode (zeros / per-class / replicated scalar).  Everything
// is evaluated through softplus / log-sum-exp, so no finite input overflows.
double loss_value(const LossSpec& spec, std::span<const double> raw_metrics,
                  int label, std::span<const double> bias);

// Full chain-rule gradients through the head's metric map.
LossGradients loss_gradients(const LossSpec& spec,
                             std::span<const double> feature,
                             const ClassifierHead& head, int label);

// Mean of loss_value over the dataset, accumulated in index order with
// compensated summation.
double batch_loss(const LossSpec& spec, const ClassifierHead& head,
                  const LabeledDataset& data);

// Stable scalar helpers shared across the library.
// softplus(z) = log(1 + e^z) = max(z, 0) + log1p(e^-|z|)
double softplus(double z);
double sigmoid(double z);
double log_sum_exp(std::span<const double> v);

}  // namespace uniclass

#endif  // UNICLASS_LOSSES_HPP_
