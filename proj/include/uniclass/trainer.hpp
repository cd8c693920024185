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

#ifndef UNICLASS_TRAINER_HPP_
#define UNICLASS_TRAINER_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "uniclass/evaluation.hpp"
#include "uniclass/losses.hpp"
#include "uniclass/types.hpp"

namespace uniclass {

// Small fully connected feature extractor trained by manual backprop.
// layer_dims = {input, h1, ..., out}; a rectifier follows every layer except
// the last, whose affine output is the feature handed to the classifier head.
// A single entry means the identity map (features pass through untouched).
struct Mlp {
  std::vector<std::size_t> layer_dims;
  std::vector<std::vector<double>> weights;  // layer l: out x in, row-major
  std::vector<std::vector<double>> biases;   // layer l: out

  std::size_t num_layers() const { return weights.size(); }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
};

struct TrainConfig {
  LossSpec loss;
  int epochs = 50;
  int batch_size = 32;
  double lr0 = 0.1;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::uint64_t seed = 1;
  std::vector<std::size_t> hidden_dims;  // empty => identity extractor
  int bias_init_mode = 0;                // applies to diverse-bias losses
};

struct TrainRun {
  TrainConfig config;
  ClassifierHead final_head;
  Mlp extractor;
  std::vector<double> loss_curve;              // mean train loss per epoch
  std::vector<AccuracyReport> eval_history;    // per epoch, on eval data
  std::vector<std::vector<double>> bias_trace; // bias snapshot per epoch
};

// The eight diverse-bias initialization modes (1-based class index i):
//   0: seeded uniform in [-0.01, 0.01]
//   1: b_i = i
//   2: b_i = 64 i / N
//   3: b_i = 64 (N - i) / N
//   4: b_i = log(96 i)
//   5: b_i = log(96 (N + 1 - i))
//   6: b_i = log(96 N) on 1 <= i <= floor(N/4) and floor(N/2) <= i <= floor(3N/4),
//      else 0
//   7: complement of mode 6
// The gamma argument is accepted for signature stability; the published modes
// pin the constants 64 and 96 and do not scale with gamma.
std::vector<double> init_bias(int mode, std::size_t num_classes, double gamma,
                              std::uint64_t seed);

// lr0 * 0.5 * (1 + cos(pi * epoch / total_epochs))
double cosine_lr(int epoch, int total_epochs, double lr0);

// Mini-batch SGD with momentum over seeded shuffles: forward through the
// extractor and head, analytic gradients back through both, cosine-decayed
// learning rate, bias updated only when the mode is not kZero.  All
// randomness flows from config.seed; two runs with identical config and data
// produce bit-identical parameters.  Throws (naming epoch and batch) if the
// loss goes non-finite.
TrainRun train(const TrainConfig& config, const LabeledDataset& train_data,
               const LabeledDataset& eval_data);

// Applies the extractor and head to a dataset (biased metrics by default).
MetricBatch evaluate_model(const Mlp& extractor, const ClassifierHead& head,
                           const LabeledDataset& data, bool include_bias = true);

// The unified threshold a learned unified bias encodes on raw (bias-free)
// metrics: +b for the normalized family (gamma cos > b) and -b for the
// linear family (W^T x > -b), matching each family's exponent sign.
double implied_threshold(const ClassifierHead& head);

// Runs the extractor over a dataset, yielding the feature set seen by the head.
LabeledDataset extract_features(const Mlp& extractor, const LabeledDataset& data);

struct GammaSweepRow {
  double gamma = 0.0;
  AccuracyReport report;      // final-epoch evaluation
  double learned_bias = 0.0;  // unified bias after training (NaN otherwise)
  bool condition = false;     // stationary-bias feasibility at A = -gamma, B = gamma
};

// Trains once per gamma (normalized-family losses only) with otherwise
// identical config.
std::vector<GammaSweepRow> sweep_gamma(const TrainConfig& config,
                                       std::span<const double> gammas,
                                       const LabeledDataset& train_data,
                                       const LabeledDataset& eval_data);

}  // namespace uniclass

#endif  // UNICLASS_TRAINER_HPP_
