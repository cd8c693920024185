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

#ifndef UNICLASS_METRICS_HPP_
#define UNICLASS_METRICS_HPP_

#include "uniclass/types.hpp"

namespace uniclass {

// Forward map from features to classification metrics.
//
// linear family:      entry(s, i) = W_i^T x_s            (+ b_i if include_bias)
// normalized family:  entry(s, i) = gamma * cos(W_i, x_s) (- b_i if include_bias)
//
// The sign conventions match how each family folds its bias into the loss
// exponent, so biased metrics compare against a single threshold either way.
// Throws on dimension mismatch, and under the normalized family on any
// feature or weight column with norm <= 1e-12 (the error names the index).
MetricBatch compute_metrics(const ClassifierHead& head,
                            const LabeledDataset& data, bool include_bias);

// Replaces every row with its softmax, computed max-shifted.  Row sums are 1
// within 1e-12 and each row's argmax is unchanged, so sample-wise accuracy is
// invariant (uniform accuracies generally are not).
MetricBatch softmax_transform(const MetricBatch& batch);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace uniclass

#endif  // UNICLASS_METRICS_HPP_
