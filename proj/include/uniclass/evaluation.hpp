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

#ifndef UNICLASS_EVALUATION_HPP_
#define UNICLASS_EVALUATION_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uniclass/types.hpp"

namespace uniclass {

struct SampleWiseResult {
  double percent = 0.0;
  std::size_t correct = 0;
  std::vector<bool> mask;  // per-sample correctness
};

struct ThresholdResult {
  double percent = 0.0;
  std::size_t correct = 0;
  double threshold = 0.0;  // smallest value attaining the maximum
};

struct ClassWiseResult {
  double percent = 0.0;
  std::size_t correct = 0;
  std::vector<double> thresholds;            // NaN for classes with no samples
  std::vector<std::size_t> per_class_correct;
};

// The three accuracies of one batch plus the optimal thresholds and the
// integer counts behind each percentage.  a_uni <= a_cw <= a_sw always.
struct AccuracyReport {
  std::size_t total = 0;
  double a_sw = 0.0, a_cw = 0.0, a_uni = 0.0;  // percentages
  std::size_t correct_sw = 0, correct_cw = 0, correct_uni = 0;
  double t_star = 0.0;
  std::vector<double> t_star_per_class;
};

// Sample s is correct iff c_label(x_s) > max_{j != label} c_j(x_s), strictly;
// ties count as incorrect.
SampleWiseResult sample_wise_accuracy(const MetricBatch& batch);

// Largest fraction classifiable with one dataset-wide threshold t, where
// sample s counts iff c_label(x_s) > t >= max_{j != label} c_j(x_s).  The
// objective is piecewise constant with breakpoints only at observed values,
// so an event sweep over the sorted distinct positives and max-negatives is
// exact; ties resolve to the smallest attaining value.
ThresholdResult uniform_accuracy(const MetricBatch& batch);

// Number of samples classified at a fixed threshold (idempotence checks and
// learned-bias evaluation).
std::size_t uniform_count_at(const MetricBatch& batch, double threshold);

// Per-class threshold t_i over that class's samples: positive c_i(x) against
// the sample's own type I negatives c_{j != i}(x).  The objective decomposes
// over classes, so independent per-class sweeps are exact.
ClassWiseResult class_wise_uniform_accuracy(const MetricBatch& batch);

// Variant where class i's threshold must clear the type II negatives instead:
// the i-th metric of every other class's sample.  A class-i sample counts iff
// c_i(x) > t_i >= max_j{ c_i(x^(j)) : label(x^(j)) != i }.
ClassWiseResult class_wise_type2_accuracy(const MetricBatch& batch);

// Runs all three accuracies and checks the hierarchy on the integer counts.
AccuracyReport evaluate(const MetricBatch& batch);

// N x N matrix over one chosen sample per class, entry(i, j) = c_i(x^(j)).
// column_dominant: every diagonal beats the rest of its own column (holds iff
// all N samples are sample-wise correct).  global_dominant: every diagonal
// beats every off-diagonal (implies the tuple is uniformly classifiable).
struct MetricMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // row-major, entry(i, j) = values[i * n + j]
  bool column_dominant = false;
  bool global_dominant = false;

  double entry(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

MetricMatrix metric_matrix(const MetricBatch& batch,
                           std::span<const std::size_t> sample_ids);

// Positive/negative metric distribution statistics over the sample-wise
// correct subset of the batch.
struct DistributionReport {
  std::size_t num_correct = 0;
  double min_pos = 0.0;
  double max_neg = 0.0;
  bool has_overlap = false;
  double overlap_lo = 0.0, overlap_hi = 0.0;
  double overlap_width = 0.0;
  std::vector<double> per_class_min_pos;  // NaN where a class has no correct sample
  std::vector<double> per_class_max_neg;
  double std_min_pos = 0.0;  // population convention over the defined entries
  double std_max_neg = 0.0;
  std::size_t num_bins = 0;
  std::vector<double> bin_edges;          // num_bins + 1, spanning all metrics
  std::vector<std::size_t> histogram_pos;
  std::vector<std::size_t> histogram_neg;
};

// nullopt when the batch has no sample-wise correct samples.
std::optional<DistributionReport> distribution_report(const MetricBatch& batch,
                                                      std::size_t num_bins);

}  // namespace uniclass

#endif  // UNICLASS_EVALUATION_HPP_
