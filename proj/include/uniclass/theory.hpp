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

#ifndef UNICLASS_THEORY_HPP_
#define UNICLASS_THEORY_HPP_

#include <cstddef>
#include <span>

#include "uniclass/evaluation.hpp"

namespace uniclass {

// Metric functions bounded below by A and above by B (for the normalized
// family A = -gamma, B = +gamma), with N classes.
struct BoundedMetricModel {
  double lower_bound = 0.0;   // A
  double upper_bound = 0.0;   // B, must exceed A
  std::size_t num_classes = 2;

  void validate() const;
};

// Stationary point of the unified-bias BCE loss under perfect training
// (positives at B, negatives at A):
//
//   b = log[ ((N-2) e^A + sqrt((N-2)^2 e^{2A} + 4(N-1) e^{A+B})) / 2 ]
//
// evaluated in a log-domain form that survives B - A in the hundreds.
double stationary_bias(const BoundedMetricModel& model);

// Independent check: golden-section minimization of the unified-bias BCE
// loss over b at (c_i = B, c_j = A).  Converges well past 1e-6.
double numeric_stationary_bias(const BoundedMetricModel& model);

// Feasibility condition 2 <= N < (e^{B-A} + 3) / 2 under which the stationary
// bias lands strictly inside (A, B) and is therefore a unified threshold.
bool stationary_bias_feasible(const BoundedMetricModel& model);

// The three single-sample upper bounds on the naive loss derived from the
// AM-GM inequality, reported as slack = RHS - L_naive (nonnegative up to
// rounding, zero at uniform metrics):
//   softmax bound:       N/(N-1) * L_soft - N log N / (N-1)
//   single-log bound:    2 log(1 + e^{mean_neg - c_i}) - 2 log 2
//   per-negative bound:  2/(N-1) * sum_j log(1 + e^{c_j - c_i}) - 2 log 2
struct AmGmReport {
  double naive_loss = 0.0;
  double softmax_bound_rhs = 0.0, softmax_bound_slack = 0.0;
  double single_log_rhs = 0.0, single_log_slack = 0.0;
  double per_negative_rhs = 0.0, per_negative_slack = 0.0;
};

AmGmReport check_amgm_inequalities(std::span<const double> metrics, int label);

// Fourth bound, over an N-tuple of per-class samples (entry(i, j) =
// c_i(x^(j))): the summed naive loss against
//   2/(N-1) * sum_i sum_{j != i} log(1 + e^{c_j(x^(i)) - c_j(x^(j))}) - 2N log 2.
struct SummedBoundReport {
  double naive_sum = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

SummedBoundReport check_amgm_summed(const MetricMatrix& tuple);

}  // namespace uniclass

#endif  // UNICLASS_THEORY_HPP_
