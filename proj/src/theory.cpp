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

#include "uniclass/theory.hpp"

#include <cmath>

#include "uniclass/error.hpp"
#include "uniclass/losses.hpp"

namespace uniclass {

void BoundedMetricModel::validate() const {
  require(num_classes >= 2, "bounded metric model needs N >= 2");
  require(upper_bound > lower_bound, "upper bound ", upper_bound,
          " must exceed lower bound ", lower_bound);
  require(std::isfinite(lower_bound) && std::isfinite(upper_bound),
          "bounds must be finite");
}

double stationary_bias(const BoundedMetricModel& model) {
  model.validate();
  const double a = model.lower_bound;
  const double d = model.upper_bound - model.lower_bound;
  const double n = static_cast<double>(model.num_classes);
  // Factoring e^{(A+B)/2} out of the radical keeps every intermediate value
  // bounded for B - A in the hundreds, where the plain form overflows.
  const double shrunk = (n - 2.0) * std::exp(-0.5 * d);
  const double root =
      std::sqrt(shrunk * shrunk + 4.0 * (n - 1.0));
  return a + 0.5 * d + std::log(0.5 * (shrunk + root));
}

double numeric_stationary_bias(const BoundedMetricModel& model) {
  model.validate();
  const double a = model.lower_bound;
  const double b = model.upper_bound;
  const double n = static_cast<double>(model.num_classes);
  // Unified-bias BCE loss of a perfectly trained sample, as a function of
  // the bias alone: positive metric at B, the N-1 negatives at A.
  const auto loss = [&](double bias) {
    return softplus(bias - b) + (n - 1.0) * softplus(a - bias);
  };
  // The loss is strictly convex in the bias, so golden-section search over a
  // bracket guaranteed to contain the stationary point converges cleanly.
  double lo = a - 1.0;
  double hi = b + std::log(2.0 * n) + 1.0;
  const double ratio = 0.6180339887498949;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = loss(x1);
  double f2 = loss(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-11; ++iter) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = loss(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = loss(x2);
    }
  }
  return 0.5 * (lo + hi);
}

bool stationary_bias_feasible(const BoundedMetricModel& model) {
  model.validate();
  const double n = static_cast<double>(model.num_classes);
  // 2 <= N < (e^{B-A} + 3) / 2, rearranged into the log domain so large
  // B - A cannot overflow.
  const bool holds =
      model.upper_bound - model.lower_bound > std::log(2.0 * n - 3.0);
  if (holds) {
    const double bias = stationary_bias(model);
    require(model.lower_bound < bias && bias < model.upper_bound,
            "stationary bias ", bias, " escaped (A, B) despite the condition");
  }
  return holds;
}

namespace {

double naive_of(std::span<const double> metrics, int label) {
  const std::size_t n = metrics.size();
  double negatives = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != static_cast<std::size_t>(label)) negatives += metrics[j];
  }
  return -metrics[static_cast<std::size_t>(label)] +
         negatives / static_cast<double>(n - 1);
}

constexpr double kLog2 = 0.69314718055994530941723212145818;

}  // namespace

AmGmReport check_amgm_inequalities(std::span<const double> metrics,
                                   int label) {
  const std::size_t n = metrics.size();
  require(n >= 2, "the bounds need N >= 2 metrics");
  require(label >= 0 && static_cast<std::size_t>(label) < n, "label ", label,
          " outside [0, ", n, ")");
  const std::size_t pos = static_cast<std::size_t>(label);
  const double nn = static_cast<double>(n);

  AmGmReport report;
  report.naive_loss = naive_of(metrics, label);

  const double soft = log_sum_exp(metrics) - metrics[pos];
  report.softmax_bound_rhs =
      nn / (nn - 1.0) * soft - nn * std::log(nn) / (nn - 1.0);
  report.softmax_bound_slack = report.softmax_bound_rhs - report.naive_loss;

  double mean_neg = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != pos) mean_neg += metrics[j];
  }
  mean_neg /= nn - 1.0;
  report.single_log_rhs = 2.0 * softplus(mean_neg - metrics[pos]) - 2.0 * kLog2;
  report.single_log_slack = report.single_log_rhs - report.naive_loss;

  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != pos) sum += softplus(metrics[j] - metrics[pos]);
  }
  report.per_negative_rhs = 2.0 / (nn - 1.0) * sum - 2.0 * kLog2;
  report.per_negative_slack = report.per_negative_rhs - report.naive_loss;
  return report;
}

SummedBoundReport check_amgm_summed(const MetricMatrix& tuple) {
  const std::size_t n = tuple.n;
  require(n >= 2, "the summed bound needs N >= 2 classes");
  SummedBoundReport report;
  // Column i of the matrix holds the metrics of the class-i representative.
  for (std::size_t i = 0; i < n; ++i) {
    double negatives = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) negatives += tuple.entry(j, i);
    }
    report.naive_sum +=
        -tuple.entry(i, i) + negatives / static_cast<double>(n - 1);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum += softplus(tuple.entry(j, i) - tuple.entry(j, j));
    }
  }
  report.rhs = 2.0 / static_cast<double>(n - 1) * sum -
               2.0 * static_cast<double>(n) * kLog2;
  report.slack = report.rhs - report.naive_sum;
  return report;
}

}  // namespace uniclass
