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

// Test-only oracles: brute-force threshold scans, central finite differences,
// and random instance generators.  Everything here is deliberately naive and
// independent of the library's sweep/gradient implementations.

#ifndef UNICLASS_TESTS_TEST_SUPPORT_HPP_
#define UNICLASS_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "uniclass/losses.hpp"
#include "uniclass/metrics.hpp"
#include "uniclass/rng.hpp"
#include "uniclass/types.hpp"

namespace uniclass::testing {

// ---------------------------------------------------------------------------
// Random instances

inline MetricBatch random_batch(Rng& rng, std::size_t max_classes = 10,
                                std::size_t max_samples = 200) {
  MetricBatch batch;
  batch.num_classes = 2 + rng.below(max_classes - 1);
  const std::size_t n = 1 + rng.below(max_samples);
  batch.labels.resize(n);
  batch.metrics.resize(n * batch.num_classes);
  // Mix of shared structure and noise so thresholds are sometimes useful and
  // sometimes hopeless.
  std::vector<double> class_offset(batch.num_classes);
  for (double& v : class_offset) v = rng.uniform(-1.0, 1.0);
  const double spread = rng.uniform(0.2, 2.0);
  for (std::size_t s = 0; s < n; ++s) {
    batch.labels[s] = static_cast<int>(rng.below(batch.num_classes));
    for (std::size_t j = 0; j < batch.num_classes; ++j) {
      double v = class_offset[j] + spread * rng.normal();
      if (static_cast<std::size_t>(batch.labels[s]) == j &&
          rng.uniform() < 0.7) {
        v += rng.uniform(0.0, 2.0);  // usually, but not always, separable-ish
      }
      batch.metrics[s * batch.num_classes + j] = v;
    }
  }
  return batch;
}

inline ClassifierHead random_head(Rng& rng, std::size_t dim,
                                  std::size_t num_classes, Family family,
                                  BiasMode bias_mode, double gamma) {
  ClassifierHead head;
  head.dim = dim;
  head.num_classes = num_classes;
  head.family = family;
  head.bias_mode = bias_mode;
  head.gamma = gamma;
  head.weights.resize(dim * num_classes);
  for (double& w : head.weights) w = rng.normal();
  head.bias.assign(num_classes, 0.0);
  if (bias_mode == BiasMode::kDiverse) {
    for (double& b : head.bias) b = rng.uniform(-1.0, 1.0);
  } else if (bias_mode == BiasMode::kUnified) {
    const double b = rng.uniform(-1.0, 1.0);
    std::fill(head.bias.begin(), head.bias.end(), b);
  }
  return head;
}

inline std::vector<double> random_feature(Rng& rng, std::size_t dim) {
  std::vector<double> x(dim);
  for (double& v : x) v = rng.normal();
  return x;
}

// ---------------------------------------------------------------------------
// Brute-force threshold oracles

// A sample classifies at threshold t iff pos > t >= gate, where gate is its
// own max negative metric.
struct PosGate {
  double pos;
  double gate;
};

inline std::vector<PosGate> pos_gate_pairs(const MetricBatch& batch) {
  std::vector<PosGate> pairs;
  pairs.reserve(batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto row = batch.row(s);
    const std::size_t label = static_cast<std::size_t>(batch.labels[s]);
    double max_neg = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j != label) max_neg = std::max(max_neg, row[j]);
    }
    pairs.push_back({row[label], max_neg});
  }
  return pairs;
}

inline std::size_t count_at_threshold(const std::vector<PosGate>& pairs,
                                      double t) {
  std::size_t count = 0;
  for (const PosGate& p : pairs) {
    if (p.pos > t && t >= p.gate) ++count;
  }
  return count;
}

inline std::size_t count_at_threshold(const MetricBatch& batch, double t) {
  return count_at_threshold(pos_gate_pairs(batch), t);
}

// Best count over a dense grid spanning [min metric - 1, max metric + 1].
inline std::size_t grid_scan_uniform(const MetricBatch& batch,
                                     std::size_t num_thresholds) {
  const double lo =
      *std::min_element(batch.metrics.begin(), batch.metrics.end()) - 1.0;
  const double hi =
      *std::max_element(batch.metrics.begin(), batch.metrics.end()) + 1.0;
  const std::vector<PosGate> pairs = pos_gate_pairs(batch);
  std::size_t best = 0;
  for (std::size_t k = 0; k < num_thresholds; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) /
                              static_cast<double>(num_thresholds - 1);
    best = std::max(best, count_at_threshold(pairs, t));
  }
  return best;
}

// Exhaustive evaluation at every observed metric value (plus one below).
inline std::size_t value_scan_uniform(const MetricBatch& batch) {
  std::vector<double> candidates = batch.metrics;
  candidates.push_back(
      *std::min_element(batch.metrics.begin(), batch.metrics.end()) - 1.0);
  const std::vector<PosGate> pairs = pos_gate_pairs(batch);
  std::size_t best = 0;
  for (double t : candidates) {
    best = std::max(best, count_at_threshold(pairs, t));
  }
  return best;
}

inline MetricBatch class_subset(const MetricBatch& batch, std::size_t cls) {
  MetricBatch subset;
  subset.num_classes = batch.num_classes;
  subset.bias_included = batch.bias_included;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    if (static_cast<std::size_t>(batch.labels[s]) != cls) continue;
    const auto row = batch.row(s);
    subset.metrics.insert(subset.metrics.end(), row.begin(), row.end());
    subset.labels.push_back(batch.labels[s]);
  }
  return subset;
}

// Per-class dense-grid scan; classes optimize independently.
inline std::size_t grid_scan_class_wise(const MetricBatch& batch,
                                        std::size_t num_thresholds) {
  std::size_t total = 0;
  for (std::size_t c = 0; c < batch.num_classes; ++c) {
    const MetricBatch subset = class_subset(batch, c);
    if (subset.size() == 0) continue;
    total += grid_scan_uniform(subset, num_thresholds);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient oracle

inline double relative_error(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Loss as a plain function of (head parameters, feature), evaluated through
// the public forward map.
inline double loss_of(const LossSpec& spec, const ClassifierHead& head,
                      const std::vector<double>& feature, int label) {
  LabeledDataset single;
  single.dim = head.dim;
  single.num_classes = head.num_classes;
  single.features = feature;
  single.labels = {label};
  const MetricBatch raw = compute_metrics(head, single, /*include_bias=*/false);
  return loss_value(spec, raw.row(0), label, head.bias);
}

struct FiniteDifferenceReport {
  double max_rel_err_weights = 0.0;
  double max_rel_err_feature = 0.0;
  double max_rel_err_bias = 0.0;
  double max_rel_err_metrics = 0.0;
};

// Central differences with the given step against every analytic gradient
// block.  Bias differences respect the parameterization: per-entry for the
// diverse mode, one shared scalar for the unified mode.
inline FiniteDifferenceReport finite_difference_check(
    const LossSpec& spec, const ClassifierHead& head,
    const std::vector<double>& feature, int label, double step = 1e-5) {
  const LossGradients grads = loss_gradients(spec, feature, head, label);
  FiniteDifferenceReport report;

  for (std::size_t i = 0; i < head.weights.size(); ++i) {
    ClassifierHead plus = head;
    ClassifierHead minus = head;
    plus.weights[i] += step;
    minus.weights[i] -= step;
    const double numeric = (loss_of(spec, plus, feature, label) -
                            loss_of(spec, minus, feature, label)) /
                           (2.0 * step);
    report.max_rel_err_weights = std::max(
        report.max_rel_err_weights, relative_error(grads.d_weights[i], numeric));
  }

  for (std::size_t i = 0; i < feature.size(); ++i) {
    std::vector<double> plus = feature;
    std::vector<double> minus = feature;
    plus[i] += step;
    minus[i] -= step;
    const double numeric = (loss_of(spec, head, plus, label) -
                            loss_of(spec, head, minus, label)) /
                           (2.0 * step);
    report.max_rel_err_feature = std::max(
        report.max_rel_err_feature, relative_error(grads.d_feature[i], numeric));
  }

  if (spec.formula != LossFormula::kNaive &&
      spec.bias_mode == BiasMode::kDiverse) {
    for (std::size_t i = 0; i < head.bias.size(); ++i) {
      ClassifierHead plus = head;
      ClassifierHead minus = head;
      plus.bias[i] += step;
      minus.bias[i] -= step;
      const double numeric = (loss_of(spec, plus, feature, label) -
                              loss_of(spec, minus, feature, label)) /
                             (2.0 * step);
      report.max_rel_err_bias = std::max(
          report.max_rel_err_bias, relative_error(grads.d_bias[i], numeric));
    }
  } else if (spec.formula != LossFormula::kNaive &&
             spec.bias_mode == BiasMode::kUnified) {
    ClassifierHead plus = head;
    ClassifierHead minus = head;
    for (double& b : plus.bias) b += step;
    for (double& b : minus.bias) b -= step;
    const double numeric = (loss_of(spec, plus, feature, label) -
                            loss_of(spec, minus, feature, label)) /
                           (2.0 * step);
    report.max_rel_err_bias =
        std::max(report.max_rel_err_bias,
                 relative_error(grads.d_bias.front(), numeric));
  }

  // d_metrics, differentiated directly through loss_value.
  {
    LabeledDataset single;
    single.dim = head.dim;
    single.num_classes = head.num_classes;
    single.features = feature;
    single.labels = {label};
    const MetricBatch raw =
        compute_metrics(head, single, /*include_bias=*/false);
    std::vector<double> metrics(raw.row(0).begin(), raw.row(0).end());
    for (std::size_t j = 0; j < metrics.size(); ++j) {
      std::vector<double> plus = metrics;
      std::vector<double> minus = metrics;
      plus[j] += step;
      minus[j] -= step;
      const double numeric = (loss_value(spec, plus, label, head.bias) -
                              loss_value(spec, minus, label, head.bias)) /
                             (2.0 * step);
      report.max_rel_err_metrics =
          std::max(report.max_rel_err_metrics,
                   relative_error(grads.d_metrics[j], numeric));
    }
  }
  return report;
}

// The 14 loss forms: twelve canonical variants plus naive and class-wise BCE
// (each of the last two in both families).
inline std::vector<LossSpec> all_loss_forms(double gamma = 4.0) {
  std::vector<LossSpec> specs;
  for (const std::string& name : canonical_loss_names()) {
    specs.push_back(parse_loss_name(name, gamma));
  }
  for (Family family : {Family::kLinear, Family::kNormalized}) {
    LossSpec naive;
    naive.formula = LossFormula::kNaive;
    naive.family = family;
    naive.bias_mode = BiasMode::kZero;
    naive.gamma = gamma;
    specs.push_back(naive);
    LossSpec classwise;
    classwise.formula = LossFormula::kBceClasswise;
    classwise.family = family;
    classwise.bias_mode = BiasMode::kDiverse;
    classwise.gamma = gamma;
    specs.push_back(classwise);
  }
  return specs;
}

}  // namespace uniclass::testing

#endif  // UNICLASS_TESTS_TEST_SUPPORT_HPP_
