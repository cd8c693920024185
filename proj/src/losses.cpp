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

#include "uniclass/losses.hpp"

#include <algorithm>
#include <cmath>

#include "uniclass/error.hpp"
#include "uniclass/kernels.hpp"
#include "uniclass/metrics.hpp"

namespace uniclass {

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sum_exp(std::span<const double> v) {
  const double max = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - max);
  return max + std::log(sum);
}

void LossSpec::validate() const {
  if (formula == LossFormula::kBceClasswise) {
    require(bias_mode == BiasMode::kDiverse,
            "class-wise BCE requires the diverse bias mode");
  }
  if (family == Family::kNormalized) {
    require(gamma > 0.0, "normalized family requires gamma > 0, got ", gamma);
  }
}

std::string loss_name(const LossSpec& spec) {
  if (spec.formula == LossFormula::kNaive) return "naive";
  if (spec.formula == LossFormula::kBceClasswise) return "bce-cw";
  std::string name = spec.formula == LossFormula::kSoftmax ? "soft-" : "bce-";
  if (spec.family == Family::kNormalized) name += 'n';
  switch (spec.bias_mode) {
    case BiasMode::kZero: name += '0'; break;
    case BiasMode::kDiverse: name += 'd'; break;
    case BiasMode::kUnified: name += 'u'; break;
  }
  return name;
}

const std::array<std::string, 12>& canonical_loss_names() {
  static const std::array<std::string, 12> kNames = {
      "soft-0",  "soft-d",  "soft-u",  "soft-n0", "soft-nd", "soft-nu",
      "bce-0",   "bce-d",   "bce-u",   "bce-n0",  "bce-nd",  "bce-nu"};
  return kNames;
}

LossSpec parse_loss_name(const std::string& name, double gamma) {
  LossSpec spec;
  spec.gamma = gamma;
  if (name == "naive") {
    spec.formula = LossFormula::kNaive;
    spec.bias_mode = BiasMode::kZero;
    return spec;
  }
  if (name == "bce-cw") {
    spec.formula = LossFormula::kBceClasswise;
    spec.bias_mode = BiasMode::kDiverse;
    return spec;
  }
  const auto dash = name.find('-');
  require(dash != std::string::npos, "unknown loss name '", name, "'");
  const std::string formula = name.substr(0, dash);
  std::string suffix = name.substr(dash + 1);
  if (formula == "soft") {
    spec.formula = LossFormula::kSoftmax;
  } else if (formula == "bce") {
    spec.formula = LossFormula::kBce;
  } else {
    fail("unknown loss name '", name, "'");
  }
  spec.family = Family::kLinear;
  if (!suffix.empty() && suffix.front() == 'n') {
    spec.family = Family::kNormalized;
    suffix = suffix.substr(1);
  }
  if (suffix == "0") {
    spec.bias_mode = BiasMode::kZero;
  } else if (suffix == "d") {
    spec.bias_mode = BiasMode::kDiverse;
  } else if (suffix == "u") {
    spec.bias_mode = BiasMode::kUnified;
  } else {
    fail("unknown loss name '", name, "'");
  }
  return spec;
}

namespace {

// Bias sign inside the exponent: +b for the linear rows, -b for the
// normalized rows.  Every formula below then reads one signed metric
// m_j = c_j + sign * b_j.
double bias_sign(Family family) {
  return family == Family::kLinear ? 1.0 : -1.0;
}

void check_single_sample_inputs(const LossSpec& spec,
                                std::span<const double> metrics, int label,
                                std::span<const double> bias) {
  spec.validate();
  const std::size_t n = metrics.size();
  require(n >= 2, "losses are defined for N >= 2 classes, got ", n);
  require(label >= 0 && static_cast<std::size_t>(label) < n, "label ", label,
          " outside [0, ", n, ")");
  require(bias.size() == n, "bias length ", bias.size(), " != N = ", n);
  if (spec.formula == LossFormula::kNaive) return;  // bias is ignored
  if (spec.bias_mode == BiasMode::kZero) {
    for (double b : bias) require(b == 0.0, "zero bias mode with nonzero bias");
  } else if (spec.bias_mode == BiasMode::kUnified) {
    for (double b : bias) {
      require(b == bias.front(), "unified bias mode with unequal entries");
    }
  }
}

// Signed metrics consumed by the softmax/bce formulas.  For the class-wise
// BCE every term of a class-i sample uses that class's own bias b_i.
std::vector<double> signed_metrics(const LossSpec& spec,
                                   std::span<const double> metrics, int label,
                                   std::span<const double> bias) {
  const double sign = bias_sign(spec.family);
  std::vector<double> m(metrics.begin(), metrics.end());
  if (spec.formula == LossFormula::kBceClasswise) {
    const double b = bias[static_cast<std::size_t>(label)];
    for (double& v : m) v += sign * b;
  } else {
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += sign * bias[j];
  }
  return m;
}

double naive_loss(std::span<const double> metrics, int label) {
  const std::size_t n = metrics.size();
  double negatives = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != static_cast<std::size_t>(label)) negatives += metrics[j];
  }
  return -metrics[static_cast<std::size_t>(label)] +
         negatives / static_cast<double>(n - 1);
}

// dL/dm for the signed metrics; the naive formula is handled separately.
std::vector<double> metric_gradient(const LossSpec& spec,
                                    std::span<const double> m, int label) {
  const std::size_t n = m.size();
  std::vector<double> g(n);
  if (spec.formula == LossFormula::kSoftmax) {
    const double lse = log_sum_exp(m);
    for (std::size_t j = 0; j < n; ++j) g[j] = std::exp(m[j] - lse);
    g[static_cast<std::size_t>(label)] -= 1.0;
    return g;
  }
  for (std::size_t j = 0; j < n; ++j) g[j] = sigmoid(m[j]);
  g[static_cast<std::size_t>(label)] =
      -sigmoid(-m[static_cast<std::size_t>(label)]);
  return g;
}

}  // namespace

double loss_value(const LossSpec& spec, std::span<const double> raw_metrics,
                  int label, std::span<const double> bias) {
  check_single_sample_inputs(spec, raw_metrics, label, bias);
  if (spec.formula == LossFormula::kNaive) {
    return naive_loss(raw_metrics, label);
  }
  const std::vector<double> m = signed_metrics(spec, raw_metrics, label, bias);
  const std::size_t pos = static_cast<std::size_t>(label);
  if (spec.formula == LossFormula::kSoftmax) {
    // Grouped as (max - m_pos) + log(sum of shifted exps): both terms depend
    // only on metric differences, so adding an exactly representable constant
    // to every metric reproduces the loss bit for bit.
    const double max = *std::max_element(m.begin(), m.end());
    double sum = 0.0;
    for (double v : m) sum += std::exp(v - max);
    return (max - m[pos]) + std::log(sum);
  }
  double loss = softplus(-m[pos]);
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (j != pos) loss += softplus(m[j]);
  }
  return loss;
}

LossGradients loss_gradients(const LossSpec& spec,
                             std::span<const double> feature,
                             const ClassifierHead& head, int label) {
  spec.validate();
  head.validate();
  require(spec.family == head.family,
          "loss family does not match the classifier head family");
  if (spec.family == Family::kNormalized) {
    require(spec.gamma == head.gamma, "loss gamma ", spec.gamma,
            " != head gamma ", head.gamma);
  }
  require(feature.size() == head.dim, "feature length ", feature.size(),
          " != head dim ", head.dim);
  const std::size_t n = head.num_classes;
  require(label >= 0 && static_cast<std::size_t>(label) < n, "label ", label,
          " outside [0, ", n, ")");

  // Raw (bias-free) metrics plus the geometry needed for the chain rule.
  std::vector<double> raw(n);
  std::vector<double> weight_norms;
  double x_norm = 0.0;
  if (head.family == Family::kLinear) {
    for (std::size_t i = 0; i < n; ++i) {
      raw[i] = kernels::dot(head.weight_column(i).data(), feature.data(),
                            head.dim);
    }
  } else {
    weight_norms.resize(n);
    x_norm = std::sqrt(kernels::squared_norm(feature.data(), feature.size()));
    require(x_norm > 1e-12, "feature norm <= 1e-12 under normalized family");
    for (std::size_t i = 0; i < n; ++i) {
      const auto col = head.weight_column(i);
      weight_norms[i] =
          std::sqrt(kernels::squared_norm(col.data(), col.size()));
      require(weight_norms[i] > 1e-12, "weight column ", i,
              " has norm <= 1e-12 under normalized family");
      raw[i] = head.gamma *
               kernels::dot(col.data(), feature.data(), head.dim) /
               (weight_norms[i] * x_norm);
    }
  }

  LossGradients grads;
  grads.value = loss_value(spec, raw, label, head.bias);
  grads.d_metrics.assign(n, 0.0);
  grads.d_bias.assign(n, 0.0);
  grads.d_weights.assign(n * head.dim, 0.0);
  grads.d_feature.assign(head.dim, 0.0);

  const std::size_t pos = static_cast<std::size_t>(label);
  if (spec.formula == LossFormula::kNaive) {
    for (std::size_t j = 0; j < n; ++j) {
      grads.d_metrics[j] = 1.0 / static_cast<double>(n - 1);
    }
    grads.d_metrics[pos] = -1.0;
  } else {
    const std::vector<double> m = signed_metrics(spec, raw, label, head.bias);
    grads.d_metrics = metric_gradient(spec, m, label);

    const double sign = bias_sign(spec.family);
    switch (spec.bias_mode) {
      case BiasMode::kZero:
        break;  // bias is not a parameter; gradient stays zero
      case BiasMode::kDiverse:
        if (spec.formula == LossFormula::kBceClasswise) {
          double total = 0.0;
          for (double g : grads.d_metrics) total += g;
          grads.d_bias[pos] = sign * total;
        } else {
          for (std::size_t j = 0; j < n; ++j) {
            grads.d_bias[j] = sign * grads.d_metrics[j];
          }
        }
        break;
      case BiasMode::kUnified: {
        double total = 0.0;
        for (double g : grads.d_metrics) total += g;
        std::fill(grads.d_bias.begin(), grads.d_bias.end(), sign * total);
        break;
      }
    }
  }

  // Chain through the metric map.  dm/dc = 1 for every formula, so
  // d_metrics doubles as dL/dc.
  if (head.family == Family::kLinear) {
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grads.d_metrics[i];
      if (g == 0.0) continue;
      kernels::axpy(g, feature.data(), grads.d_weights.data() + i * head.dim,
                    head.dim);
      kernels::axpy(g, head.weight_column(i).data(), grads.d_feature.data(),
                    head.dim);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grads.d_metrics[i];
      if (g == 0.0) continue;
      const double cos_i = raw[i] / head.gamma;
      const double wn = weight_norms[i];
      double* d_col = grads.d_weights.data() + i * head.dim;
      // d(gamma cos)/dW_i = gamma * (x / (|W_i||x|) - cos_i W_i / |W_i|^2)
      kernels::axpy(g * head.gamma / (wn * x_norm), feature.data(), d_col,
                    head.dim);
      kernels::axpy(-g * head.gamma * cos_i / (wn * wn),
                    head.weight_column(i).data(), d_col, head.dim);
      // d(gamma cos)/dx = gamma * (W_i / (|W_i||x|) - cos_i x / |x|^2)
      kernels::axpy(g * head.gamma / (wn * x_norm),
                    head.weight_column(i).data(), grads.d_feature.data(),
                    head.dim);
      kernels::axpy(-g * head.gamma * cos_i / (x_norm * x_norm),
                    feature.data(), grads.d_feature.data(), head.dim);
    }
  }
  return grads;
}

double batch_loss(const LossSpec& spec, const ClassifierHead& head,
                  const LabeledDataset& data) {
  require(data.size() > 0, "batch loss of an empty dataset");
  const MetricBatch raw = compute_metrics(head, data, /*include_bias=*/false);
  // Neumaier-compensated sum in index order.
  double sum = 0.0, compensation = 0.0;
  for (std::size_t s = 0; s < raw.size(); ++s) {
    const double value = loss_value(spec, raw.row(s), raw.labels[s], head.bias);
    const double t = sum + value;
    if (std::fabs(sum) >= std::fabs(value)) {
      compensation += (sum - t) + value;
    } else {
      compensation += (value - t) + sum;
    }
    sum = t;
  }
  return (sum + compensation) / static_cast<double>(data.size());
}

}  // namespace uniclass
