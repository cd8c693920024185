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

#include "uniclass/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "uniclass/error.hpp"
#include "uniclass/kernels.hpp"
#include "uniclass/metrics.hpp"
#include "uniclass/rng.hpp"
#include "uniclass/theory.hpp"

namespace uniclass {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

Mlp make_extractor(std::size_t input_dim,
                   const std::vector<std::size_t>& hidden_dims, Rng& rng) {
  Mlp mlp;
  mlp.layer_dims.push_back(input_dim);
  for (std::size_t h : hidden_dims) {
    require(h >= 1, "hidden layer of width 0");
    mlp.layer_dims.push_back(h);
  }
  for (std::size_t l = 0; l + 1 < mlp.layer_dims.size(); ++l) {
    const std::size_t fan_in = mlp.layer_dims[l];
    const std::size_t fan_out = mlp.layer_dims[l + 1];
    std::vector<double> w(fan_out * fan_in);
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (double& v : w) v = scale * rng.normal();
    mlp.weights.push_back(std::move(w));
    mlp.biases.emplace_back(fan_out, 0.0);
  }
  return mlp;
}

// Forward pass keeping every activation for backprop.  A rectifier follows
// each layer except the last.
void mlp_forward(const Mlp& mlp, std::span<const double> input,
                 std::vector<std::vector<double>>& acts) {
  acts.resize(mlp.num_layers() + 1);
  acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
    const std::size_t in = mlp.layer_dims[l];
    const std::size_t out = mlp.layer_dims[l + 1];
    acts[l + 1].assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      acts[l + 1][o] =
          mlp.biases[l][o] +
          kernels::dot(mlp.weights[l].data() + o * in, acts[l].data(), in);
    }
    if (l + 1 < mlp.num_layers()) {
      for (double& v : acts[l + 1]) v = v > 0.0 ? v : 0.0;
    }
  }
}

struct MlpGradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  void match(const Mlp& mlp) {
    weights.resize(mlp.num_layers());
    biases.resize(mlp.num_layers());
    for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
      weights[l].assign(mlp.weights[l].size(), 0.0);
      biases[l].assign(mlp.biases[l].size(), 0.0);
    }
  }

  void zero() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
  }
};

void mlp_backward(const Mlp& mlp, const std::vector<std::vector<double>>& acts,
                  std::vector<double> d_out, MlpGradients& grads) {
  for (std::size_t li = mlp.num_layers(); li-- > 0;) {
    const std::size_t in = mlp.layer_dims[li];
    const std::size_t out = mlp.layer_dims[li + 1];
    if (li + 1 < mlp.num_layers()) {
      // Rectifier: gradient passes only where the activation survived.
      for (std::size_t o = 0; o < out; ++o) {
        if (acts[li + 1][o] <= 0.0) d_out[o] = 0.0;
      }
    }
    std::vector<double> d_in(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double g = d_out[o];
      if (g == 0.0) continue;
      kernels::axpy(g, acts[li].data(), grads.weights[li].data() + o * in, in);
      grads.biases[li][o] += g;
      kernels::axpy(g, mlp.weights[li].data() + o * in, d_in.data(), in);
    }
    d_out = std::move(d_in);
  }
}

void sgd_step(std::vector<double>& param, std::vector<double>& velocity,
              const std::vector<double>& grad, double lr, double momentum,
              double weight_decay, double grad_scale) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i] * grad_scale + weight_decay * param[i];
    velocity[i] = momentum * velocity[i] - lr * g;
    param[i] += velocity[i];
  }
}

}  // namespace

std::vector<double> init_bias(int mode, std::size_t num_classes, double gamma,
                              std::uint64_t seed) {
  require(num_classes >= 2, "bias init needs N >= 2");
  (void)gamma;  // the published modes pin their constants
  const std::size_t n = num_classes;
  std::vector<double> bias(n, 0.0);
  switch (mode) {
    case 0: {
      Rng rng(seed);
      for (double& b : bias) b = rng.uniform(-0.01, 0.01);
      break;
    }
    case 1:
      for (std::size_t i = 1; i <= n; ++i) {
        bias[i - 1] = static_cast<double>(i);
      }
      break;
    case 2:
      for (std::size_t i = 1; i <= n; ++i) {
        bias[i - 1] = 64.0 * static_cast<double>(i) / static_cast<double>(n);
      }
      break;
    case 3:
      for (std::size_t i = 1; i <= n; ++i) {
        bias[i - 1] =
            64.0 * static_cast<double>(n - i) / static_cast<double>(n);
      }
      break;
    case 4:
      for (std::size_t i = 1; i <= n; ++i) {
        bias[i - 1] = std::log(96.0 * static_cast<double>(i));
      }
      break;
    case 5:
      for (std::size_t i = 1; i <= n; ++i) {
        bias[i - 1] = std::log(96.0 * static_cast<double>(n + 1 - i));
      }
      break;
    case 6:
    case 7: {
      // Interval endpoints floor(N/4), floor(N/2), floor(3N/4), inclusive.
      const std::size_t q1 = n / 4;
      const std::size_t q2 = n / 2;
      const std::size_t q3 = 3 * n / 4;
      const double high = std::log(96.0 * static_cast<double>(n));
      for (std::size_t i = 1; i <= n; ++i) {
        const bool inside = (i >= 1 && i <= q1) || (i >= q2 && i <= q3);
        const bool set_high = mode == 6 ? inside : !inside;
        bias[i - 1] = set_high ? high : 0.0;
      }
      break;
    }
    default:
      fail("unknown bias init mode ", mode, " (expected 0..7)");
  }
  return bias;
}

double cosine_lr(int epoch, int total_epochs, double lr0) {
  require(total_epochs >= 1, "cosine schedule needs total_epochs >= 1");
  require(epoch >= 0 && epoch <= total_epochs, "epoch ", epoch,
          " outside [0, ", total_epochs, "]");
  return lr0 * 0.5 *
         (1.0 + std::cos(kPi * static_cast<double>(epoch) /
                         static_cast<double>(total_epochs)));
}

LabeledDataset extract_features(const Mlp& extractor,
                                const LabeledDataset& data) {
  if (extractor.num_layers() == 0) return data;
  LabeledDataset features;
  features.dim = extractor.output_dim();
  features.num_classes = data.num_classes;
  features.labels = data.labels;
  features.features.resize(data.size() * features.dim);
  std::vector<std::vector<double>> acts;
  for (std::size_t s = 0; s < data.size(); ++s) {
    mlp_forward(extractor, data.feature(s), acts);
    std::copy(acts.back().begin(), acts.back().end(),
              features.features.begin() + s * features.dim);
  }
  return features;
}

MetricBatch evaluate_model(const Mlp& extractor, const ClassifierHead& head,
                           const LabeledDataset& data, bool include_bias) {
  return compute_metrics(head, extract_features(extractor, data),
                         include_bias);
}

double implied_threshold(const ClassifierHead& head) {
  require(head.bias_mode == BiasMode::kUnified,
          "implied threshold needs a unified bias");
  return head.family == Family::kNormalized ? head.bias.front()
                                            : -head.bias.front();
}

TrainRun train(const TrainConfig& config, const LabeledDataset& train_data,
               const LabeledDataset& eval_data) {
  train_data.validate();
  eval_data.validate();
  config.loss.validate();
  require(config.batch_size >= 1, "batch size must be >= 1");
  require(config.epochs >= 0, "negative epoch count");
  require(config.lr0 > 0.0, "learning rate must be positive");
  require(config.momentum >= 0.0 && config.momentum < 1.0,
          "momentum must lie in [0, 1)");
  require(eval_data.dim == train_data.dim &&
          eval_data.num_classes == train_data.num_classes,
          "train and eval data disagree on dim or class count");

  Rng rng(config.seed);
  TrainRun run;
  run.config = config;
  run.extractor = make_extractor(train_data.dim, config.hidden_dims, rng);

  const std::size_t feature_dim = run.extractor.num_layers() == 0
                                      ? train_data.dim
                                      : run.extractor.output_dim();
  const std::size_t n = train_data.num_classes;
  ClassifierHead& head = run.final_head;
  head.dim = feature_dim;
  head.num_classes = n;
  head.family = config.loss.family;
  head.bias_mode = config.loss.bias_mode;
  head.gamma = config.loss.gamma;
  head.weights.resize(feature_dim * n);
  const double head_scale = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  for (double& w : head.weights) w = head_scale * rng.normal();
  head.bias.assign(n, 0.0);
  if (config.loss.bias_mode == BiasMode::kDiverse) {
    head.bias = init_bias(config.bias_init_mode, n, config.loss.gamma,
                          config.seed);
  }
  head.validate();

  // Gradient and momentum buffers paralleling every trainable parameter.
  MlpGradients mlp_grads, mlp_velocity;
  mlp_grads.match(run.extractor);
  mlp_velocity.match(run.extractor);
  std::vector<double> head_w_grad(head.weights.size(), 0.0);
  std::vector<double> head_w_velocity(head.weights.size(), 0.0);
  std::vector<double> head_b_grad(n, 0.0);
  std::vector<double> head_b_velocity(n, 0.0);
  const bool bias_trainable = config.loss.bias_mode != BiasMode::kZero;

  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> acts;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = cosine_lr(epoch, config.epochs, config.lr0);
    rng.shuffle(order);

    double epoch_loss = 0.0;
    const std::size_t batch_size = static_cast<std::size_t>(config.batch_size);
    for (std::size_t start = 0, batch_index = 0; start < order.size();
         start += batch_size, ++batch_index) {
      const std::size_t end = std::min(start + batch_size, order.size());
      mlp_grads.zero();
      std::fill(head_w_grad.begin(), head_w_grad.end(), 0.0);
      std::fill(head_b_grad.begin(), head_b_grad.end(), 0.0);

      for (std::size_t k = start; k < end; ++k) {
        const std::size_t s = order[k];
        mlp_forward(run.extractor, train_data.feature(s), acts);
        const std::vector<double>& feature = acts.back();
        LossGradients grads;
        try {
          grads =
              loss_gradients(config.loss, feature, head, train_data.labels[s]);
        } catch (const Error& e) {
          // Exploded parameters surface as validation failures inside the
          // forward pass; keep the epoch/batch coordinates in the diagnostic.
          fail("training diverged at epoch ", epoch, ", batch ", batch_index,
               ", sample ", s, ": ", e.what());
        }
        require(std::isfinite(grads.value), "non-finite loss at epoch ", epoch,
                ", batch ", batch_index, ", sample ", s,
                "; the run diverged");
        epoch_loss += grads.value;
        kernels::axpy(1.0, grads.d_weights.data(), head_w_grad.data(),
                      head_w_grad.size());
        kernels::axpy(1.0, grads.d_bias.data(), head_b_grad.data(), n);
        mlp_backward(run.extractor, acts, std::move(grads.d_feature),
                     mlp_grads);
      }

      const double grad_scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t l = 0; l < run.extractor.num_layers(); ++l) {
        sgd_step(run.extractor.weights[l], mlp_velocity.weights[l],
                 mlp_grads.weights[l], lr, config.momentum,
                 config.weight_decay, grad_scale);
        sgd_step(run.extractor.biases[l], mlp_velocity.biases[l],
                 mlp_grads.biases[l], lr, config.momentum, 0.0, grad_scale);
      }
      sgd_step(head.weights, head_w_velocity, head_w_grad, lr, config.momentum,
               config.weight_decay, grad_scale);
      if (bias_trainable) {
        // Unified mode stays exactly unified: every slot carries the same
        // aggregated gradient, so identical updates preserve equality.
        sgd_step(head.bias, head_b_velocity, head_b_grad, lr, config.momentum,
                 0.0, grad_scale);
      }
    }

    run.loss_curve.push_back(epoch_loss /
                             static_cast<double>(train_data.size()));
    run.eval_history.push_back(
        evaluate(evaluate_model(run.extractor, head, eval_data)));
    run.bias_trace.push_back(head.bias);
  }
  return run;
}

std::vector<GammaSweepRow> sweep_gamma(const TrainConfig& config,
                                       std::span<const double> gammas,
                                       const LabeledDataset& train_data,
                                       const LabeledDataset& eval_data) {
  require(config.loss.family == Family::kNormalized,
          "gamma sweep applies to normalized-family losses");
  std::vector<GammaSweepRow> rows;
  rows.reserve(gammas.size());
  for (double gamma : gammas) {
    require(gamma > 0.0, "gamma must be positive, got ", gamma);
    TrainConfig cfg = config;
    cfg.loss.gamma = gamma;
    TrainRun run = train(cfg, train_data, eval_data);
    GammaSweepRow row;
    row.gamma = gamma;
    row.report =
        run.eval_history.empty()
            ? evaluate(evaluate_model(run.extractor, run.final_head, eval_data))
            : run.eval_history.back();
    row.learned_bias = cfg.loss.bias_mode == BiasMode::kUnified
                           ? run.final_head.bias.front()
                           : std::numeric_limits<double>::quiet_NaN();
    row.condition = stationary_bias_feasible(
        BoundedMetricModel{-gamma, gamma, train_data.num_classes});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace uniclass
