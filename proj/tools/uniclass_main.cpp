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

// uniclass: classification losses, uniform-accuracy evaluation, threshold
// calibration, and small deterministic training experiments.
//
// Exit codes: 0 success, 1 runtime failure (diverged run, bad file), 2 usage.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "uniclass/data_io.hpp"
#include "uniclass/error.hpp"
#include "uniclass/evaluation.hpp"
#include "uniclass/losses.hpp"
#include "uniclass/metrics.hpp"
#include "uniclass/theory.hpp"
#include "uniclass/trainer.hpp"

namespace fs = std::filesystem;
using namespace uniclass;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("UNICLASS_OUT_DIR");
  return env != nullptr ? env : "uniclass-out";
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

// Every run leaves its full flag set next to its outputs.
void write_config_echo(const fs::path& dir, const ConfigEcho& echo) {
  std::ofstream out(dir / "run_config.txt");
  require(out.good(), "cannot write run_config.txt under '", dir.string(),
          "'");
  for (const auto& [key, value] : echo) {
    out << key << " = " << value << "\n";
  }
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    values.push_back(std::strtod(token.c_str(), nullptr));
  }
  require(!values.empty(), "empty list '", text, "'");
  return values;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> values;
  if (text.empty()) return values;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    values.push_back(
        static_cast<std::size_t>(std::strtoull(token.c_str(), nullptr, 10)));
  }
  return values;
}

// The twelve canonical losses are the CLI surface; anything else is a usage
// error that lists them.
LossSpec parse_cli_loss(const std::string& name, double gamma) {
  for (const std::string& canonical : canonical_loss_names()) {
    if (name == canonical) return parse_loss_name(name, gamma);
  }
  std::string all;
  for (const std::string& n : canonical_loss_names()) {
    if (!all.empty()) all += ", ";
    all += n;
  }
  throw CLI::ValidationError("--loss",
                             "unknown loss '" + name + "'; valid names: " + all);
}

struct DataFlags {
  std::string features_path;
  bool synthetic = false;
  std::size_t classes = 16;
  std::size_t dim = 32;
  std::size_t per_class = 100;
  double center_scale = 10.0;
  double sigma = 1.0;
  std::uint64_t data_seed = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--features", features_path,
                    "feature CSV (id,label,f0,...)");
    cmd->add_flag("--synthetic", synthetic, "generate a synthetic dataset");
    cmd->add_option("--classes", classes, "synthetic: number of classes");
    cmd->add_option("--dim", dim, "synthetic: feature dimension");
    cmd->add_option("--per-class", per_class, "synthetic: samples per class");
    cmd->add_option("--center-scale", center_scale,
                    "synthetic: class-center radius");
    cmd->add_option("--sigma", sigma, "synthetic: noise standard deviation");
    cmd->add_option("--data-seed", data_seed, "synthetic: dataset seed");
  }

  LabeledDataset load(ConfigEcho& echo) const {
    require(synthetic != !features_path.empty(),
            "pass exactly one of --features or --synthetic");
    if (synthetic) {
      SyntheticSpec spec;
      spec.num_classes = classes;
      spec.dim = dim;
      spec.samples_per_class = per_class;
      spec.center_scale = center_scale;
      spec.noise_sigma = sigma;
      spec.seed = data_seed;
      echo.emplace_back("cli.data", "synthetic");
      echo.emplace_back("cli.data_seed", std::to_string(data_seed));
      return generate_synthetic(spec);
    }
    echo.emplace_back("cli.data", features_path);
    CsvLoadResult result = load_features_csv(features_path);
    for (const std::string& warning : result.warnings) {
      std::fprintf(stderr, "warning: %s\n", warning.c_str());
    }
    return std::move(result.data);
  }
};

struct TrainFlags {
  std::string loss_name = "soft-d";
  double gamma = 96.0;
  int epochs = 50;
  int batch_size = 32;
  double lr0 = 0.05;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::uint64_t seed = 1;
  int bias_init = 0;
  std::string hidden;

  void attach(CLI::App* cmd) {
    cmd->add_option("--loss", loss_name,
                    "loss name: {soft,bce}-{0,d,u,n0,nd,nu}");
    cmd->add_option("--gamma", gamma, "scale of the normalized classifier");
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--batch-size", batch_size, "mini-batch size");
    cmd->add_option("--lr", lr0, "initial learning rate (cosine decayed)");
    cmd->add_option("--momentum", momentum, "SGD momentum");
    cmd->add_option("--weight-decay", weight_decay, "L2 penalty on weights");
    cmd->add_option("--seed", seed, "training seed");
    cmd->add_option("--bias-init", bias_init,
                    "diverse-bias initialization mode (0..7)");
    cmd->add_option("--hidden", hidden,
                    "extractor hidden dims, e.g. 32,32 (empty = linear)");
  }

  TrainConfig config() const {
    TrainConfig cfg;
    cfg.loss = parse_cli_loss(loss_name, gamma);
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.lr0 = lr0;
    cfg.momentum = momentum;
    cfg.weight_decay = weight_decay;
    cfg.seed = seed;
    cfg.bias_init_mode = bias_init;
    cfg.hidden_dims = parse_size_list(hidden);
    return cfg;
  }

  void echo_into(ConfigEcho& echo) const {
    echo.emplace_back("cli.loss", loss_name);
    echo.emplace_back("cli.gamma", format_double(gamma));
    echo.emplace_back("cli.epochs", std::to_string(epochs));
    echo.emplace_back("cli.batch_size", std::to_string(batch_size));
    echo.emplace_back("cli.lr", format_double(lr0));
    echo.emplace_back("cli.momentum", format_double(momentum));
    echo.emplace_back("cli.weight_decay", format_double(weight_decay));
    echo.emplace_back("cli.seed", std::to_string(seed));
    echo.emplace_back("cli.bias_init", std::to_string(bias_init));
    echo.emplace_back("cli.hidden", hidden);
  }
};

AccuracyReport final_report(const TrainRun& run, const LabeledDataset& eval) {
  if (!run.eval_history.empty()) return run.eval_history.back();
  return evaluate(evaluate_model(run.extractor, run.final_head, eval));
}

void write_sweep_csv(const fs::path& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  require(out.good(), "cannot write '", path.string(), "'");
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << header[i];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << row[i];
    }
    out << "\n";
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"uniform classification: losses, threshold calibration, and "
               "desk-scale training experiments"};
  app.name("uniclass");
  app.require_subcommand(1);

  std::string out_dir = default_out_dir();
  app.add_option("--out", out_dir,
                 "output directory (default: $UNICLASS_OUT_DIR or "
                 "./uniclass-out)");

  // gen-data ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen-data", "write a synthetic feature CSV");
  auto gen_data = std::make_shared<DataFlags>();
  gen_data->synthetic = true;
  gen->add_option("--classes", gen_data->classes, "number of classes");
  gen->add_option("--dim", gen_data->dim, "feature dimension");
  gen->add_option("--per-class", gen_data->per_class, "samples per class");
  gen->add_option("--center-scale", gen_data->center_scale,
                  "class-center radius");
  gen->add_option("--sigma", gen_data->sigma, "noise standard deviation");
  gen->add_option("--seed", gen_data->data_seed, "dataset seed");
  gen->callback([&out_dir, gen_data] {
    SyntheticSpec spec;
    spec.num_classes = gen_data->classes;
    spec.dim = gen_data->dim;
    spec.samples_per_class = gen_data->per_class;
    spec.center_scale = gen_data->center_scale;
    spec.noise_sigma = gen_data->sigma;
    spec.seed = gen_data->data_seed;
    const fs::path dir = ensure_out_dir(out_dir);
    write_config_echo(dir,
                      {{"cli.subcommand", "gen-data"},
                       {"cli.classes", std::to_string(gen_data->classes)},
                       {"cli.dim", std::to_string(gen_data->dim)},
                       {"cli.per_class", std::to_string(gen_data->per_class)},
                       {"cli.center_scale", format_double(gen_data->center_scale)},
                       {"cli.sigma", format_double(gen_data->sigma)},
                       {"cli.seed", std::to_string(gen_data->data_seed)}});
    save_features_csv(generate_synthetic(spec), (dir / "features.csv").string());
    std::printf("wrote %s\n", (dir / "features.csv").string().c_str());
  });

  // train ------------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "train a classifier and report the "
                                         "three accuracies");
  auto tr_train = std::make_shared<TrainFlags>();
  auto tr_data = std::make_shared<DataFlags>();
  auto tr_export = std::make_shared<bool>(false);
  tr_train->attach(tr);
  tr_data->attach(tr);
  tr->add_flag("--export-features", *tr_export,
               "also write the extractor's output features (the head's input "
               "space) as features_extracted.csv");
  tr->callback([&out_dir, tr_train, tr_data, tr_export] {
    ConfigEcho echo{{"cli.subcommand", "train"}};
    tr_train->echo_into(echo);
    const LabeledDataset data = tr_data->load(echo);
    const TrainConfig cfg = tr_train->config();
    const TrainRun run = train(cfg, data, data);
    const AccuracyReport report = final_report(run, data);

    const fs::path dir = ensure_out_dir(out_dir);
    write_config_echo(dir, echo);
    save_report(run, (dir / "train_run.report").string(), echo);
    save_report(report, (dir / "report.report").string(), echo);
    save_head_json(run.final_head, (dir / "head.json").string());
    if (*tr_export) {
      save_features_csv(extract_features(run.extractor, data),
                        (dir / "features_extracted.csv").string());
    }
    std::printf("a_sw=%.4f a_cw=%.4f a_uni=%.4f t_star=%.6f\n", report.a_sw,
                report.a_cw, report.a_uni, report.t_star);
    std::printf("wrote %s, %s, %s\n",
                (dir / "train_run.report").string().c_str(),
                (dir / "report.report").string().c_str(),
                (dir / "head.json").string().c_str());
  });

  // evaluate ---------------------------------------------------------------
  auto* ev = app.add_subcommand("evaluate",
                                "evaluate a saved head on a feature CSV");
  auto ev_features = std::make_shared<std::string>();
  auto ev_head = std::make_shared<std::string>();
  auto ev_raw = std::make_shared<bool>(false);
  auto ev_softmax = std::make_shared<bool>(false);
  ev->add_option("--features", *ev_features, "feature CSV")->required();
  ev->add_option("--head", *ev_head, "head JSON")->required();
  ev->add_flag("--raw-metrics", *ev_raw,
               "evaluate on bias-free metrics instead of biased ones");
  ev->add_flag("--softmax-transform", *ev_softmax,
               "apply the softmax transform to every metric row first");
  ev->callback([&out_dir, ev_features, ev_head, ev_raw, ev_softmax] {
    ConfigEcho echo{{"cli.subcommand", "evaluate"},
                    {"cli.features", *ev_features},
                    {"cli.head", *ev_head},
                    {"cli.raw_metrics", *ev_raw ? "1" : "0"},
                    {"cli.softmax_transform", *ev_softmax ? "1" : "0"}};
    const CsvLoadResult loaded = load_features_csv(*ev_features);
    for (const std::string& warning : loaded.warnings) {
      std::fprintf(stderr, "warning: %s\n", warning.c_str());
    }
    const ClassifierHead head = load_head_json(*ev_head);
    MetricBatch batch = compute_metrics(head, loaded.data, !*ev_raw);
    if (*ev_softmax) batch = softmax_transform(batch);
    const AccuracyReport report = evaluate(batch);
    const fs::path dir = ensure_out_dir(out_dir);
    write_config_echo(dir, echo);
    save_report(report, (dir / "report.report").string(), echo);
    std::printf("a_sw=%.4f a_cw=%.4f a_uni=%.4f t_star=%.6f\n", report.a_sw,
                report.a_cw, report.a_uni, report.t_star);
    std::printf("wrote %s\n", (dir / "report.report").string().c_str());
  });

  // sweep-gamma ------------------------------------------------------------
  auto* sg = app.add_subcommand("sweep-gamma",
                                "train once per gamma (normalized losses)");
  auto sg_train = std::make_shared<TrainFlags>();
  auto sg_data = std::make_shared<DataFlags>();
  auto sg_gammas = std::make_shared<std::string>("1,2,16,96");
  sg_train->loss_name = "bce-nu";
  sg_train->attach(sg);
  sg_data->attach(sg);
  sg->add_option("--gammas", *sg_gammas, "comma-separated gamma grid");
  sg->callback([&out_dir, sg_train, sg_data, sg_gammas] {
    ConfigEcho echo{{"cli.subcommand", "sweep-gamma"},
                    {"cli.gammas", *sg_gammas}};
    sg_train->echo_into(echo);
    const LabeledDataset data = sg_data->load(echo);
    const std::vector<double> gammas = parse_double_list(*sg_gammas);
    const auto rows = sweep_gamma(sg_train->config(), gammas, data, data);

    std::vector<std::vector<std::string>> cells;
    for (const auto& row : rows) {
      std::printf("gamma=%g a_sw=%.4f a_cw=%.4f a_uni=%.4f t_star=%.6f "
                  "learned_bias=%.6f condition=%s\n",
                  row.gamma, row.report.a_sw, row.report.a_cw,
                  row.report.a_uni, row.report.t_star, row.learned_bias,
                  row.condition ? "true" : "false");
      cells.push_back({format_double(row.gamma), format_double(row.report.a_sw),
                       format_double(row.report.a_cw),
                       format_double(row.report.a_uni),
                       format_double(row.report.t_star),
                       format_double(row.learned_bias),
                       row.condition ? "true" : "false"});
    }
    const fs::path dir = ensure_out_dir(out_dir);
    write_config_echo(dir, echo);
    write_sweep_csv(dir / "sweep_gamma.csv",
                    {"gamma", "a_sw", "a_cw", "a_uni", "t_star",
                     "learned_bias", "condition"},
                    cells);
    std::printf("wrote %s\n", (dir / "sweep_gamma.csv").string().c_str());
  });

  // sweep-bias-init ----------------------------------------------------------
  auto* sb = app.add_subcommand(
      "sweep-bias-init", "train once per bias initialization mode (0..7)");
  auto sb_train = std::make_shared<TrainFlags>();
  auto sb_data = std::make_shared<DataFlags>();
  auto sb_modes = std::make_shared<std::string>("0,1,2,3,4,5,6,7");
  sb_train->loss_name = "bce-d";
  sb_train->attach(sb);
  sb_data->attach(sb);
  sb->add_option("--modes", *sb_modes, "comma-separated init modes");
  sb->callback([&out_dir, sb_train, sb_data, sb_modes] {
    ConfigEcho echo{{"cli.subcommand", "sweep-bias-init"},
                    {"cli.modes", *sb_modes}};
    sb_train->echo_into(echo);
    const LabeledDataset data = sb_data->load(echo);
    const TrainConfig base = sb_train->config();
    require(base.loss.bias_mode == BiasMode::kDiverse,
            "--loss must be a diverse-bias variant (soft-d, soft-nd, bce-d, "
            "bce-nd) for the bias-init sweep");
    std::vector<std::vector<std::string>> cells;
    for (std::size_t mode : parse_size_list(*sb_modes)) {
      TrainConfig cfg = base;
      cfg.bias_init_mode = static_cast<int>(mode);
      std::string status = "ok";
      AccuracyReport report;
      try {
        const TrainRun run = train(cfg, data, data);
        report = final_report(run, data);
      } catch (const Error&) {
        // Divergence is an expected outcome for hostile initializations.
        status = "diverged";
      }
      std::printf("mode=%zu status=%s a_sw=%.4f a_cw=%.4f a_uni=%.4f\n", mode,
                  status.c_str(), report.a_sw, report.a_cw, report.a_uni);
      cells.push_back({std::to_string(mode), status,
                       format_double(report.a_sw), format_double(report.a_cw),
                       format_double(report.a_uni),
                       format_double(report.t_star)});
    }
    const fs::path dir = ensure_out_dir(out_dir);
    write_config_echo(dir, echo);
    write_sweep_csv(dir / "sweep_bias_init.csv",
                    {"mode", "status", "a_sw", "a_cw", "a_uni", "t_star"},
                    cells);
    std::printf("wrote %s\n", (dir / "sweep_bias_init.csv").string().c_str());
  });

  // dist-export --------------------------------------------------------------
  auto* de = app.add_subcommand(
      "dist-export", "positive/negative metric distribution statistics");
  auto de_features = std::make_shared<std::string>();
  auto de_head = std::make_shared<std::string>();
  auto de_raw = std::make_shared<bool>(false);
  auto de_bins = std::make_shared<std::size_t>(50);
  de->add_option("--features", *de_features, "feature CSV")->required();
  de->add_option("--head", *de_head, "head JSON")->required();
  de->add_flag("--raw-metrics", *de_raw, "use bias-free metrics");
  de->add_option("--bins", *de_bins, "histogram bin count");
  de->callback([&out_dir, de_features, de_head, de_raw, de_bins] {
    ConfigEcho echo{{"cli.subcommand", "dist-export"},
                    {"cli.features", *de_features},
                    {"cli.head", *de_head},
                    {"cli.raw_metrics", *de_raw ? "1" : "0"},
                    {"cli.bins", std::to_string(*de_bins)}};
    const CsvLoadResult loaded = load_features_csv(*de_features);
    const ClassifierHead head = load_head_json(*de_head);
    const MetricBatch batch = compute_metrics(head, loaded.data, !*de_raw);
    const auto report = distribution_report(batch, *de_bins);
    require(report.has_value(),
            "no sample-wise correct samples; nothing to report");
    const fs::path dir = ensure_out_dir(out_dir);
    write_config_echo(dir, echo);
    save_report(*report, (dir / "dist.report").string(), echo);
    save_histogram_csv(*report, (dir / "histogram.csv").string());
    std::printf("min_pos=%.6f max_neg=%.6f overlap_width=%.6f\n",
                report->min_pos, report->max_neg, report->overlap_width);
    std::printf("wrote %s, %s\n", (dir / "dist.report").string().c_str(),
                (dir / "histogram.csv").string().c_str());
  });

  // theory-check -------------------------------------------------------------
  auto* th = app.add_subcommand(
      "theory-check",
      "stationary bias: closed form vs numeric minimization per (N, gamma)");
  auto th_classes = std::make_shared<std::string>("2,10,100,1000");
  auto th_gammas = std::make_shared<std::string>("1,2,16,96");
  th->add_option("--classes", *th_classes, "comma-separated class counts");
  th->add_option("--gamma", *th_gammas, "comma-separated gamma values");
  th->callback([&out_dir, th_classes, th_gammas] {
    const ConfigEcho echo{{"cli.subcommand", "theory-check"},
                          {"cli.classes", *th_classes},
                          {"cli.gamma", *th_gammas}};
    std::vector<std::vector<std::string>> cells;
    for (double n_raw : parse_double_list(*th_classes)) {
      const std::size_t n = static_cast<std::size_t>(n_raw);
      for (double gamma : parse_double_list(*th_gammas)) {
        const BoundedMetricModel model{-gamma, gamma, n};
        const bool condition = stationary_bias_feasible(model);
        const double closed = stationary_bias(model);
        const double numeric = numeric_stationary_bias(model);
        std::printf("N=%zu gamma=%g condition=%s b=%.9f numeric_b=%.9f "
                    "abs_diff=%.3e\n",
                    n, gamma, condition ? "true" : "false", closed, numeric,
                    std::fabs(closed - numeric));
        cells.push_back({std::to_string(n), format_double(gamma),
                         condition ? "true" : "false", format_double(closed),
                         format_double(numeric),
                         format_double(std::fabs(closed - numeric))});
      }
    }
    const fs::path dir = ensure_out_dir(out_dir);
    write_config_echo(dir, echo);
    write_sweep_csv(dir / "theory_check.csv",
                    {"classes", "gamma", "condition", "b", "numeric_b",
                     "abs_diff"},
                    cells);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
