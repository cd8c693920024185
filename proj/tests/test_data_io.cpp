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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "uniclass/data_io.hpp"
#include "uniclass/error.hpp"
#include "uniclass/evaluation.hpp"
#include "uniclass/trainer.hpp"

using namespace uniclass;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "uniclass_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("synthetic generation is seed-deterministic") {
  SyntheticSpec spec;
  spec.num_classes = 4;
  spec.dim = 8;
  spec.samples_per_class = 10;
  spec.seed = 123;
  const LabeledDataset a = generate_synthetic(spec);
  const LabeledDataset b = generate_synthetic(spec);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  spec.seed = 124;
  CHECK(generate_synthetic(spec).features != a.features);
}

TEST_CASE("zero noise puts every sample on its class center") {
  SyntheticSpec spec;
  spec.num_classes = 3;
  spec.dim = 5;
  spec.samples_per_class = 7;
  spec.noise_sigma = 0.0;
  spec.center_scale = 2.5;
  spec.seed = 9;
  const LabeledDataset data = generate_synthetic(spec);
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto first =
        data.feature(static_cast<std::size_t>(data.labels[s]) * 7);
    const auto row = data.feature(s);
    for (std::size_t d = 0; d < data.dim; ++d) {
      CHECK(row[d] == first[d]);
    }
    double norm = 0.0;
    for (double v : row) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(2.5));
  }
}

TEST_CASE("noisy class means stay near the true centers") {
  SyntheticSpec spec;
  spec.num_classes = 2;
  spec.dim = 2;
  spec.samples_per_class = 500;
  spec.center_scale = 10.0;
  spec.noise_sigma = 0.1;
  spec.seed = 2026;
  // The sigma=0 run with the same seed exposes the exact centers.
  SyntheticSpec exact = spec;
  exact.noise_sigma = 0.0;
  const LabeledDataset centers = generate_synthetic(exact);
  const LabeledDataset noisy = generate_synthetic(spec);
  const double bound =
      3.0 * spec.noise_sigma / std::sqrt(static_cast<double>(500));
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t d = 0; d < 2; ++d) {
      double mean = 0.0;
      for (std::size_t k = 0; k < 500; ++k) {
        mean += noisy.feature(c * 500 + k)[d];
      }
      mean /= 500.0;
      CHECK(std::fabs(mean - centers.feature(c * 500)[d]) <= bound);
    }
  }
}

TEST_CASE("feature CSV round-trips exactly") {
  const fs::path path = scratch_dir() / "roundtrip.csv";
  SyntheticSpec spec;
  spec.num_classes = 3;
  spec.dim = 4;
  spec.samples_per_class = 5;
  spec.seed = 31;
  const LabeledDataset data = generate_synthetic(spec);
  save_features_csv(data, path.string());
  const CsvLoadResult loaded = load_features_csv(path.string());
  CHECK(loaded.data.features == data.features);
  CHECK(loaded.data.labels == data.labels);
  CHECK(loaded.data.dim == data.dim);
  CHECK(loaded.data.num_classes == data.num_classes);
  CHECK(loaded.warnings.empty());
}

TEST_CASE("CSV loader: structured errors with line numbers") {
  const fs::path dir = scratch_dir();

  const fs::path ragged = dir / "ragged.csv";
  spit(ragged, "id,label,f0,f1\n0,0,1.0,2.0\n1,1,3.0\n");
  CHECK_THROWS_WITH_AS(load_features_csv(ragged.string()),
                       doctest::Contains(":3"), Error);

  const fs::path garbage = dir / "garbage.csv";
  spit(garbage, "id,label,f0\n0,0,abc\n");
  CHECK_THROWS_WITH_AS(load_features_csv(garbage.string()),
                       doctest::Contains("abc"), Error);

  const fs::path nan_cell = dir / "nan.csv";
  spit(nan_cell, "id,label,f0\n0,0,nan\n1,1,1.0\n");
  CHECK_THROWS_WITH_AS(load_features_csv(nan_cell.string()),
                       doctest::Contains("finite"), Error);

  const fs::path bad_header = dir / "bad_header.csv";
  spit(bad_header, "sample,label,f0\n0,0,1.0\n");
  CHECK_THROWS_AS(load_features_csv(bad_header.string()), Error);

  const fs::path empty = dir / "empty.csv";
  spit(empty, "id,label,f0\n");
  CHECK_THROWS_WITH_AS(load_features_csv(empty.string()),
                       doctest::Contains("no samples"), Error);

  CHECK_THROWS_AS(load_features_csv((dir / "missing.csv").string()), Error);
}

TEST_CASE("CSV loader: label gaps become warnings, not errors") {
  const fs::path path = scratch_dir() / "gap.csv";
  spit(path, "id,label,f0,f1\n0,0,1.0,0.0\n1,2,0.0,1.0\n");
  const CsvLoadResult loaded = load_features_csv(path.string());
  CHECK(loaded.data.num_classes == 3);
  REQUIRE(loaded.warnings.size() == 1);
  CHECK(loaded.warnings[0].find("class 1") != std::string::npos);
}

TEST_CASE("accuracy report round-trip is field-exact") {
  AccuracyReport report;
  report.total = 123;
  report.a_sw = 97.56097560975611;
  report.a_cw = 91.0569105691057;
  report.a_uni = 86.99186991869918;
  report.correct_sw = 120;
  report.correct_cw = 112;
  report.correct_uni = 107;
  report.t_star = -0.12345678901234567;
  report.t_star_per_class = {0.1, -2.5e-13,
                             std::numeric_limits<double>::quiet_NaN()};
  const fs::path path = scratch_dir() / "accuracy.report";
  save_report(report, path.string(), {{"cli.subcommand", "evaluate"}});
  const AnyReport loaded = load_report(path.string());
  REQUIRE(std::holds_alternative<AccuracyReport>(loaded));
  const auto& r = std::get<AccuracyReport>(loaded);
  CHECK(r.total == report.total);
  CHECK(r.a_sw == report.a_sw);
  CHECK(r.a_cw == report.a_cw);
  CHECK(r.a_uni == report.a_uni);
  CHECK(r.correct_sw == report.correct_sw);
  CHECK(r.t_star == report.t_star);
  REQUIRE(r.t_star_per_class.size() == 3);
  CHECK(r.t_star_per_class[0] == 0.1);
  CHECK(r.t_star_per_class[1] == -2.5e-13);
  CHECK(std::isnan(r.t_star_per_class[2]));
}

TEST_CASE("report emission is byte-deterministic") {
  AccuracyReport report;
  report.total = 10;
  report.a_sw = 1.0 / 3.0 * 100.0;
  report.t_star_per_class = {1.0 / 7.0, 2.0 / 7.0};
  const fs::path p1 = scratch_dir() / "det1.report";
  const fs::path p2 = scratch_dir() / "det2.report";
  save_report(report, p1.string());
  save_report(report, p2.string());
  CHECK(slurp(p1) == slurp(p2));
  CHECK(slurp(p1).rfind("uniclass-report 1\n", 0) == 0);
}

TEST_CASE("distribution report round-trip plus histogram CSV shape") {
  MetricBatch batch;
  batch.num_classes = 2;
  batch.metrics = {1.0, 0.9, 0.2, 0.8};
  batch.labels = {0, 1};
  const auto maybe = distribution_report(batch, 6);
  REQUIRE(maybe.has_value());
  const fs::path path = scratch_dir() / "dist.report";
  save_report(*maybe, path.string());
  const AnyReport loaded = load_report(path.string());
  REQUIRE(std::holds_alternative<DistributionReport>(loaded));
  const auto& r = std::get<DistributionReport>(loaded);
  CHECK(r.min_pos == maybe->min_pos);
  CHECK(r.max_neg == maybe->max_neg);
  CHECK(r.overlap_width == maybe->overlap_width);
  CHECK(r.bin_edges == maybe->bin_edges);
  CHECK(r.histogram_pos == maybe->histogram_pos);

  const fs::path csv = scratch_dir() / "hist.csv";
  save_histogram_csv(*maybe, csv.string());
  std::ifstream in(csv);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + maybe->num_bins);  // header + one row per bin
}

TEST_CASE("train run round-trip preserves every numeric field") {
  SyntheticSpec spec;
  spec.num_classes = 2;
  spec.dim = 3;
  spec.samples_per_class = 8;
  spec.seed = 5;
  const LabeledDataset data = generate_synthetic(spec);
  TrainConfig config;
  config.loss = parse_loss_name("bce-nu", 8.0);
  config.epochs = 3;
  config.batch_size = 4;
  config.lr0 = 0.02;
  config.seed = 55;
  config.hidden_dims = {4};
  const TrainRun run = train(config, data, data);

  const fs::path path = scratch_dir() / "run.report";
  save_report(run, path.string());
  const AnyReport loaded = load_report(path.string());
  REQUIRE(std::holds_alternative<TrainRun>(loaded));
  const auto& r = std::get<TrainRun>(loaded);
  CHECK(r.final_head.weights == run.final_head.weights);
  CHECK(r.final_head.bias == run.final_head.bias);
  CHECK(r.final_head.gamma == run.final_head.gamma);
  CHECK(r.extractor.weights == run.extractor.weights);
  CHECK(r.extractor.biases == run.extractor.biases);
  CHECK(r.loss_curve == run.loss_curve);
  CHECK(r.config.seed == run.config.seed);
  CHECK(r.config.hidden_dims == run.config.hidden_dims);
  REQUIRE(r.eval_history.size() == run.eval_history.size());
  for (std::size_t e = 0; e < r.eval_history.size(); ++e) {
    CHECK(r.eval_history[e].correct_uni == run.eval_history[e].correct_uni);
    CHECK(r.eval_history[e].t_star == run.eval_history[e].t_star);
    CHECK(r.bias_trace[e] == run.bias_trace[e]);
  }
}

TEST_CASE("train run round-trip with the identity extractor") {
  SyntheticSpec spec;
  spec.num_classes = 2;
  spec.dim = 3;
  spec.samples_per_class = 6;
  spec.seed = 6;
  const LabeledDataset data = generate_synthetic(spec);
  TrainConfig config;
  config.loss = parse_loss_name("soft-u");
  config.epochs = 2;
  config.batch_size = 4;
  config.lr0 = 0.05;
  config.seed = 44;  // no hidden layers: layer_dims has a single entry
  const TrainRun run = train(config, data, data);
  const fs::path path = scratch_dir() / "linear_run.report";
  save_report(run, path.string());
  const auto r = std::get<TrainRun>(load_report(path.string()));
  CHECK(r.extractor.layer_dims == run.extractor.layer_dims);
  CHECK(r.extractor.weights.empty());
  CHECK(r.final_head.weights == run.final_head.weights);
  CHECK(r.config.hidden_dims.empty());
}

TEST_CASE("a reloaded t_star reproduces the reported uniform count") {
  Rng rng(808);
  const MetricBatch batch = testing::random_batch(rng, 5, 60);
  const AccuracyReport report = evaluate(batch);
  const fs::path path = scratch_dir() / "tstar.report";
  save_report(report, path.string());
  const auto r = std::get<AccuracyReport>(load_report(path.string()));
  CHECK(uniform_count_at(batch, r.t_star) == r.correct_uni);
}

TEST_CASE("head JSON round-trip") {
  Rng rng(4096);
  const ClassifierHead head = testing::random_head(
      rng, 6, 4, Family::kNormalized, BiasMode::kUnified, 96.0);
  const fs::path path = scratch_dir() / "head.json";
  save_head_json(head, path.string());
  const ClassifierHead loaded = load_head_json(path.string());
  CHECK(loaded.weights == head.weights);
  CHECK(loaded.bias == head.bias);
  CHECK(loaded.gamma == head.gamma);
  CHECK(loaded.family == head.family);
  CHECK(loaded.bias_mode == head.bias_mode);

  const fs::path bad = scratch_dir() / "bad.json";
  spit(bad, "{\"dim\": 2}");
  CHECK_THROWS_AS(load_head_json(bad.string()), Error);
}
