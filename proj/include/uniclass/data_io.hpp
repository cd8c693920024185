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

#ifndef UNICLASS_DATA_IO_HPP_
#define UNICLASS_DATA_IO_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "uniclass/evaluation.hpp"
#include "uniclass/trainer.hpp"
#include "uniclass/types.hpp"

namespace uniclass {

// Seeded Gaussian-blob generator: class centers are unit directions scaled to
// the center_scale hypersphere (redrawn on near-collision), samples are
// center + isotropic noise.
struct SyntheticSpec {
  std::size_t num_classes = 2;
  std::size_t dim = 2;
  std::size_t samples_per_class = 100;
  double center_scale = 10.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

LabeledDataset generate_synthetic(const SyntheticSpec& spec);

// Feature CSV: header `id,label,f0,...,f{M-1}`, one sample per row.  N is
// inferred as max label + 1; labels that never occur are reported in
// `warnings`.  Ragged rows, non-numeric or non-finite cells, and a missing
// header are errors carrying the offending line number.
struct CsvLoadResult {
  LabeledDataset data;
  std::vector<std::string> warnings;
};

CsvLoadResult load_features_csv(const std::string& path);
void save_features_csv(const LabeledDataset& data, const std::string& path);

// Human-readable `key = value` report trees.  Emission order and float
// formatting (17 significant digits) are fixed, so identical inputs produce
// identical bytes and every numeric field round-trips exactly.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

void save_report(const AccuracyReport& report, const std::string& path,
                 const ConfigEcho& config = {});
void save_report(const DistributionReport& report, const std::string& path,
                 const ConfigEcho& config = {});
void save_report(const TrainRun& run, const std::string& path,
                 const ConfigEcho& config = {});

using AnyReport = std::variant<AccuracyReport, DistributionReport, TrainRun>;
AnyReport load_report(const std::string& path);

// Histogram export, one row per bin: bin_lo,bin_hi,pos_count,neg_count.
void save_histogram_csv(const DistributionReport& report,
                        const std::string& path);

// Classifier head as JSON (the `evaluate` CLI consumes these).
void save_head_json(const ClassifierHead& head, const std::string& path);
ClassifierHead load_head_json(const std::string& path);

// Canonical float formatting used by every emitter ("%.17g").
std::string format_double(double value);

}  // namespace uniclass

#endif  // UNICLASS_DATA_IO_HPP_
