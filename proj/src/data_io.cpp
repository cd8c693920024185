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

#include "uniclass/data_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uniclass/error.hpp"
#include "uniclass/rng.hpp"

namespace uniclass {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(line);
  while (std::getline(in, token, delim)) out.push_back(token);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

double parse_double_strict(const std::string& token, std::size_t line_no,
                           const std::string& path) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  require(end == begin + token.size() && !token.empty(), path, ":", line_no,
          ": cell '", token, "' is not a number");
  require(std::isfinite(value), path, ":", line_no, ": cell '", token,
          "' is not finite");
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void SyntheticSpec::validate() const {
  require(num_classes >= 2, "synthetic data needs N >= 2 classes");
  require(dim >= 1, "synthetic data needs dim >= 1");
  require(samples_per_class >= 1, "need at least one sample per class");
  require(center_scale > 0.0, "center scale must be positive");
  require(noise_sigma >= 0.0, "noise sigma must be nonnegative");
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  // Class centers: unit directions scaled onto the center_scale hypersphere,
  // redrawn on (vanishingly unlikely) near-collisions.
  std::vector<std::vector<double>> centers;
  centers.reserve(spec.num_classes);
  while (centers.size() < spec.num_classes) {
    std::vector<double> center(spec.dim);
    double norm_sq = 0.0;
    for (double& v : center) {
      v = rng.normal();
      norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-9) continue;
    for (double& v : center) v *= spec.center_scale / norm;
    bool collides = false;
    for (const auto& other : centers) {
      double dist_sq = 0.0;
      for (std::size_t d = 0; d < spec.dim; ++d) {
        dist_sq += (center[d] - other[d]) * (center[d] - other[d]);
      }
      if (std::sqrt(dist_sq) < 1e-9) {
        collides = true;
        break;
      }
    }
    if (!collides) centers.push_back(std::move(center));
  }

  LabeledDataset data;
  data.dim = spec.dim;
  data.num_classes = spec.num_classes;
  data.features.reserve(spec.num_classes * spec.samples_per_class * spec.dim);
  data.labels.reserve(spec.num_classes * spec.samples_per_class);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t k = 0; k < spec.samples_per_class; ++k) {
      for (std::size_t d = 0; d < spec.dim; ++d) {
        data.features.push_back(centers[c][d] + spec.noise_sigma * rng.normal());
      }
      data.labels.push_back(static_cast<int>(c));
    }
  }
  data.validate();
  return data;
}

CsvLoadResult load_features_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open feature CSV '", path, "'");

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), path,
          ":1: missing header line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line, ',');
  require(header.size() >= 3 && header[0] == "id" && header[1] == "label",
          path, ":1: header must be id,label,f0,...,f{M-1}");
  const std::size_t dim = header.size() - 2;
  for (std::size_t d = 0; d < dim; ++d) {
    require(header[d + 2] == "f" + std::to_string(d), path,
            ":1: feature column ", d + 2, " must be named f", d);
  }

  LabeledDataset data;
  data.dim = dim;
  std::size_t line_no = 1;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    require(cells.size() == dim + 2, path, ":", line_no, ": expected ",
            dim + 2, " fields, got ", cells.size());
    const std::string& label_token = cells[1];
    char* end = nullptr;
    const long label = std::strtol(label_token.c_str(), &end, 10);
    require(end == label_token.c_str() + label_token.size() &&
                !label_token.empty() && label >= 0,
            path, ":", line_no, ": label '", label_token,
            "' is not a nonnegative integer");
    max_label = std::max(max_label, static_cast<int>(label));
    for (std::size_t d = 0; d < dim; ++d) {
      data.features.push_back(parse_double_strict(cells[d + 2], line_no, path));
    }
    data.labels.push_back(static_cast<int>(label));
  }
  require(!data.labels.empty(), path, ": no samples");
  data.num_classes = static_cast<std::size_t>(max_label) + 1;

  CsvLoadResult result;
  std::vector<std::size_t> counts(data.num_classes, 0);
  for (int label : data.labels) ++counts[static_cast<std::size_t>(label)];
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      result.warnings.push_back(
          str_cat("class ", c, " has no samples (label gap)"));
    }
  }
  data.validate();
  result.data = std::move(data);
  return result;
}

void save_features_csv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot write feature CSV '", path, "'");
  out << "id,label";
  for (std::size_t d = 0; d < data.dim; ++d) out << ",f" << d;
  out << "\n";
  for (std::size_t s = 0; s < data.size(); ++s) {
    out << s << ',' << data.labels[s];
    const auto row = data.feature(s);
    for (double v : row) out << ',' << format_double(v);
    out << "\n";
  }
  require(out.good(), "write failed for '", path, "'");
}

// ---------------------------------------------------------------------------
// Report trees: ordered `key = value` lines with fixed float formatting.

namespace {

class TreeWriter {
 public:
  void add(const std::string& key, const std::string& value) {
    lines_.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    add(key, format_double(value));
  }
  void add(const std::string& key, std::size_t value) {
    add(key, std::to_string(value));
  }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) {
    add(key, std::string(value ? "1" : "0"));
  }
  void add(const std::string& key, std::span<const double> values) {
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) joined += ' ';
      joined += format_double(values[i]);
    }
    add(key, joined);
  }
  void add(const std::string& key, std::span<const std::size_t> values) {
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) joined += ' ';
      joined += std::to_string(values[i]);
    }
    add(key, joined);
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    require(out.good(), "cannot write report '", path, "'");
    out << "uniclass-report 1\n";
    for (const auto& [key, value] : lines_) {
      out << key << " = " << value << "\n";
    }
    require(out.good(), "write failed for '", path, "'");
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

class TreeReader {
 public:
  explicit TreeReader(const std::string& path) : path_(path) {
    std::ifstream in(path);
    require(in.good(), "cannot open report '", path, "'");
    std::string line;
    require(static_cast<bool>(std::getline(in, line)) &&
                line == "uniclass-report 1",
            path, ": missing uniclass-report header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto sep = line.find(" = ");
      require(sep != std::string::npos, path, ": malformed line '", line, "'");
      entries_.emplace_back(line.substr(0, sep), line.substr(sep + 3));
    }
  }

  bool has(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
      if (k == key) return true;
    }
    return false;
  }

  const std::string& get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
      if (k == key) return v;
    }
    fail(path_, ": missing key '", key, "'");
  }

  double get_double(const std::string& key) const {
    return std::strtod(get(key).c_str(), nullptr);
  }
  std::size_t get_size(const std::string& key) const {
    return static_cast<std::size_t>(std::strtoull(get(key).c_str(), nullptr, 10));
  }
  int get_int(const std::string& key) const {
    return static_cast<int>(std::strtol(get(key).c_str(), nullptr, 10));
  }
  std::uint64_t get_u64(const std::string& key) const {
    return std::strtoull(get(key).c_str(), nullptr, 10);
  }
  bool get_bool(const std::string& key) const { return get(key) == "1"; }

  std::vector<double> get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(get(key));
    std::string token;
    while (in >> token) out.push_back(std::strtod(token.c_str(), nullptr));
    return out;
  }
  std::vector<std::size_t> get_sizes(const std::string& key) const {
    std::vector<std::size_t> out;
    std::istringstream in(get(key));
    std::string token;
    while (in >> token) {
      out.push_back(static_cast<std::size_t>(
          std::strtoull(token.c_str(), nullptr, 10)));
    }
    return out;
  }

 private:
  std::string path_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

void add_config_echo(TreeWriter& w, const ConfigEcho& config) {
  for (const auto& [key, value] : config) w.add(key, value);
}

void encode_accuracy(TreeWriter& w, const AccuracyReport& r,
                     const std::string& prefix) {
  w.add(prefix + "total", r.total);
  w.add(prefix + "a_sw", r.a_sw);
  w.add(prefix + "a_cw", r.a_cw);
  w.add(prefix + "a_uni", r.a_uni);
  w.add(prefix + "correct_sw", r.correct_sw);
  w.add(prefix + "correct_cw", r.correct_cw);
  w.add(prefix + "correct_uni", r.correct_uni);
  w.add(prefix + "t_star", r.t_star);
  w.add(prefix + "t_star_per_class",
        std::span<const double>(r.t_star_per_class));
}

AccuracyReport decode_accuracy(const TreeReader& r, const std::string& prefix) {
  AccuracyReport report;
  report.total = r.get_size(prefix + "total");
  report.a_sw = r.get_double(prefix + "a_sw");
  report.a_cw = r.get_double(prefix + "a_cw");
  report.a_uni = r.get_double(prefix + "a_uni");
  report.correct_sw = r.get_size(prefix + "correct_sw");
  report.correct_cw = r.get_size(prefix + "correct_cw");
  report.correct_uni = r.get_size(prefix + "correct_uni");
  report.t_star = r.get_double(prefix + "t_star");
  report.t_star_per_class = r.get_doubles(prefix + "t_star_per_class");
  return report;
}

}  // namespace

void save_report(const AccuracyReport& report, const std::string& path,
                 const ConfigEcho& config) {
  TreeWriter w;
  w.add("type", std::string("accuracy"));
  add_config_echo(w, config);
  encode_accuracy(w, report, "");
  w.write(path);
}

void save_report(const DistributionReport& report, const std::string& path,
                 const ConfigEcho& config) {
  TreeWriter w;
  w.add("type", std::string("distribution"));
  add_config_echo(w, config);
  w.add("num_correct", report.num_correct);
  w.add("min_pos", report.min_pos);
  w.add("max_neg", report.max_neg);
  w.add("has_overlap", report.has_overlap);
  w.add("overlap_lo", report.overlap_lo);
  w.add("overlap_hi", report.overlap_hi);
  w.add("overlap_width", report.overlap_width);
  w.add("per_class_min_pos",
        std::span<const double>(report.per_class_min_pos));
  w.add("per_class_max_neg",
        std::span<const double>(report.per_class_max_neg));
  w.add("std_min_pos", report.std_min_pos);
  w.add("std_max_neg", report.std_max_neg);
  w.add("num_bins", report.num_bins);
  w.add("bin_edges", std::span<const double>(report.bin_edges));
  w.add("histogram_pos", std::span<const std::size_t>(report.histogram_pos));
  w.add("histogram_neg", std::span<const std::size_t>(report.histogram_neg));
  w.write(path);
}

void save_report(const TrainRun& run, const std::string& path,
                 const ConfigEcho& config) {
  TreeWriter w;
  w.add("type", std::string("train_run"));
  add_config_echo(w, config);
  w.add("config.loss", loss_name(run.config.loss));
  w.add("config.gamma", run.config.loss.gamma);
  w.add("config.epochs", run.config.epochs);
  w.add("config.batch_size", run.config.batch_size);
  w.add("config.lr0", run.config.lr0);
  w.add("config.momentum", run.config.momentum);
  w.add("config.weight_decay", run.config.weight_decay);
  w.add("config.seed", run.config.seed);
  w.add("config.hidden_dims",
        std::span<const std::size_t>(run.config.hidden_dims));
  w.add("config.bias_init_mode", run.config.bias_init_mode);

  const ClassifierHead& head = run.final_head;
  w.add("head.dim", head.dim);
  w.add("head.num_classes", head.num_classes);
  w.add("head.family", std::string(family_name(head.family)));
  w.add("head.bias_mode", std::string(bias_mode_name(head.bias_mode)));
  w.add("head.gamma", head.gamma);
  w.add("head.weights", std::span<const double>(head.weights));
  w.add("head.bias", std::span<const double>(head.bias));

  w.add("extractor.layer_dims",
        std::span<const std::size_t>(run.extractor.layer_dims));
  for (std::size_t l = 0; l < run.extractor.num_layers(); ++l) {
    w.add(str_cat("extractor.weights.", l),
          std::span<const double>(run.extractor.weights[l]));
    w.add(str_cat("extractor.biases.", l),
          std::span<const double>(run.extractor.biases[l]));
  }

  w.add("loss_curve", std::span<const double>(run.loss_curve));
  w.add("num_epochs_logged", run.eval_history.size());
  for (std::size_t e = 0; e < run.eval_history.size(); ++e) {
    encode_accuracy(w, run.eval_history[e], str_cat("epoch.", e, "."));
    w.add(str_cat("bias_trace.", e),
          std::span<const double>(run.bias_trace[e]));
  }
  w.write(path);
}

AnyReport load_report(const std::string& path) {
  TreeReader r(path);
  const std::string& type = r.get("type");
  if (type == "accuracy") {
    return decode_accuracy(r, "");
  }
  if (type == "distribution") {
    DistributionReport report;
    report.num_correct = r.get_size("num_correct");
    report.min_pos = r.get_double("min_pos");
    report.max_neg = r.get_double("max_neg");
    report.has_overlap = r.get_bool("has_overlap");
    report.overlap_lo = r.get_double("overlap_lo");
    report.overlap_hi = r.get_double("overlap_hi");
    report.overlap_width = r.get_double("overlap_width");
    report.per_class_min_pos = r.get_doubles("per_class_min_pos");
    report.per_class_max_neg = r.get_doubles("per_class_max_neg");
    report.std_min_pos = r.get_double("std_min_pos");
    report.std_max_neg = r.get_double("std_max_neg");
    report.num_bins = r.get_size("num_bins");
    report.bin_edges = r.get_doubles("bin_edges");
    report.histogram_pos = r.get_sizes("histogram_pos");
    report.histogram_neg = r.get_sizes("histogram_neg");
    return report;
  }
  if (type == "train_run") {
    TrainRun run;
    run.config.loss = parse_loss_name(r.get("config.loss"),
                                      r.get_double("config.gamma"));
    run.config.epochs = r.get_int("config.epochs");
    run.config.batch_size = r.get_int("config.batch_size");
    run.config.lr0 = r.get_double("config.lr0");
    run.config.momentum = r.get_double("config.momentum");
    run.config.weight_decay = r.get_double("config.weight_decay");
    run.config.seed = r.get_u64("config.seed");
    run.config.hidden_dims = r.get_sizes("config.hidden_dims");
    run.config.bias_init_mode = r.get_int("config.bias_init_mode");

    ClassifierHead& head = run.final_head;
    head.dim = r.get_size("head.dim");
    head.num_classes = r.get_size("head.num_classes");
    head.family = parse_family(r.get("head.family"));
    head.bias_mode = parse_bias_mode(r.get("head.bias_mode"));
    head.gamma = r.get_double("head.gamma");
    head.weights = r.get_doubles("head.weights");
    head.bias = r.get_doubles("head.bias");

    run.extractor.layer_dims = r.get_sizes("extractor.layer_dims");
    for (std::size_t l = 0; l + 1 < run.extractor.layer_dims.size(); ++l) {
      run.extractor.weights.push_back(
          r.get_doubles(str_cat("extractor.weights.", l)));
      run.extractor.biases.push_back(
          r.get_doubles(str_cat("extractor.biases.", l)));
    }

    run.loss_curve = r.get_doubles("loss_curve");
    const std::size_t epochs = r.get_size("num_epochs_logged");
    for (std::size_t e = 0; e < epochs; ++e) {
      run.eval_history.push_back(decode_accuracy(r, str_cat("epoch.", e, ".")));
      run.bias_trace.push_back(r.get_doubles(str_cat("bias_trace.", e)));
    }
    return run;
  }
  fail(path, ": unknown report type '", type, "'");
}

void save_histogram_csv(const DistributionReport& report,
                        const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot write histogram CSV '", path, "'");
  out << "bin_lo,bin_hi,pos_count,neg_count\n";
  for (std::size_t b = 0; b < report.num_bins; ++b) {
    out << format_double(report.bin_edges[b]) << ','
        << format_double(report.bin_edges[b + 1]) << ','
        << report.histogram_pos[b] << ',' << report.histogram_neg[b] << "\n";
  }
  require(out.good(), "write failed for '", path, "'");
}

void save_head_json(const ClassifierHead& head, const std::string& path) {
  head.validate();
  json j;
  j["dim"] = head.dim;
  j["num_classes"] = head.num_classes;
  j["family"] = family_name(head.family);
  j["bias_mode"] = bias_mode_name(head.bias_mode);
  j["gamma"] = head.gamma;
  j["weights"] = head.weights;  // column-major, column i contiguous
  j["bias"] = head.bias;
  std::ofstream out(path);
  require(out.good(), "cannot write head JSON '", path, "'");
  out << j.dump(2) << "\n";
  require(out.good(), "write failed for '", path, "'");
}

ClassifierHead load_head_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open head JSON '", path, "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(path, ": invalid JSON: ", e.what());
  }
  ClassifierHead head;
  try {
    head.dim = j.at("dim").get<std::size_t>();
    head.num_classes = j.at("num_classes").get<std::size_t>();
    head.family = parse_family(j.at("family").get<std::string>());
    head.bias_mode = parse_bias_mode(j.at("bias_mode").get<std::string>());
    head.gamma = j.at("gamma").get<double>();
    head.weights = j.at("weights").get<std::vector<double>>();
    head.bias = j.at("bias").get<std::vector<double>>();
  } catch (const json::exception& e) {
    fail(path, ": malformed head JSON: ", e.what());
  }
  head.validate();
  return head;
}

}  // namespace uniclass
