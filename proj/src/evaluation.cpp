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

#include "uniclass/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uniclass/error.hpp"

namespace uniclass {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// One unit per sample: the unit counts at threshold t iff pos > t >= gate,
// i.e. t lies in [gate, pos).
struct Unit {
  double gate;
  double pos;
};

struct SweepOutcome {
  std::size_t best_count = 0;
  double threshold = 0.0;
};

// Exact maximization of the piecewise-constant objective.  The count only
// changes at observed gate/pos values, so sweeping the sorted events is
// exhaustive; ties resolve to the smallest attaining value.  When nothing is
// classifiable at any t the reported threshold is one below the smallest
// observed value (where the count, zero, is also attained).
SweepOutcome interval_sweep(const std::vector<Unit>& units) {
  double min_value = std::numeric_limits<double>::infinity();
  // Events: +1 when a unit's interval opens (its gate), -1 when it closes
  // (its pos).  Units with an empty interval (pos <= gate) never count and
  // contribute no events.
  std::vector<std::pair<double, int>> events;
  events.reserve(units.size() * 2);
  for (const Unit& u : units) {
    min_value = std::min(min_value, std::min(u.gate, u.pos));
    if (u.pos > u.gate) {
      events.emplace_back(u.gate, +1);
      events.emplace_back(u.pos, -1);
    }
  }
  SweepOutcome out;
  out.threshold = units.empty() ? 0.0 : min_value - 1.0;
  if (events.empty()) return out;

  std::sort(events.begin(), events.end());
  long running = 0;
  std::size_t i = 0;
  while (i < events.size()) {
    const double value = events[i].first;
    while (i < events.size() && events[i].first == value) {
      running += events[i].second;
      ++i;
    }
    if (running > static_cast<long>(out.best_count)) {
      out.best_count = static_cast<std::size_t>(running);
      out.threshold = value;
    }
  }
  return out;
}

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0
                    : 100.0 * static_cast<double>(part) /
                          static_cast<double>(whole);
}

double max_excluding(std::span<const double> row, std::size_t skip) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j != skip) best = std::max(best, row[j]);
  }
  return best;
}

}  // namespace

SampleWiseResult sample_wise_accuracy(const MetricBatch& batch) {
  require(batch.size() > 0, "accuracy of an empty batch");
  SampleWiseResult result;
  result.mask.resize(batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto row = batch.row(s);
    const std::size_t label = static_cast<std::size_t>(batch.labels[s]);
    const bool ok = row[label] > max_excluding(row, label);
    result.mask[s] = ok;
    if (ok) ++result.correct;
  }
  result.percent = percent(result.correct, batch.size());
  return result;
}

ThresholdResult uniform_accuracy(const MetricBatch& batch) {
  require(batch.size() > 0, "accuracy of an empty batch");
  std::vector<Unit> units;
  units.reserve(batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto row = batch.row(s);
    const std::size_t label = static_cast<std::size_t>(batch.labels[s]);
    units.push_back({max_excluding(row, label), row[label]});
  }
  const SweepOutcome sweep = interval_sweep(units);
  return {percent(sweep.best_count, batch.size()), sweep.best_count,
          sweep.threshold};
}

std::size_t uniform_count_at(const MetricBatch& batch, double threshold) {
  std::size_t count = 0;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto row = batch.row(s);
    const std::size_t label = static_cast<std::size_t>(batch.labels[s]);
    if (row[label] > threshold && threshold >= max_excluding(row, label)) {
      ++count;
    }
  }
  return count;
}

ClassWiseResult class_wise_uniform_accuracy(const MetricBatch& batch) {
  require(batch.size() > 0, "accuracy of an empty batch");
  ClassWiseResult result;
  result.thresholds.assign(batch.num_classes, kNan);
  result.per_class_correct.assign(batch.num_classes, 0);
  // The objective decomposes as a sum of per-class terms, so optimizing each
  // class independently is exact.
  for (std::size_t c = 0; c < batch.num_classes; ++c) {
    std::vector<Unit> units;
    for (std::size_t s = 0; s < batch.size(); ++s) {
      if (static_cast<std::size_t>(batch.labels[s]) != c) continue;
      const auto row = batch.row(s);
      units.push_back({max_excluding(row, c), row[c]});
    }
    if (units.empty()) continue;  // threshold stays NaN
    const SweepOutcome sweep = interval_sweep(units);
    result.thresholds[c] = sweep.threshold;
    result.per_class_correct[c] = sweep.best_count;
    result.correct += sweep.best_count;
  }
  result.percent = percent(result.correct, batch.size());
  return result;
}

ClassWiseResult class_wise_type2_accuracy(const MetricBatch& batch) {
  require(batch.size() > 0, "accuracy of an empty batch");
  ClassWiseResult result;
  result.thresholds.assign(batch.num_classes, kNan);
  result.per_class_correct.assign(batch.num_classes, 0);
  for (std::size_t c = 0; c < batch.num_classes; ++c) {
    // Type II negatives of class c: column c of every foreign sample.
    bool has_negative = false;
    double max_neg = -std::numeric_limits<double>::infinity();
    double min_pos = std::numeric_limits<double>::infinity();
    std::vector<double> positives;
    for (std::size_t s = 0; s < batch.size(); ++s) {
      const double value = batch.metric(s, c);
      if (static_cast<std::size_t>(batch.labels[s]) == c) {
        positives.push_back(value);
        min_pos = std::min(min_pos, value);
      } else {
        has_negative = true;
        max_neg = std::max(max_neg, value);
      }
    }
    if (positives.empty()) continue;
    // All positives of the class share one gate; without foreign samples the
    // gate falls back to one below the smallest positive.
    const double gate = has_negative ? max_neg : min_pos - 1.0;
    std::vector<Unit> units;
    units.reserve(positives.size());
    for (double pos : positives) units.push_back({gate, pos});
    const SweepOutcome sweep = interval_sweep(units);
    result.thresholds[c] = sweep.threshold;
    result.per_class_correct[c] = sweep.best_count;
    result.correct += sweep.best_count;
  }
  result.percent = percent(result.correct, batch.size());
  return result;
}

AccuracyReport evaluate(const MetricBatch& batch) {
  const SampleWiseResult sw = sample_wise_accuracy(batch);
  const ClassWiseResult cw = class_wise_uniform_accuracy(batch);
  const ThresholdResult uni = uniform_accuracy(batch);
  require(uni.correct <= cw.correct && cw.correct <= sw.correct,
          "accuracy hierarchy violated: ", uni.correct, " / ", cw.correct,
          " / ", sw.correct);
  AccuracyReport report;
  report.total = batch.size();
  report.a_sw = sw.percent;
  report.a_cw = cw.percent;
  report.a_uni = uni.percent;
  report.correct_sw = sw.correct;
  report.correct_cw = cw.correct;
  report.correct_uni = uni.correct;
  report.t_star = uni.threshold;
  report.t_star_per_class = cw.thresholds;
  return report;
}

MetricMatrix metric_matrix(const MetricBatch& batch,
                           std::span<const std::size_t> sample_ids) {
  const std::size_t n = batch.num_classes;
  require(sample_ids.size() == n, "need exactly one sample per class, got ",
          sample_ids.size(), " ids for ", n, " classes");
  std::vector<std::size_t> by_class(n, batch.size());
  for (std::size_t id : sample_ids) {
    require(id < batch.size(), "sample id ", id, " out of range");
    const std::size_t label = static_cast<std::size_t>(batch.labels[id]);
    require(by_class[label] == batch.size(), "duplicate sample for class ",
            label);
    by_class[label] = id;
  }
  for (std::size_t c = 0; c < n; ++c) {
    require(by_class[c] != batch.size(), "missing sample for class ", c);
  }

  MetricMatrix matrix;
  matrix.n = n;
  matrix.values.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = batch.row(by_class[j]);
    for (std::size_t i = 0; i < n; ++i) matrix.values[i * n + j] = row[i];
  }

  matrix.column_dominant = true;
  for (std::size_t j = 0; j < n && matrix.column_dominant; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j && matrix.entry(j, j) <= matrix.entry(i, j)) {
        matrix.column_dominant = false;
        break;
      }
    }
  }
  double min_diag = std::numeric_limits<double>::infinity();
  double max_off = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        min_diag = std::min(min_diag, matrix.entry(i, j));
      } else {
        max_off = std::max(max_off, matrix.entry(i, j));
      }
    }
  }
  matrix.global_dominant = min_diag > max_off;
  return matrix;
}

std::optional<DistributionReport> distribution_report(const MetricBatch& batch,
                                                      std::size_t num_bins) {
  require(num_bins >= 1, "need at least one histogram bin");
  const SampleWiseResult sw = sample_wise_accuracy(batch);
  if (sw.correct == 0) return std::nullopt;

  DistributionReport report;
  report.num_correct = sw.correct;
  report.num_bins = num_bins;
  report.per_class_min_pos.assign(batch.num_classes, kNan);
  report.per_class_max_neg.assign(batch.num_classes, kNan);

  std::vector<double> positives, negatives;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    if (!sw.mask[s]) continue;
    const auto row = batch.row(s);
    const std::size_t label = static_cast<std::size_t>(batch.labels[s]);
    positives.push_back(row[label]);
    double& class_min = report.per_class_min_pos[label];
    if (std::isnan(class_min) || row[label] < class_min) {
      class_min = row[label];
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j == label) continue;
      negatives.push_back(row[j]);
      double& class_max = report.per_class_max_neg[label];
      if (std::isnan(class_max) || row[j] > class_max) class_max = row[j];
    }
  }

  report.min_pos = *std::min_element(positives.begin(), positives.end());
  report.max_neg = *std::max_element(negatives.begin(), negatives.end());
  report.has_overlap = report.max_neg > report.min_pos;
  if (report.has_overlap) {
    report.overlap_lo = report.min_pos;
    report.overlap_hi = report.max_neg;
    report.overlap_width = report.overlap_hi - report.overlap_lo;
  }

  // Population standard deviation over the classes that have defined values.
  const auto population_std = [](const std::vector<double>& values) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : values) {
      if (!std::isnan(v)) {
        sum += v;
        ++count;
      }
    }
    if (count == 0) return 0.0;
    const double mean = sum / static_cast<double>(count);
    double var = 0.0;
    for (double v : values) {
      if (!std::isnan(v)) var += (v - mean) * (v - mean);
    }
    return std::sqrt(var / static_cast<double>(count));
  };
  report.std_min_pos = population_std(report.per_class_min_pos);
  report.std_max_neg = population_std(report.per_class_max_neg);

  double lo = std::min(report.min_pos,
                       *std::min_element(negatives.begin(), negatives.end()));
  lo = std::min(lo, *std::min_element(positives.begin(), positives.end()));
  double hi = std::max(report.max_neg,
                       *std::max_element(positives.begin(), positives.end()));
  if (hi <= lo) hi = lo + 1.0;  // degenerate all-equal batch
  report.bin_edges.resize(num_bins + 1);
  const double width = (hi - lo) / static_cast<double>(num_bins);
  for (std::size_t b = 0; b <= num_bins; ++b) {
    report.bin_edges[b] = lo + width * static_cast<double>(b);
  }
  report.bin_edges.back() = hi;

  report.histogram_pos.assign(num_bins, 0);
  report.histogram_neg.assign(num_bins, 0);
  const auto bin_of = [&](double value) {
    std::size_t b = static_cast<std::size_t>((value - lo) / width);
    return std::min(b, num_bins - 1);  // top edge joins the last bin
  };
  for (double v : positives) ++report.histogram_pos[bin_of(v)];
  for (double v : negatives) ++report.histogram_neg[bin_of(v)];
  return report;
}

}  // namespace uniclass
