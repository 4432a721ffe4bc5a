// Copyright 2026 The voxseg authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VOXSEG_METRICS_HPP
#define VOXSEG_METRICS_HPP

#include <string>
#include <vector>

#include "voxseg/grid3.hpp"
#include "voxseg/segment.hpp"

namespace voxseg {

/// K x K joint counts over masked voxels; rows are truth classes, columns
/// predicted classes (classes 1..K; background is excluded by the mask).
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

  int classes() const { return static_cast<int>(counts.rows()); }
  std::int64_t total() const { return counts.sum(); }
};

ConfusionMatrix confusion(const LabelVolume& pred, const LabelVolume& truth,
                          const BinaryMask& mask);

struct ClassMetrics {
  double accuracy = 0;
  double sensitivity = 0;
  double specificity = 0;
  double precision = 0;
  double dice = 0;
  double jaccard = 0;
};

/// One-vs-rest metrics per class plus macro averages. Zero-denominator
/// ratios score 1.0 when the class is absent from both prediction and truth
/// (perfect-empty agreement) and 0.0 otherwise.
struct OverlapReport {
  std::string method;
  std::vector<ClassMetrics> per_class;
  ClassMetrics macro;
  double wall_time_seconds = 0;
};

OverlapReport overlap_report(const ConfusionMatrix& cm,
                             double wall_time_seconds = 0);

/// Report serialization with fixed keys
/// {method, per_class:{csf,gm,wm}, macro, wall_time_seconds}; classes beyond
/// the standard three are keyed class4, class5, ...
std::string report_to_json(const OverlapReport& report);

/// One CSV row per report in Table-order columns:
/// method,accuracy,sensitivity,specificity,precision,dice,jaccard,wall_time_seconds
std::string reports_to_csv(const std::vector<OverlapReport>& reports);

struct BenchmarkEntry {
  std::string method;
  OverlapReport report;  // metrics from the first repetition
  bool failed = false;
  std::string error;
};

/// Runs each engine `repetitions` times on the same input; wall time is the
/// median over repetitions (monotonic clock), metrics come from the first
/// run (engines are deterministic). Engine errors are recorded per entry and
/// the run continues.
std::vector<BenchmarkEntry> benchmark_engines(
    const Volume3& volume, const BinaryMask& mask, const LabelVolume& truth,
    const std::vector<EngineSpec>& engines, const SegConfig& cfg,
    int repetitions = 1);

/// Entry indices ranked fastest-first / highest-macro-Dice-first
/// (failed entries excluded).
std::vector<int> rank_by_time(const std::vector<BenchmarkEntry>& entries);
std::vector<int> rank_by_dice(const std::vector<BenchmarkEntry>& entries);

}  // namespace voxseg

#endif  // VOXSEG_METRICS_HPP
