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

#include "voxseg/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace voxseg {

ConfusionMatrix confusion(const LabelVolume& pred, const LabelVolume& truth,
                          const BinaryMask& mask) {
  if (!pred.same_geometry(truth) || !pred.same_geometry(mask))
    throw GeometryMismatch("confusion: geometry mismatch");
  if (pred.class_count != truth.class_count)
    throw ClassCountMismatch("confusion: class counts differ");
  const int k = pred.class_count;
  ConfusionMatrix cm;
  cm.counts.setZero(k, k);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (!mask.values()[i]) continue;
    const int t = truth.values()[i];
    const int p = pred.values()[i];
    if (t < 1 || t > k || p < 1 || p > k)
      throw DataError("confusion: label outside 1..K on a masked voxel");
    ++cm.counts(t - 1, p - 1);
  }
  return cm;
}

namespace {

double ratio(std::int64_t num, std::int64_t den, bool absent_everywhere) {
  if (den == 0) return absent_everywhere ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics one_vs_rest(const ConfusionMatrix& cm, int c) {
  const std::int64_t total = cm.total();
  const std::int64_t tp = cm.counts(c, c);
  const std::int64_t fn = cm.counts.row(c).sum() - tp;
  const std::int64_t fp = cm.counts.col(c).sum() - tp;
  const std::int64_t tn = total - tp - fn - fp;
  const bool absent = (tp + fn + fp) == 0;  // in neither truth nor prediction

  ClassMetrics m;
  m.accuracy = ratio(tp + tn, total, absent);
  m.sensitivity = ratio(tp, tp + fn, absent);
  m.specificity = ratio(tn, tn + fp, absent);
  m.precision = ratio(tp, tp + fp, absent);
  m.dice = ratio(2 * tp, 2 * tp + fp + fn, absent);
  m.jaccard = ratio(tp, tp + fp + fn, absent);
  return m;
}

}  // namespace

OverlapReport overlap_report(const ConfusionMatrix& cm,
                             double wall_time_seconds) {
  OverlapReport rep;
  rep.wall_time_seconds = wall_time_seconds;
  const int k = cm.classes();
  for (int c = 0; c < k; ++c) rep.per_class.push_back(one_vs_rest(cm, c));
  auto avg = [&](double ClassMetrics::*field) {
    double s = 0;
    for (const auto& m : rep.per_class) s += m.*field;
    return s / k;
  };
  rep.macro.accuracy = avg(&ClassMetrics::accuracy);
  rep.macro.sensitivity = avg(&ClassMetrics::sensitivity);
  rep.macro.specificity = avg(&ClassMetrics::specificity);
  rep.macro.precision = avg(&ClassMetrics::precision);
  rep.macro.dice = avg(&ClassMetrics::dice);
  rep.macro.jaccard = avg(&ClassMetrics::jaccard);
  return rep;
}

namespace {

nlohmann::json metrics_json(const ClassMetrics& m) {
  return {{"accuracy", m.accuracy},       {"sensitivity", m.sensitivity},
          {"specificity", m.specificity}, {"precision", m.precision},
          {"dice", m.dice},               {"jaccard", m.jaccard}};
}

}  // namespace

std::string report_to_json(const OverlapReport& report) {
  nlohmann::json j;
  j["method"] = report.method;
  nlohmann::json pc;
  static const char* kNames[3] = {"csf", "gm", "wm"};
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const std::string key = (c < 3 && report.per_class.size() == 3)
                                ? kNames[c]
                                : "class" + std::to_string(c + 1);
    pc[key] = metrics_json(report.per_class[c]);
  }
  j["per_class"] = pc;
  j["macro"] = metrics_json(report.macro);
  j["wall_time_seconds"] = report.wall_time_seconds;
  return j.dump(2);
}

std::string reports_to_csv(const std::vector<OverlapReport>& reports) {
  std::ostringstream os;
  os << "method,accuracy,sensitivity,specificity,precision,dice,jaccard,"
        "wall_time_seconds\n";
  os.precision(9);
  for (const auto& r : reports) {
    os << r.method << ',' << r.macro.accuracy << ',' << r.macro.sensitivity
       << ',' << r.macro.specificity << ',' << r.macro.precision << ','
       << r.macro.dice << ',' << r.macro.jaccard << ','
       << r.wall_time_seconds << '\n';
  }
  return os.str();
}

std::vector<BenchmarkEntry> benchmark_engines(
    const Volume3& volume, const BinaryMask& mask, const LabelVolume& truth,
    const std::vector<EngineSpec>& engines, const SegConfig& cfg,
    int repetitions) {
  if (engines.empty()) throw ConfigError("benchmark: no engines given");
  if (repetitions < 1) throw ConfigError("benchmark: repetitions must be >= 1");

  std::vector<BenchmarkEntry> entries;
  for (const EngineSpec& spec : engines) {
    BenchmarkEntry entry;
    entry.method = engine_name(spec);
    try {
      std::vector<double> times;
      LabelVolume labels;
      for (int r = 0; r < repetitions; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        LabelVolume out = run_engine(spec, volume, mask, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
        if (r == 0) labels = std::move(out);
      }
      std::sort(times.begin(), times.end());
      const double median =
          times.size() % 2 == 1
              ? times[times.size() / 2]
              : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
      entry.report = overlap_report(confusion(labels, truth, mask), median);
      entry.report.method = entry.method;
    } catch (const Error& e) {
      entry.failed = true;
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

namespace {

std::vector<int> ranked(const std::vector<BenchmarkEntry>& entries,
                        bool by_time) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(entries.size()); ++i)
    if (!entries[static_cast<std::size_t>(i)].failed) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const auto& ra = entries[static_cast<std::size_t>(a)].report;
    const auto& rb = entries[static_cast<std::size_t>(b)].report;
    return by_time ? ra.wall_time_seconds < rb.wall_time_seconds
                   : ra.macro.dice > rb.macro.dice;
  });
  return idx;
}

}  // namespace

std::vector<int> rank_by_time(const std::vector<BenchmarkEntry>& entries) {
  return ranked(entries, true);
}

std::vector<int> rank_by_dice(const std::vector<BenchmarkEntry>& entries) {
  return ranked(entries, false);
}

}  // namespace voxseg
