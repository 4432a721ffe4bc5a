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

#include <doctest.h>

#include "oracles.hpp"
#include "voxseg/metrics.hpp"
#include "voxseg/phantom.hpp"
#include "voxseg/rng.hpp"

using namespace voxseg;

namespace {

LabelVolume random_labels(const Vec3i& dims, int k, Rng& rng) {
  LabelVolume lv(dims, k);
  for (Eigen::Index i = 0; i < lv.size(); ++i)
    lv.values()[i] = static_cast<std::uint8_t>(1 + rng.below(
                         static_cast<std::uint64_t>(k)));
  return lv;
}

}  // namespace

TEST_CASE("perfect prediction scores 1 everywhere") {
  Rng rng(3);
  const LabelVolume truth = random_labels(Vec3i(5, 5, 5), 3, rng);
  const BinaryMask mask = full_mask(truth.dims());
  const ConfusionMatrix cm = confusion(truth, truth, mask);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (r != c) CHECK(cm.counts(r, c) == 0);
  const OverlapReport rep = overlap_report(cm);
  for (const auto& m : rep.per_class) {
    CHECK(m.accuracy == 1.0);
    CHECK(m.sensitivity == 1.0);
    CHECK(m.specificity == 1.0);
    CHECK(m.precision == 1.0);
    CHECK(m.dice == 1.0);
    CHECK(m.jaccard == 1.0);
  }
  CHECK(rep.macro.dice == 1.0);
}

TEST_CASE("constant prediction fills one confusion column") {
  Rng rng(5);
  const LabelVolume truth = random_labels(Vec3i(3, 3, 3), 3, rng);
  LabelVolume pred(truth.dims(), 3);
  pred.values().setConstant(1);
  const ConfusionMatrix cm = confusion(pred, truth, full_mask(truth.dims()));
  for (int r = 0; r < 3; ++r) {
    CHECK(cm.counts(r, 1) == 0);
    CHECK(cm.counts(r, 2) == 0);
  }
  CHECK(cm.total() == 27);
}

TEST_CASE("hand-built binary case: dice 2/3") {
  LabelVolume truth(Vec3i(3, 1, 1), 2);
  LabelVolume pred(Vec3i(3, 1, 1), 2);
  truth.values() << 1, 1, 2;
  pred.values() << 1, 2, 2;
  const OverlapReport rep =
      overlap_report(confusion(pred, truth, full_mask(truth.dims())));
  const ClassMetrics& c1 = rep.per_class[0];
  CHECK(c1.dice == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(c1.jaccard == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c1.precision == 1.0);
  CHECK(c1.sensitivity == 0.5);
}

TEST_CASE("disjoint labelings score zero overlap") {
  LabelVolume truth(Vec3i(4, 1, 1), 2);
  LabelVolume pred(Vec3i(4, 1, 1), 2);
  truth.values() << 1, 1, 1, 1;
  pred.values() << 2, 2, 2, 2;
  const OverlapReport rep =
      overlap_report(confusion(pred, truth, full_mask(truth.dims())));
  CHECK(rep.per_class[0].dice == 0.0);
  CHECK(rep.per_class[0].jaccard == 0.0);
  CHECK(rep.per_class[1].dice == 0.0);
}

TEST_CASE("class absent everywhere scores 1 by convention") {
  LabelVolume truth(Vec3i(4, 1, 1), 3);
  LabelVolume pred(Vec3i(4, 1, 1), 3);
  truth.values() << 1, 1, 2, 2;
  pred.values() << 1, 1, 2, 2;
  const OverlapReport rep =
      overlap_report(confusion(pred, truth, full_mask(truth.dims())));
  CHECK(rep.per_class[2].dice == 1.0);
  CHECK(rep.per_class[2].sensitivity == 1.0);
  CHECK(rep.per_class[2].precision == 1.0);

  // Predicted-but-absent-in-truth is a miss, not a free pass.
  pred.values() << 1, 1, 2, 3;
  const OverlapReport rep2 =
      overlap_report(confusion(pred, truth, full_mask(truth.dims())));
  CHECK(rep2.per_class[2].sensitivity == 0.0);
  CHECK(rep2.per_class[2].dice == 0.0);
}

TEST_CASE("metrics match the brute-force oracle on random volumes") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3i dims(1 + static_cast<int>(rng.below(5)),
                     1 + static_cast<int>(rng.below(5)),
                     1 + static_cast<int>(rng.below(5)));
    const int k = 2 + static_cast<int>(rng.below(2));
    const LabelVolume truth = random_labels(dims, k, rng);
    const LabelVolume pred = random_labels(dims, k, rng);
    const BinaryMask mask = full_mask(dims);

    const OverlapReport rep = overlap_report(confusion(pred, truth, mask));
    const auto bf = oracles::metrics_bf(pred, truth, mask);
    REQUIRE(rep.per_class.size() == bf.size());
    for (std::size_t c = 0; c < bf.size(); ++c) {
      CHECK(rep.per_class[c].accuracy == bf[c].accuracy);
      CHECK(rep.per_class[c].sensitivity == bf[c].sensitivity);
      CHECK(rep.per_class[c].specificity == bf[c].specificity);
      CHECK(rep.per_class[c].precision == bf[c].precision);
      CHECK(rep.per_class[c].dice == bf[c].dice);
      CHECK(rep.per_class[c].jaccard == bf[c].jaccard);
      // Dice-Jaccard identity
      CHECK(std::abs(rep.per_class[c].jaccard -
                     rep.per_class[c].dice / (2.0 - rep.per_class[c].dice)) <
            1e-12);
    }

    // Symmetry of dice under swapping prediction and truth.
    const OverlapReport sw = overlap_report(confusion(truth, pred, mask));
    for (std::size_t c = 0; c < bf.size(); ++c)
      CHECK(rep.per_class[c].dice == sw.per_class[c].dice);

    // Confusion totals equal the masked voxel count.
    CHECK(confusion(pred, truth, mask).total() == voxel_count(mask));
  }
}

TEST_CASE("confusion validates geometry and class counts") {
  LabelVolume a(Vec3i(2, 2, 2), 3);
  a.values().setConstant(1);
  LabelVolume b(Vec3i(2, 2, 3), 3);
  CHECK_THROWS_AS(confusion(a, b, full_mask(a.dims())), GeometryMismatch);
  LabelVolume c(Vec3i(2, 2, 2), 2);
  c.values().setConstant(1);
  CHECK_THROWS_AS(confusion(a, c, full_mask(a.dims())), ClassCountMismatch);
  LabelVolume zero(Vec3i(2, 2, 2), 3);  // label 0 inside the mask
  CHECK_THROWS_AS(confusion(a, zero, full_mask(a.dims())), DataError);
}

TEST_CASE("benchmark_engines reports metrics, median times, and failures") {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(24, 24, 24));
  spec.seed = 9;
  const Phantom ph = generate_phantom(spec);
  SegConfig cfg;

  const auto entries = benchmark_engines(
      ph.image, ph.brain_mask, ph.truth,
      {parse_engine("kmeans"), parse_engine("otsu")}, cfg, 1);
  REQUIRE(entries.size() == 2);
  for (const auto& e : entries) {
    CHECK_FALSE(e.failed);
    CHECK(e.report.macro.dice == 1.0);  // noise-free separability
    CHECK(e.report.wall_time_seconds > 0.0);
  }

  // Repetitions change timing only, never the metrics.
  const auto thrice = benchmark_engines(
      ph.image, ph.brain_mask, ph.truth, {parse_engine("kmeans")}, cfg, 3);
  CHECK(thrice[0].report.macro.dice == entries[0].report.macro.dice);
  CHECK(thrice[0].report.macro.jaccard == entries[0].report.macro.jaccard);

  // A degenerate input marks the entry failed and the run continues.
  Volume3 twovals(ph.image.dims());
  for (Eigen::Index i = 0; i < twovals.size(); ++i)
    twovals.values()[i] = (i % 2) ? 1.0 : 0.0;
  const auto mixed = benchmark_engines(
      twovals, ph.brain_mask, ph.truth,
      {parse_engine("kmeans"), parse_engine("otsu")}, cfg, 1);
  CHECK(mixed[0].failed);
  CHECK_FALSE(mixed[0].error.empty());
  CHECK(mixed[1].failed);

  // Ranking helpers skip failures.
  CHECK(rank_by_time(mixed).empty());
  const auto by_time = rank_by_time(entries);
  REQUIRE(by_time.size() == 2);
  CHECK(entries[static_cast<std::size_t>(by_time[0])].report.wall_time_seconds <=
        entries[static_cast<std::size_t>(by_time[1])].report.wall_time_seconds);
}

TEST_CASE("reports serialize with fixed keys and csv columns") {
  LabelVolume truth(Vec3i(2, 2, 2), 3);
  truth.values() << 1, 1, 2, 2, 3, 3, 1, 2;
  OverlapReport rep =
      overlap_report(confusion(truth, truth, full_mask(truth.dims())), 1.25);
  rep.method = "kmeans";
  const std::string j = report_to_json(rep);
  CHECK(j.find("\"method\"") != std::string::npos);
  CHECK(j.find("\"csf\"") != std::string::npos);
  CHECK(j.find("\"gm\"") != std::string::npos);
  CHECK(j.find("\"wm\"") != std::string::npos);
  CHECK(j.find("\"macro\"") != std::string::npos);
  CHECK(j.find("\"wall_time_seconds\"") != std::string::npos);

  const std::string csv = reports_to_csv({rep});
  CHECK(csv.rfind("method,accuracy,sensitivity,specificity,precision,dice,"
                  "jaccard,wall_time_seconds\n", 0) == 0);
  CHECK(csv.find("kmeans,1,1,1,1,1,1,1.25") != std::string::npos);
}
