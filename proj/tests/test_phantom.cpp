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

#include <set>

#include "oracles.hpp"
#include "voxseg/metrics.hpp"
#include "voxseg/morphology.hpp"
#include "voxseg/phantom.hpp"
#include "voxseg/segment.hpp"

using namespace voxseg;

TEST_CASE("noise-free phantom has exactly five intensities and splits clean") {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(40, 40, 40));
  spec.seed = 1;
  const Phantom ph = generate_phantom(spec);
  CHECK(distinct_value_count(ph.image) == 5);

  SegConfig cfg;
  const KmeansResult km = kmeans_segment(ph.image, ph.brain_mask, cfg);
  const OverlapReport rep =
      overlap_report(confusion(km.labels, ph.truth, ph.brain_mask));
  CHECK(rep.macro.dice == 1.0);
}

TEST_CASE("phantom generation is seed-deterministic") {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(24, 24, 24));
  spec.noise_sigma = 7.0;
  spec.bias_amplitude = 0.2;
  spec.seed = 42;
  const Phantom a = generate_phantom(spec);
  const Phantom b = generate_phantom(spec);
  CHECK((a.image.values() == b.image.values()).all());
  CHECK((a.truth.values() == b.truth.values()).all());
  spec.seed = 43;
  const Phantom c = generate_phantom(spec);
  CHECK_FALSE((a.image.values() == c.image.values()).all());
}

TEST_CASE("noisy phantom class means respect the law of large numbers") {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(64, 64, 64));
  spec.noise_sigma = 5.0;
  spec.seed = 7;
  const Phantom ph = generate_phantom(spec);
  const double expect[4] = {0, 60, 110, 160};
  for (int cls = 1; cls <= 3; ++cls) {
    double sum = 0;
    long n = 0;
    for (Eigen::Index i = 0; i < ph.image.size(); ++i)
      if (ph.truth.values()[i] == cls) {
        sum += ph.image.values()[i];
        ++n;
      }
    REQUIRE(n >= 10000);  // the bound below assumes a big class
    CHECK(std::abs(sum / n - expect[cls]) < 1.0);
  }
}

TEST_CASE("shells are nested: labels decrease radially from the center") {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(32, 32, 32));
  spec.seed = 3;
  const Phantom ph = generate_phantom(spec);
  const Vec3d c = ph.image.center();
  const Vec3i start(static_cast<int>(std::lround(c.x())),
                    static_cast<int>(std::lround(c.y())),
                    static_cast<int>(std::lround(c.z())));
  // Walk every integer lattice direction from the center voxel; along such
  // rays the ellipsoid quadratic is convex in the step count, so labels may
  // only step downward.
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        int prev = 4;
        for (int k = 1;; ++k) {
          const int x = start.x() + k * dx;
          const int y = start.y() + k * dy;
          const int z = start.z() + k * dz;
          if (!ph.truth.contains(x, y, z)) break;
          const int l = ph.truth(x, y, z);
          CHECK(l <= prev);
          prev = std::min(prev, l);
        }
      }
  // head mask contains the brain mask
  CHECK(oracles::mask_subset(ph.brain_mask, ph.head_mask));
}

TEST_CASE("closing the GM+WM mask recovers interior CSF") {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(48, 48, 48));
  spec.ventricle_axes = Vec3d(2.4, 2.0, 2.2);
  spec.ventricle_offset = Vec3d(3, -2, 1);
  spec.seed = 11;
  const Phantom ph = generate_phantom(spec);

  // GM+WM only, as the semi-automated masks exclude interior CSF.
  BinaryMask gmwm(ph.truth.dims());
  for (Eigen::Index i = 0; i < gmwm.size(); ++i)
    gmwm.values()[i] = ph.truth.values()[i] >= 2 ? 1 : 0;

  const BinaryMask closed = close_mask(gmwm, StructuringElement::ball(3));

  // Interior CSF = truth CSF voxels inside the GM shell (the ventricle).
  const Vec3d c = ph.image.center();
  long interior_csf = 0;
  for (int z = 0; z < 48; ++z)
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 48; ++x) {
        if (ph.truth(x, y, z) != 1) continue;
        const Vec3d q = (Vec3d(x, y, z) - c).array() / spec.gm_axes.array();
        if (q.squaredNorm() > 1.0) continue;  // exterior CSF shell
        ++interior_csf;
        CHECK(closed(x, y, z) == 1);
      }
  CHECK(interior_csf > 0);
}

TEST_CASE("bias field stays within its amplitude band") {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(24, 24, 24));
  spec.seed = 13;
  const Phantom clean = generate_phantom(spec);

  const Volume3 same = apply_bias_field(clean.image, 0.0, 99);
  CHECK((same.values() == clean.image.values()).all());

  const double a = 0.3;
  const Volume3 biased = apply_bias_field(clean.image, a, 99);
  for (Eigen::Index i = 0; i < clean.image.size(); ++i) {
    if (clean.image.values()[i] == 0.0) {
      CHECK(biased.values()[i] == 0.0);
      continue;
    }
    const double ratio = biased.values()[i] / clean.image.values()[i];
    CHECK(ratio >= 1.0 - a - 1e-12);
    CHECK(ratio <= 1.0 + a + 1e-12);
  }
}

TEST_CASE("bias field corners match the closed-form polynomial") {
  const Vec3i dims(24, 24, 24);
  const double a = 0.25;
  const BiasField f = make_bias_field(dims, a, 99);
  Volume3 ones(dims);
  ones.values().setConstant(1.0);
  const Volume3 field = apply_bias_field(ones, a, 99);
  for (int cz : {0, 23})
    for (int cy : {0, 23})
      for (int cx : {0, 23})
        CHECK(field(cx, cy, cz) ==
              doctest::Approx(f.value(Vec3d(cx, cy, cz))).epsilon(1e-12));
}

TEST_CASE("cohort generation hits the exact class quotas") {
  const auto cohort = generate_cohort(400, 0.5, 5);
  CHECK(cohort.size() == 400);
  int ad = 0;
  std::set<std::string> ids;
  std::array<int, 5> per_bin{};
  for (const auto& r : cohort) {
    if (r.diagnosis == Diagnosis::AD) ++ad;
    ids.insert(r.subject_id);
    CHECK(r.age >= 55.0);
    CHECK(r.age <= 95.0);
    ++per_bin[static_cast<std::size_t>(
        std::min(4, static_cast<int>((r.age - 55.0) / 8.0)))];
  }
  CHECK(ad == 200);
  CHECK(ids.size() == 400);
  for (int b = 0; b < 5; ++b) CHECK(per_bin[static_cast<std::size_t>(b)] > 0);

  const auto cn_only = generate_cohort(5, 0.0, 1);
  for (const auto& r : cn_only) CHECK(r.diagnosis == Diagnosis::CN);

  const auto again = generate_cohort(400, 0.5, 5);
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    CHECK(cohort[i].age == again[i].age);
    CHECK(cohort[i].diagnosis == again[i].diagnosis);
  }
}

TEST_CASE("cohort csv round trip") {
  const auto cohort = generate_cohort(12, 0.25, 3);
  const auto back = cohort_from_csv(cohort_to_csv(cohort));
  REQUIRE(back.size() == cohort.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].subject_id == cohort[i].subject_id);
    CHECK(back[i].diagnosis == cohort[i].diagnosis);
    CHECK(back[i].age == doctest::Approx(cohort[i].age).epsilon(1e-6));
  }
  CHECK_THROWS_AS(cohort_from_csv("nope\n"), DataError);
}

TEST_CASE("invalid phantom specs are rejected") {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(32, 32, 32));
  spec.csf_axes = spec.skull_axes;  // not strictly nested
  CHECK_THROWS_AS(generate_phantom(spec), SpecInvalid);

  PhantomSpec neg = PhantomSpec::for_dims(Vec3i(32, 32, 32));
  neg.noise_sigma = -1;
  CHECK_THROWS_AS(generate_phantom(neg), SpecInvalid);

  PhantomSpec bias = PhantomSpec::for_dims(Vec3i(32, 32, 32));
  bias.bias_amplitude = 0.5;
  CHECK_THROWS_AS(generate_phantom(bias), SpecInvalid);

  PhantomSpec vent = PhantomSpec::for_dims(Vec3i(32, 32, 32));
  vent.ventricle_axes = vent.wm_axes;  // does not fit inside WM
  CHECK_THROWS_AS(generate_phantom(vent), SpecInvalid);
}
