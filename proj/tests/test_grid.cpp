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

#include "voxseg/grid3.hpp"
#include "voxseg/rng.hpp"

using namespace voxseg;

TEST_CASE("voxel_count matches dim products") {
  CHECK(voxel_count(BinaryMask(Vec3i(160, 160, 192))) == 4915200);
  CHECK(voxel_count(BinaryMask(Vec3i(256, 160, 256))) == 10485760);
  CHECK(voxel_count(BinaryMask(Vec3i(1, 1, 1))) == 1);
}

TEST_CASE("grid rejects bad geometry") {
  CHECK_THROWS_AS(Volume3(Vec3i(0, 4, 4)), DimensionMismatch);
  CHECK_THROWS_AS(Volume3(Vec3i(4, 4, 4), Vec3d(1, 0, 1)), DimensionMismatch);
}

TEST_CASE("histogram of a constant volume lands in one bin") {
  Volume3 v(Vec3i(3, 3, 3));
  v.values().setConstant(42.0);
  for (int bins : {1, 2, 7, 64}) {
    const auto h = histogram(v, bins);
    std::int64_t total = 0;
    int nonzero = 0;
    for (auto c : h) {
      total += c;
      if (c) ++nonzero;
    }
    CHECK(total == 27);
    CHECK(nonzero == 1);
  }
}

TEST_CASE("histogram splits a two-value volume evenly") {
  Volume3 v(Vec3i(2, 2, 2));
  for (Eigen::Index i = 0; i < 8; ++i) v.values()[i] = i < 4 ? 0.0 : 255.0;
  const auto h = histogram(v, 2);
  CHECK(h[0] == 4);
  CHECK(h[1] == 4);
}

TEST_CASE("histogram counts sum to voxel_count for any bin count") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3i dims(2 + static_cast<int>(rng.below(5)),
                     2 + static_cast<int>(rng.below(5)),
                     2 + static_cast<int>(rng.below(5)));
    Volume3 v(dims);
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v.values()[i] = rng.uniform(-10, 10);
    const int bins = 1 + static_cast<int>(rng.below(40));
    const auto h = histogram(v, bins);
    std::int64_t total = 0;
    for (auto c : h) total += c;
    CHECK(total == voxel_count(v));
  }
}

TEST_CASE("tissue-labeled volume occupies at most class_count+1 bins") {
  LabelVolume lv(Vec3i(4, 4, 4), 3);
  Rng rng(3);
  for (Eigen::Index i = 0; i < lv.size(); ++i)
    lv.values()[i] = static_cast<std::uint8_t>(rng.below(4));
  CHECK(distinct_value_count(lv) <= 4);
  const auto h = histogram(lv, 16);
  int nonzero = 0;
  for (auto c : h)
    if (c) ++nonzero;
  CHECK(nonzero <= 4);
}
