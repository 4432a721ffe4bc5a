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

#include "voxseg/affine.hpp"
#include "voxseg/rng.hpp"

using namespace voxseg;

namespace {

AffineParams random_params(Rng& rng) {
  AffineParams p;
  for (int i = 0; i < 3; ++i) {
    p.translation[i] = rng.uniform(-5, 5);
    p.rotation_deg[i] = rng.uniform(-10, 10);
    p.scale[i] = rng.uniform(0.9, 1.1);
    p.shear[i] = rng.uniform(-0.1, 0.1);
  }
  p.center = Vec3d(8, 8, 8);
  return p;
}

}  // namespace

TEST_CASE("compose and inverse satisfy the group laws") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const AffineTransform t = AffineTransform::from_params(random_params(rng));
    const AffineTransform id;
    CHECK((compose(id, t).matrix() - t.matrix()).norm() == 0.0);
    CHECK((compose(t, id).matrix() - t.matrix()).norm() == 0.0);
    CHECK((compose(t, inverse(t)).matrix() - Mat4d::Identity()).norm() < 1e-10);
    CHECK((compose(inverse(t), t).matrix() - Mat4d::Identity()).norm() < 1e-10);

    const AffineTransform u = AffineTransform::from_params(random_params(rng));
    const AffineTransform v = AffineTransform::from_params(random_params(rng));
    // Associativity
    CHECK((compose(compose(t, u), v).matrix() -
           compose(t, compose(u, v)).matrix())
              .norm() < 1e-10);
  }
}

TEST_CASE("pure translations add under composition") {
  AffineParams a, b;
  a.translation = Vec3d(1, 2, 3);
  b.translation = Vec3d(4, 5, 6);
  const AffineTransform c = compose(AffineTransform::from_params(a),
                                    AffineTransform::from_params(b));
  CHECK((c.matrix().topRightCorner<3, 1>() - Vec3d(5, 7, 9)).norm() < 1e-14);
}

TEST_CASE("identity resample is bit exact") {
  Volume3 v(Vec3i(6, 5, 4));
  Rng rng(43);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.values()[i] = rng.normal();
  const Volume3 out = resample(v, AffineTransform(), Interp::trilinear,
                               v.dims());
  CHECK((out.values() == v.values()).all());
}

TEST_CASE("integer translation with nearest is a shifted copy") {
  Volume3 v(Vec3i(6, 4, 4));
  for (Eigen::Index i = 0; i < v.size(); ++i) v.values()[i] = double(i) + 1;
  AffineParams p;
  p.translation = Vec3d(2, 0, 0);
  const Volume3 out =
      resample(v, AffineTransform::from_params(p), Interp::nearest, v.dims());
  for (int z = 0; z < 4; ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 6; ++x) {
        if (x >= 2)
          CHECK(out(x, y, z) == v(x - 2, y, z));
        else
          CHECK(out(x, y, z) == 0.0);  // zero fill
      }
}

TEST_CASE("trilinear is exact on a linear ramp under half-voxel shift") {
  Volume3 v(Vec3i(8, 3, 3));
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 8; ++x) v(x, y, z) = double(x);
  AffineParams p;
  p.translation = Vec3d(0.5, 0, 0);
  const Volume3 out =
      resample(v, AffineTransform::from_params(p), Interp::trilinear, v.dims());
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 1; x < 8; ++x)
        CHECK(out(x, y, z) == doctest::Approx(x - 0.5).epsilon(1e-13));
}

TEST_CASE("trilinear output stays inside the input value range") {
  Rng rng(47);
  Volume3 v(Vec3i(9, 9, 9));
  for (Eigen::Index i = 0; i < v.size(); ++i) v.values()[i] = rng.uniform(1, 9);
  const double lo = v.values().minCoeff();
  const double hi = v.values().maxCoeff();
  for (int trial = 0; trial < 10; ++trial) {
    AffineParams p = random_params(rng);
    p.center = v.center();
    const Volume3 out = resample(v, AffineTransform::from_params(p),
                                 Interp::trilinear, v.dims());
    // Outside samples read 0, which is below lo here; values must never
    // exceed the convex-combination bounds.
    CHECK(out.values().maxCoeff() <= hi + 1e-12);
    CHECK(out.values().minCoeff() >= std::min(0.0, lo) - 1e-12);
  }
}

TEST_CASE("crop extracts the template box") {
  BinaryMask big(Vec3i(256, 160, 256));
  big.values().setConstant(1);
  const BinaryMask cropped =
      crop(big, Vec3i(160, 160, 192),
           centered_crop_offset(big.dims(), Vec3i(160, 160, 192)));
  CHECK(voxel_count(cropped) == 4915200);

  Volume3 v(Vec3i(5, 4, 3));
  for (Eigen::Index i = 0; i < v.size(); ++i) v.values()[i] = double(i);
  const Volume3 same = crop(v, v.dims(), Vec3i(0, 0, 0));
  CHECK((same.values() == v.values()).all());

  CHECK_THROWS_AS(crop(v, Vec3i(4, 4, 3), Vec3i(2, 0, 0)), OutOfBounds);
  CHECK_THROWS_AS(crop(v, Vec3i(2, 2, 2), Vec3i(-1, 0, 0)), OutOfBounds);
}

TEST_CASE("crop preserves values and shifts the world origin") {
  Volume3 v(Vec3i(6, 6, 6), Vec3d(2, 2, 2));
  for (Eigen::Index i = 0; i < v.size(); ++i) v.values()[i] = double(i);
  const Vec3i off(1, 2, 3);
  const Volume3 c = crop(v, Vec3i(3, 3, 3), off);
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x)
        CHECK(c(x, y, z) == v(x + 1, y + 2, z + 3));
  // Voxel (0,0,0) of the crop maps to the same world point as (1,2,3).
  const Vec4d w = c.voxel_to_world() * Vec4d(0, 0, 0, 1);
  const Vec4d w0 = v.voxel_to_world() * Vec4d(1, 2, 3, 1);
  CHECK((w - w0).norm() < 1e-12);
}

TEST_CASE("affine JSON record round-trips the 12 parameters") {
  Rng rng(53);
  const AffineParams p = random_params(rng);
  const AffineParams q = affine_from_json(affine_to_json(p));
  CHECK((p.translation - q.translation).norm() < 1e-12);
  CHECK((p.rotation_deg - q.rotation_deg).norm() < 1e-12);
  CHECK((p.scale - q.scale).norm() < 1e-12);
  CHECK((p.shear - q.shear).norm() < 1e-12);
  CHECK((p.center - q.center).norm() < 1e-12);
  CHECK(p.flip_axial == q.flip_axial);
}

TEST_CASE("singular transforms are rejected") {
  Mat4d m = Mat4d::Identity();
  m(0, 0) = 0;
  CHECK_THROWS_AS(AffineTransform{m}, SingularTransform);
}
