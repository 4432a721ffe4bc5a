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

#include "voxseg/phantom.hpp"
#include "voxseg/register.hpp"

using namespace voxseg;

namespace {

Volume3 test_phantom(double noise, std::uint64_t seed) {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(48, 48, 48));
  spec.noise_sigma = noise;
  spec.seed = seed;
  return generate_phantom(spec).image;
}

}  // namespace

TEST_CASE("downsample_mean pools blocks") {
  Volume3 v(Vec3i(4, 4, 4));
  v.values().setConstant(3.0);
  const Volume3 half = downsample_mean(v, 2);
  CHECK(half.dims() == Vec3i(2, 2, 2));
  CHECK((half.values() == 3.0).all());
  const Volume3 quarter = downsample_mean(v, 4);
  CHECK(quarter.dims() == Vec3i(1, 1, 1));
  CHECK(quarter.values()[0] == 3.0);
}

TEST_CASE("ncc is 1 for identical volumes and rejects constants") {
  const Volume3 v = test_phantom(0, 1);
  CHECK(ncc(v, v) == doctest::Approx(1.0).epsilon(1e-12));
  Volume3 flat(v.dims());
  flat.values().setConstant(5.0);
  CHECK_THROWS_AS(ncc(v, flat), DegenerateInput);
}

TEST_CASE("self-registration returns the identity") {
  const Volume3 v = test_phantom(0, 2);
  RegistrationConfig cfg;
  const RegistrationResult r = register_affine(v, v, cfg);
  CHECK(r.params.translation.norm() < 1e-9);
  CHECK(r.params.rotation_deg.norm() < 1e-9);
  CHECK(r.final_cost <= r.initial_cost);
  CHECK(r.final_cost < 1e-3);  // NCC >= 0.999
}

TEST_CASE("known translation is recovered") {
  const Volume3 fixed_img = test_phantom(0, 3);
  AffineParams truth;
  truth.translation = Vec3d(4, -3, 2);
  truth.center = fixed_img.center();
  const Volume3 moved = resample(fixed_img, AffineTransform::from_params(truth),
                                 Interp::trilinear, fixed_img.dims());
  // moved = T(fixed): registering fixed onto moved must recover T.
  RegistrationConfig cfg;
  const RegistrationResult r = register_affine(fixed_img, moved, cfg);
  CHECK((r.params.translation - truth.translation).norm() < 0.5);
  CHECK(r.final_cost < 0.01);  // NCC >= 0.99
}

TEST_CASE("known rotation is recovered") {
  const Volume3 fixed_img = test_phantom(0, 4);
  AffineParams truth;
  truth.rotation_deg = Vec3d(0, 0, 5);
  truth.center = fixed_img.center();
  const Volume3 moved = resample(fixed_img, AffineTransform::from_params(truth),
                                 Interp::trilinear, fixed_img.dims());
  RegistrationConfig cfg;
  const RegistrationResult r = register_affine(fixed_img, moved, cfg);
  CHECK(std::abs(r.params.rotation_deg.z() - 5.0) < 0.5);
  CHECK(std::abs(r.params.rotation_deg.x()) < 0.5);
  CHECK(std::abs(r.params.rotation_deg.y()) < 0.5);
  CHECK(r.final_cost < 0.01);
}

TEST_CASE("ssd cost also improves on a shifted phantom") {
  const Volume3 fixed_img = test_phantom(0, 5);
  AffineParams truth;
  truth.translation = Vec3d(2, 1, -1);
  truth.center = fixed_img.center();
  const Volume3 moved = resample(fixed_img, AffineTransform::from_params(truth),
                                 Interp::trilinear, fixed_img.dims());
  RegistrationConfig cfg;
  cfg.cost = RegistrationCost::ssd;
  const RegistrationResult r = register_affine(fixed_img, moved, cfg);
  CHECK(r.final_cost < r.initial_cost);
  CHECK((r.params.translation - truth.translation).norm() < 0.5);
}

TEST_CASE("constant volumes are degenerate input") {
  Volume3 flat(Vec3i(16, 16, 16));
  flat.values().setConstant(1.0);
  const Volume3 v = test_phantom(0, 6);
  RegistrationConfig cfg;
  CHECK_THROWS_AS(register_affine(flat, v, cfg), DegenerateInput);
  CHECK_THROWS_AS(register_affine(v, flat, cfg), DegenerateInput);
}
