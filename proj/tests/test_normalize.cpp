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

#include "voxseg/normalize.hpp"
#include "voxseg/phantom.hpp"

using namespace voxseg;

TEST_CASE("centroids of three-valued data are the values themselves") {
  Volume3 v(Vec3i(6, 2, 1));
  const double vals[12] = {10, 10, 10, 10, 50, 50, 50, 50, 90, 90, 90, 90};
  for (Eigen::Index i = 0; i < 12; ++i) v.values()[i] = vals[i];
  const IntensityCentroids c = compute_centroids(v, full_mask(v.dims()));
  CHECK(c.csf == doctest::Approx(10).epsilon(1e-12));
  CHECK(c.gm == doctest::Approx(50).epsilon(1e-12));
  CHECK(c.wm == doctest::Approx(90).epsilon(1e-12));
  CHECK(c.valid());
}

TEST_CASE("two-valued data is degenerate") {
  Volume3 v(Vec3i(4, 1, 1));
  v.values() << 1, 1, 2, 2;
  CHECK_THROWS_AS(compute_centroids(v, full_mask(v.dims())), DegenerateInput);
}

TEST_CASE("phantom centroids land within 2 of the class means") {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(48, 48, 48));
  spec.noise_sigma = 5.0;
  spec.seed = 9;
  const Phantom ph = generate_phantom(spec);
  const IntensityCentroids c = compute_centroids(ph.image, ph.brain_mask);
  CHECK(std::abs(c.csf - 60.0) < 2.0);
  CHECK(std::abs(c.gm - 110.0) < 2.0);
  CHECK(std::abs(c.wm - 160.0) < 2.0);
}

TEST_CASE("fit_gain closed forms") {
  const IntensityCentroids a{10, 50, 90};
  const IntensityCentroids b{20, 100, 180};
  CHECK(fit_gain(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fit_gain(a, b) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(fit_gain(b, a) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("fit_gain is exact for proportional triples") {
  const IntensityCentroids img{13.5, 77.25, 141.0};
  for (double g : {0.25, 0.5, 1.75, 3.0}) {
    const IntensityCentroids target{img.csf * g, img.gm * g, img.wm * g};
    CHECK(fit_gain(img, target) == doctest::Approx(g).epsilon(1e-14));
  }
}

TEST_CASE("apply_gain scales voxelwise") {
  Volume3 ramp(Vec3i(11, 1, 1));
  for (int i = 0; i <= 10; ++i) ramp.values()[i] = i;
  CHECK((apply_gain(ramp, 1.0).values() == ramp.values()).all());
  const Volume3 twice = apply_gain(ramp, 2.0);
  for (int i = 0; i <= 10; ++i) CHECK(twice.values()[i] == 2.0 * i);
  CHECK_THROWS_AS(apply_gain(ramp, 0.0), ConfigError);
}

TEST_CASE("centroids are scale-equivariant and the gain round-trips") {
  PhantomSpec spec = PhantomSpec::for_dims(Vec3i(40, 40, 40));
  spec.noise_sigma = 4.0;
  spec.seed = 21;
  const Phantom ph = generate_phantom(spec);
  const IntensityCentroids base = compute_centroids(ph.image, ph.brain_mask);

  const double g = 1.8;
  const IntensityCentroids scaled =
      compute_centroids(apply_gain(ph.image, g), ph.brain_mask);
  CHECK(scaled.csf == doctest::Approx(g * base.csf).epsilon(1e-3));
  CHECK(scaled.gm == doctest::Approx(g * base.gm).epsilon(1e-3));
  CHECK(scaled.wm == doctest::Approx(g * base.wm).epsilon(1e-3));

  // fit_gain(centroids(g*v), centroids(v)) should invert the gain within 1%.
  CHECK(fit_gain(scaled, base) == doctest::Approx(1.0 / g).epsilon(0.01));
}
