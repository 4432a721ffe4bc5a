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

#ifndef VOXSEG_PHANTOM_HPP
#define VOXSEG_PHANTOM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "voxseg/grid3.hpp"

namespace voxseg {

/// Synthetic head: four nested ellipsoid shells (skull > CSF > GM > WM)
/// centered in the volume, with exact ground-truth labels. Semi-axes are
/// deliberately anisotropic so small rotations are identifiable.
struct PhantomSpec {
  Vec3i dims{64, 64, 64};
  Vec3d skull_axes;
  Vec3d csf_axes;
  Vec3d gm_axes;
  Vec3d wm_axes;
  /// Optional CSF cavity inside the WM core (a crude ventricle); zero axes
  /// disable it. Used to exercise cavity-filling with known geometry.
  Vec3d ventricle_axes = Vec3d::Zero();
  Vec3d ventricle_offset = Vec3d::Zero();  // from the volume center, voxels
  double background_mean = 0;
  double csf_mean = 60;
  double gm_mean = 110;
  double wm_mean = 160;
  double skull_mean = 220;
  double noise_sigma = 0;
  double bias_amplitude = 0;
  std::uint64_t seed = 0;

  /// Spec with shell semi-axes scaled to the given dims.
  static PhantomSpec for_dims(const Vec3i& dims);
  /// The 160x160x192 benchmark profile.
  static PhantomSpec paper_scale();

  void validate() const;  // throws SpecInvalid
};

struct Phantom {
  Volume3 image;
  LabelVolume truth;      // 0 background/skull, 1 CSF, 2 GM, 3 WM
  BinaryMask brain_mask;  // CSF + GM + WM
  BinaryMask head_mask;   // brain + skull shell
};

/// Label = innermost shell containing the voxel; intensity = tissue mean
/// * bias field(x) + Gaussian noise. Deterministic given spec.seed.
Phantom generate_phantom(const PhantomSpec& spec);

/// Smooth trivariate quadratic, affinely normalized so its values over the
/// grid span exactly [1 - amplitude, 1 + amplitude].
struct BiasField {
  Eigen::Matrix<double, 10, 1> coeffs;  // 1, x, y, z, x^2, y^2, z^2, xy, xz, yz
  double raw_min = 0;
  double raw_max = 1;
  double amplitude = 0;

  double raw(const Vec3d& p) const;
  double value(const Vec3d& p) const;  // normalized to [1-a, 1+a]
};

BiasField make_bias_field(const Vec3i& dims, double amplitude,
                          std::uint64_t seed);

/// Multiplies by the normalized field; amplitude 0 is the identity.
Volume3 apply_bias_field(const Volume3& volume, double amplitude,
                         std::uint64_t seed);

enum class Diagnosis { AD, CN };

struct SubjectRecord {
  std::string subject_id;
  double age = 0;       // years, in [55, 95]
  Diagnosis diagnosis = Diagnosis::CN;
};

/// n synthetic subjects with round(n * ad_fraction) AD cases spread evenly,
/// ages drawn uniformly within 5 equal-width bins over [55, 95] assigned
/// round-robin so every bin is populated.
std::vector<SubjectRecord> generate_cohort(int n, double ad_fraction,
                                           std::uint64_t seed);

std::string cohort_to_csv(const std::vector<SubjectRecord>& records);
std::vector<SubjectRecord> cohort_from_csv(const std::string& text);

}  // namespace voxseg

#endif  // VOXSEG_PHANTOM_HPP
