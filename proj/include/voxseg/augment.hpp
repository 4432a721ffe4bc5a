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

#ifndef VOXSEG_AUGMENT_HPP
#define VOXSEG_AUGMENT_HPP

#include <string>

#include "voxseg/affine.hpp"
#include "voxseg/grid3.hpp"
#include "voxseg/rng.hpp"

namespace voxseg {

/// Random training-time perturbation ranges: translation in [-3, 3] voxels
/// per axis, rotation and shear in [-5, 5] degrees per axis, one global
/// scale in [0.95, 1.05], and an axial flip with probability 1/2.
struct AugmentationParams {
  Vec3d translation = Vec3d::Zero();   // voxels
  Vec3d rotation_deg = Vec3d::Zero();  // degrees
  Vec3d shear_deg = Vec3d::Zero();     // degrees; slope = tan(angle)
  double scale = 1.0;
  bool flip_axial = false;

  bool within_bounds() const;
  /// The equivalent 12-parameter transform about `center`.
  AffineParams to_affine(const Vec3d& center) const;
};

/// Uniform draws within each closed range; deterministic given the stream
/// state.
AugmentationParams sample_augmentation(Rng& rng);

/// Resamples through the affine built from params: trilinear for
/// intensities, nearest for labels. Identity parameters reproduce the
/// volume bit-for-bit; a grid-aligned flip applied twice is the identity.
Volume3 apply_augmentation(const Volume3& volume,
                           const AugmentationParams& params);
LabelVolume apply_augmentation(const LabelVolume& labels,
                               const AugmentationParams& params);

std::string augmentation_to_json(const AugmentationParams& params);

}  // namespace voxseg

#endif  // VOXSEG_AUGMENT_HPP
