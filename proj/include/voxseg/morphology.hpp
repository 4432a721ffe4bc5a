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

#ifndef VOXSEG_MORPHOLOGY_HPP
#define VOXSEG_MORPHOLOGY_HPP

#include <vector>

#include "voxseg/grid3.hpp"

namespace voxseg {

/// Discrete spherical structuring element: all integer offsets with
/// Euclidean norm <= radius. Contains the origin and is symmetric under
/// negation, so closing is well-defined.
struct StructuringElement {
  double radius_voxels = 3.0;
  std::vector<Vec3i> offsets;

  static StructuringElement ball(double radius);
};

/// Output bit set iff any in-bounds se-neighbor is set in the input.
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);

/// Output bit set iff every in-bounds se-neighbor is set; out-of-bounds
/// neighbors count as unset, so erosion clears the volume border shell.
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);

/// Dilation followed by erosion with the same element; fills cavities and
/// gaps smaller than the element (the CSF-inclusion step of brain
/// extraction).
BinaryMask close_mask(const BinaryMask& mask, const StructuringElement& se);

/// Voxelwise product; unset-mask voxels become 0.
Volume3 apply_mask(const Volume3& image, const BinaryMask& mask);

}  // namespace voxseg

#endif  // VOXSEG_MORPHOLOGY_HPP
