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

#include "voxseg/morphology.hpp"

#include <cmath>

namespace voxseg {

StructuringElement StructuringElement::ball(double radius) {
  if (radius <= 0) throw ConfigError("structuring element radius must be > 0");
  StructuringElement se;
  se.radius_voxels = radius;
  const int r = static_cast<int>(std::floor(radius));
  const double r2 = radius * radius;
  for (int dz = -r; dz <= r; ++dz)
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx)
        if (dx * dx + dy * dy + dz * dz <= r2)
          se.offsets.emplace_back(dx, dy, dz);
  return se;
}

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
  BinaryMask out(mask.dims(), mask.spacing());
  out.set_voxel_to_world(mask.voxel_to_world());
  const Vec3i d = mask.dims();
  // Scatter from set voxels; equivalent to the gather definition because
  // the element is symmetric.
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x) {
        if (!mask(x, y, z)) continue;
        for (const Vec3i& o : se.offsets) {
          const int nx = x + o.x(), ny = y + o.y(), nz = z + o.z();
          if (mask.contains(nx, ny, nz)) out(nx, ny, nz) = 1;
        }
      }
  return out;
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
  BinaryMask out(mask.dims(), mask.spacing());
  out.set_voxel_to_world(mask.voxel_to_world());
  const Vec3i d = mask.dims();
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x) {
        bool all = true;
        for (const Vec3i& o : se.offsets) {
          const int nx = x + o.x(), ny = y + o.y(), nz = z + o.z();
          if (!mask.contains(nx, ny, nz) || !mask(nx, ny, nz)) {
            all = false;
            break;
          }
        }
        out(x, y, z) = all ? 1 : 0;
      }
  return out;
}

BinaryMask close_mask(const BinaryMask& mask, const StructuringElement& se) {
  return erode(dilate(mask, se), se);
}

Volume3 apply_mask(const Volume3& image, const BinaryMask& mask) {
  if (!image.same_geometry(mask))
    throw GeometryMismatch("apply_mask: image and mask geometry differ");
  Volume3 out = image;
  out.values() *= mask.values().cast<double>();
  return out;
}

}  // namespace voxseg
