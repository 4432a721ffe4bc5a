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

#ifndef VOXSEG_AFFINE_HPP
#define VOXSEG_AFFINE_HPP

#include <string>

#include "voxseg/grid3.hpp"

namespace voxseg {

/// 12-parameter spatial map in voxel coordinates. The matrix is built as
///
///   p' = F * ( T + C + R * Sh * S * (p - C) )
///
/// i.e. scale, then shear, then rotation (intrinsic Euler x-then-y-then-z,
/// degrees), then translation, all about `center`; the optional axial flip F
/// (z negated about `center`) is applied last. This mapping is the single
/// documented parameters-to-matrix convention used everywhere (registration,
/// augmentation, serialization).
struct AffineParams {
  Vec3d translation = Vec3d::Zero();   // voxels
  Vec3d rotation_deg = Vec3d::Zero();  // Euler angles about x, y, z
  Vec3d scale = Vec3d::Ones();
  Vec3d shear = Vec3d::Zero();         // slopes: xy, xz, yz
  bool flip_axial = false;
  Vec3d center = Vec3d::Zero();        // pivot, voxels

  Mat4d matrix() const;
};

/// Invertible voxel-space transform; a strong type over the homogeneous 4x4
/// matrix. det(linear part) > 0 unless built from params with the flip flag.
class AffineTransform {
 public:
  AffineTransform() : m_(Mat4d::Identity()) {}
  explicit AffineTransform(const Mat4d& m);
  static AffineTransform from_params(const AffineParams& p);

  const Mat4d& matrix() const { return m_; }
  Mat4d linear() const { return m_; }

  Vec3d apply(const Vec3d& p) const {
    return m_.topLeftCorner<3, 3>() * p + m_.topRightCorner<3, 1>();
  }

 private:
  Mat4d m_;
};

/// Matrix product semantics: apply b, then a.
AffineTransform compose(const AffineTransform& a, const AffineTransform& b);
AffineTransform inverse(const AffineTransform& t);

enum class Interp { trilinear, nearest };

/// Output voxel v takes the input value sampled at t^-1(v); samples outside
/// the input grid read as 0. Trilinear stays within [min, max] of the input
/// (convex weights); nearest is exact for label data.
Volume3 resample(const Volume3& volume, const AffineTransform& t,
                 Interp interp, const Vec3i& out_dims);

/// Nearest-neighbor resampling for tissue labels; class_count carries over.
LabelVolume resample_labels(const LabelVolume& labels,
                            const AffineTransform& t, const Vec3i& out_dims);
BinaryMask resample_mask(const BinaryMask& mask, const AffineTransform& t,
                         const Vec3i& out_dims);

/// Extracts the axis-aligned sub-box [offset, offset + crop_dims).
template <typename Scalar>
Grid3<Scalar> crop(const Grid3<Scalar>& g, const Vec3i& crop_dims,
                   const Vec3i& offset) {
  if ((crop_dims.array() < 1).any())
    throw OutOfBounds("crop dims must be >= 1");
  if ((offset.array() < 0).any() ||
      ((offset + crop_dims).array() > g.dims().array()).any())
    throw OutOfBounds("crop box exits the volume bounds");
  Grid3<Scalar> out(crop_dims, g.spacing());
  Mat4d shift = Mat4d::Identity();
  shift.topRightCorner<3, 1>() = offset.cast<double>();
  out.set_voxel_to_world(g.voxel_to_world() * shift);
  for (int z = 0; z < crop_dims.z(); ++z)
    for (int y = 0; y < crop_dims.y(); ++y)
      for (int x = 0; x < crop_dims.x(); ++x)
        out(x, y, z) = g(x + offset.x(), y + offset.y(), z + offset.z());
  return out;
}

inline LabelVolume crop(const LabelVolume& lv, const Vec3i& crop_dims,
                        const Vec3i& offset) {
  return LabelVolume(crop(static_cast<const Grid3<std::uint8_t>&>(lv),
                          crop_dims, offset),
                     lv.class_count);
}

/// Centered crop offset for a given output size.
Vec3i centered_crop_offset(const Vec3i& dims, const Vec3i& crop_dims);

/// JSON record: the 12 parameters plus the row-major 4x4 matrix.
std::string affine_to_json(const AffineParams& p);
AffineParams affine_from_json(const std::string& text);

}  // namespace voxseg

#endif  // VOXSEG_AFFINE_HPP
