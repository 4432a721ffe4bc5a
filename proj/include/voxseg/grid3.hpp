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

#ifndef VOXSEG_GRID3_HPP
#define VOXSEG_GRID3_HPP

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "voxseg/errors.hpp"
#include "voxseg/types.hpp"

namespace voxseg {

/// Dense 3D voxel grid over a scalar type. Values live in a flat Eigen array
/// in x-fastest order (index = x + nx*(y + ny*z)), so whole-volume arithmetic
/// stays expression-friendly: `out.values() = a.values() * b.values()`.
///
/// A grid carries its geometry: voxel counts, voxel spacing in mm, and a 4x4
/// voxel-to-world affine. Grids are cheap value types; every algorithm in the
/// toolkit takes them by const reference and returns fresh ones.
template <typename Scalar>
class Grid3 {
 public:
  using Array = ArrayX<Scalar>;

  Grid3() : dims_(0, 0, 0), spacing_(1, 1, 1), affine_(Mat4d::Identity()) {}

  Grid3(const Vec3i& dims, const Vec3d& spacing = Vec3d(1, 1, 1))
      : dims_(dims), spacing_(spacing) {
    if ((dims.array() < 1).any())
      throw DimensionMismatch("grid dims must be >= 1");
    if ((spacing.array() <= 0).any())
      throw DimensionMismatch("grid spacing must be > 0");
    affine_ = Mat4d::Identity();
    affine_(0, 0) = spacing.x();
    affine_(1, 1) = spacing.y();
    affine_(2, 2) = spacing.z();
    values_ = Array::Zero(size());
  }

  const Vec3i& dims() const { return dims_; }
  const Vec3d& spacing() const { return spacing_; }
  const Mat4d& voxel_to_world() const { return affine_; }
  void set_voxel_to_world(const Mat4d& m) { affine_ = m; }

  Eigen::Index size() const {
    return static_cast<Eigen::Index>(dims_.x()) * dims_.y() * dims_.z();
  }

  Eigen::Index index(int x, int y, int z) const {
    return static_cast<Eigen::Index>(x) +
           static_cast<Eigen::Index>(dims_.x()) *
               (static_cast<Eigen::Index>(y) +
                static_cast<Eigen::Index>(dims_.y()) *
                    static_cast<Eigen::Index>(z));
  }

  bool contains(int x, int y, int z) const {
    return x >= 0 && x < dims_.x() && y >= 0 && y < dims_.y() && z >= 0 &&
           z < dims_.z();
  }

  Scalar& operator()(int x, int y, int z) { return values_[index(x, y, z)]; }
  Scalar operator()(int x, int y, int z) const {
    return values_[index(x, y, z)];
  }

  Array& values() { return values_; }
  const Array& values() const { return values_; }

  /// Geometric center in voxel coordinates; rotation/scale pivots here.
  Vec3d center() const {
    return (dims_.cast<double>() - Vec3d::Ones()) / 2.0;
  }

  template <typename Other>
  bool same_geometry(const Grid3<Other>& o, double tol = 1e-9) const {
    return dims_ == o.dims() && (spacing_ - o.spacing()).norm() <= tol &&
           (affine_ - o.voxel_to_world()).norm() <= tol;
  }

 private:
  Vec3i dims_;
  Vec3d spacing_;
  Mat4d affine_;
  Array values_;
};

/// The MR image carrier: double-precision intensities.
using Volume3 = Grid3<double>;

/// 0/1 voxel mask sharing the geometry of its source volume.
using BinaryMask = Grid3<std::uint8_t>;

/// Integer tissue-class grid. Label 0 is background; classes 1..class_count
/// are tissues ordered by ascending mean intensity (CSF < GM < WM for the
/// standard three-class setup).
class LabelVolume : public Grid3<std::uint8_t> {
 public:
  LabelVolume() = default;
  explicit LabelVolume(const Vec3i& dims, int class_count = 3,
                       const Vec3d& spacing = Vec3d(1, 1, 1))
      : Grid3<std::uint8_t>(dims, spacing), class_count(class_count) {}
  LabelVolume(Grid3<std::uint8_t> grid, int classes)
      : Grid3<std::uint8_t>(std::move(grid)), class_count(classes) {}

  int class_count = 3;
};

template <typename Scalar>
std::int64_t voxel_count(const Grid3<Scalar>& g) {
  return static_cast<std::int64_t>(g.size());
}

/// Histogram over `bin_count` bins uniformly partitioning [min, max] of the
/// grid values; the top edge is inclusive so counts always sum to the voxel
/// count. A constant volume puts all mass in bin 0.
template <typename Scalar>
std::vector<std::int64_t> histogram(const Grid3<Scalar>& g, int bin_count) {
  if (bin_count < 1) throw ConfigError("histogram needs bin_count >= 1");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bin_count), 0);
  const double lo = static_cast<double>(g.values().minCoeff());
  const double hi = static_cast<double>(g.values().maxCoeff());
  const double width = hi - lo;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    int b = 0;
    if (width > 0) {
      b = static_cast<int>((static_cast<double>(g.values()[i]) - lo) / width *
                           bin_count);
      if (b >= bin_count) b = bin_count - 1;
      if (b < 0) b = 0;
    }
    ++counts[static_cast<std::size_t>(b)];
  }
  return counts;
}

/// Number of distinct values in the grid (used by the data-bin checks on
/// tissue-labeled outputs).
template <typename Scalar>
int distinct_value_count(const Grid3<Scalar>& g) {
  std::vector<Scalar> v(g.values().data(), g.values().data() + g.size());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return static_cast<int>(v.size());
}

inline BinaryMask full_mask(const Vec3i& dims,
                            const Vec3d& spacing = Vec3d(1, 1, 1)) {
  BinaryMask m(dims, spacing);
  m.values().setConstant(1);
  return m;
}

}  // namespace voxseg

#endif  // VOXSEG_GRID3_HPP
