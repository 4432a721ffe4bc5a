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

#include "voxseg/affine.hpp"

#include <cmath>

#include <json.hpp>

namespace voxseg {

namespace {

Mat3d rotation_matrix(const Vec3d& degrees) {
  const double ax = degrees.x() * M_PI / 180.0;
  const double ay = degrees.y() * M_PI / 180.0;
  const double az = degrees.z() * M_PI / 180.0;
  Mat3d rx, ry, rz;
  rx << 1, 0, 0, 0, std::cos(ax), -std::sin(ax), 0, std::sin(ax), std::cos(ax);
  ry << std::cos(ay), 0, std::sin(ay), 0, 1, 0, -std::sin(ay), 0, std::cos(ay);
  rz << std::cos(az), -std::sin(az), 0, std::sin(az), std::cos(az), 0, 0, 0, 1;
  // Intrinsic x-then-y-then-z.
  return rz * ry * rx;
}

Mat3d shear_matrix(const Vec3d& s) {
  Mat3d sh = Mat3d::Identity();
  sh(0, 1) = s.x();  // xy
  sh(0, 2) = s.y();  // xz
  sh(1, 2) = s.z();  // yz
  return sh;
}

}  // namespace

Mat4d AffineParams::matrix() const {
  const Mat3d linear =
      rotation_matrix(rotation_deg) * shear_matrix(shear) * scale.asDiagonal();
  Mat4d m = Mat4d::Identity();
  m.topLeftCorner<3, 3>() = linear;
  m.topRightCorner<3, 1>() = translation + center - linear * center;
  if (flip_axial) {
    Mat4d f = Mat4d::Identity();
    f(2, 2) = -1.0;
    f(2, 3) = 2.0 * center.z();
    m = f * m;
  }
  return m;
}

AffineTransform::AffineTransform(const Mat4d& m) : m_(m) {
  if (std::abs(m_.topLeftCorner<3, 3>().determinant()) < 1e-12)
    throw SingularTransform("affine linear part is singular");
}

AffineTransform AffineTransform::from_params(const AffineParams& p) {
  return AffineTransform(p.matrix());
}

AffineTransform compose(const AffineTransform& a, const AffineTransform& b) {
  return AffineTransform(a.matrix() * b.matrix());
}

AffineTransform inverse(const AffineTransform& t) {
  return AffineTransform(t.matrix().inverse());
}

namespace {

template <typename Scalar>
Grid3<Scalar> resample_grid(const Grid3<Scalar>& in, const AffineTransform& t,
                            Interp interp, const Vec3i& out_dims) {
  Grid3<Scalar> out(out_dims, in.spacing());
  out.set_voxel_to_world(in.voxel_to_world());
  const Mat4d inv = t.matrix().inverse();
  const Mat3d lin = inv.topLeftCorner<3, 3>();
  const Vec3d off = inv.topRightCorner<3, 1>();

  for (int z = 0; z < out_dims.z(); ++z)
    for (int y = 0; y < out_dims.y(); ++y)
      for (int x = 0; x < out_dims.x(); ++x) {
        const Vec3d s = lin * Vec3d(x, y, z) + off;
        if (interp == Interp::nearest) {
          const int ix = static_cast<int>(std::lround(s.x()));
          const int iy = static_cast<int>(std::lround(s.y()));
          const int iz = static_cast<int>(std::lround(s.z()));
          out(x, y, z) = in.contains(ix, iy, iz) ? in(ix, iy, iz) : Scalar(0);
        } else {
          const int x0 = static_cast<int>(std::floor(s.x()));
          const int y0 = static_cast<int>(std::floor(s.y()));
          const int z0 = static_cast<int>(std::floor(s.z()));
          const double fx = s.x() - x0, fy = s.y() - y0, fz = s.z() - z0;
          double acc = 0.0;
          for (int cz = 0; cz <= 1; ++cz)
            for (int cy = 0; cy <= 1; ++cy)
              for (int cx = 0; cx <= 1; ++cx) {
                const int vx = x0 + cx, vy = y0 + cy, vz = z0 + cz;
                if (!in.contains(vx, vy, vz)) continue;  // outside reads as 0
                const double w = (cx ? fx : 1.0 - fx) * (cy ? fy : 1.0 - fy) *
                                 (cz ? fz : 1.0 - fz);
                acc += w * static_cast<double>(in(vx, vy, vz));
              }
          out(x, y, z) = static_cast<Scalar>(acc);
        }
      }
  return out;
}

}  // namespace

Volume3 resample(const Volume3& volume, const AffineTransform& t,
                 Interp interp, const Vec3i& out_dims) {
  return resample_grid(volume, t, interp, out_dims);
}

LabelVolume resample_labels(const LabelVolume& labels, const AffineTransform& t,
                            const Vec3i& out_dims) {
  return LabelVolume(
      resample_grid(static_cast<const Grid3<std::uint8_t>&>(labels), t,
                    Interp::nearest, out_dims),
      labels.class_count);
}

BinaryMask resample_mask(const BinaryMask& mask, const AffineTransform& t,
                         const Vec3i& out_dims) {
  return resample_grid(mask, t, Interp::nearest, out_dims);
}

Vec3i centered_crop_offset(const Vec3i& dims, const Vec3i& crop_dims) {
  return (dims - crop_dims) / 2;
}

std::string affine_to_json(const AffineParams& p) {
  nlohmann::json j;
  j["translation"] = {p.translation.x(), p.translation.y(), p.translation.z()};
  j["rotation_deg"] = {p.rotation_deg.x(), p.rotation_deg.y(),
                       p.rotation_deg.z()};
  j["scale"] = {p.scale.x(), p.scale.y(), p.scale.z()};
  j["shear"] = {p.shear.x(), p.shear.y(), p.shear.z()};
  j["flip_axial"] = p.flip_axial;
  j["center"] = {p.center.x(), p.center.y(), p.center.z()};
  const Mat4d m = p.matrix();
  std::vector<double> rows;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) rows.push_back(m(r, c));
  j["matrix_row_major"] = rows;
  return j.dump(2);
}

AffineParams affine_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  AffineParams p;
  auto vec = [&](const char* key, Vec3d fallback) {
    if (!j.contains(key)) return fallback;
    const auto& a = j.at(key);
    return Vec3d(a.at(0).get<double>(), a.at(1).get<double>(),
                 a.at(2).get<double>());
  };
  p.translation = vec("translation", Vec3d::Zero());
  p.rotation_deg = vec("rotation_deg", Vec3d::Zero());
  p.scale = vec("scale", Vec3d::Ones());
  p.shear = vec("shear", Vec3d::Zero());
  p.center = vec("center", Vec3d::Zero());
  p.flip_axial = j.value("flip_axial", false);
  return p;
}

}  // namespace voxseg
