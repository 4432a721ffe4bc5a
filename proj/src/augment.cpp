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

#include "voxseg/augment.hpp"

#include <cmath>

#include <json.hpp>

namespace voxseg {

namespace {

constexpr double kTranslationMax = 3.0;
constexpr double kRotationMaxDeg = 5.0;
constexpr double kShearMaxDeg = 5.0;
constexpr double kScaleLo = 0.95;
constexpr double kScaleHi = 1.05;

}  // namespace

bool AugmentationParams::within_bounds() const {
  return (translation.array().abs() <= kTranslationMax).all() &&
         (rotation_deg.array().abs() <= kRotationMaxDeg).all() &&
         (shear_deg.array().abs() <= kShearMaxDeg).all() &&
         scale >= kScaleLo && scale <= kScaleHi;
}

AffineParams AugmentationParams::to_affine(const Vec3d& center) const {
  AffineParams p;
  p.translation = translation;
  p.rotation_deg = rotation_deg;
  p.scale = Vec3d::Constant(scale);
  p.shear = shear_deg.unaryExpr(
      [](double deg) { return std::tan(deg * M_PI / 180.0); });
  p.flip_axial = flip_axial;
  p.center = center;
  return p;
}

AugmentationParams sample_augmentation(Rng& rng) {
  AugmentationParams a;
  for (int i = 0; i < 3; ++i)
    a.translation[i] = rng.uniform(-kTranslationMax, kTranslationMax);
  for (int i = 0; i < 3; ++i)
    a.rotation_deg[i] = rng.uniform(-kRotationMaxDeg, kRotationMaxDeg);
  for (int i = 0; i < 3; ++i)
    a.shear_deg[i] = rng.uniform(-kShearMaxDeg, kShearMaxDeg);
  a.scale = rng.uniform(kScaleLo, kScaleHi);
  a.flip_axial = rng.bernoulli(0.5);
  return a;
}

Volume3 apply_augmentation(const Volume3& volume,
                           const AugmentationParams& params) {
  if (!params.within_bounds())
    throw ConfigError("augmentation parameters outside their ranges");
  const AffineTransform t =
      AffineTransform::from_params(params.to_affine(volume.center()));
  return resample(volume, t, Interp::trilinear, volume.dims());
}

LabelVolume apply_augmentation(const LabelVolume& labels,
                               const AugmentationParams& params) {
  if (!params.within_bounds())
    throw ConfigError("augmentation parameters outside their ranges");
  const AffineTransform t =
      AffineTransform::from_params(params.to_affine(labels.center()));
  return resample_labels(labels, t, labels.dims());
}

std::string augmentation_to_json(const AugmentationParams& params) {
  nlohmann::json j;
  j["translation_voxels"] = {params.translation.x(), params.translation.y(),
                             params.translation.z()};
  j["rotation_deg"] = {params.rotation_deg.x(), params.rotation_deg.y(),
                       params.rotation_deg.z()};
  j["shear_deg"] = {params.shear_deg.x(), params.shear_deg.y(),
                    params.shear_deg.z()};
  j["scale"] = params.scale;
  j["flip_axial"] = params.flip_axial;
  return j.dump(2);
}

}  // namespace voxseg
