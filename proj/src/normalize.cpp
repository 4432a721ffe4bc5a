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

#include "voxseg/normalize.hpp"

#include "voxseg/segment.hpp"

namespace voxseg {

IntensityCentroids compute_centroids(const Volume3& volume,
                                     const BinaryMask& mask) {
  SegConfig cfg;
  cfg.k = 3;
  const KmeansResult km = kmeans_segment(volume, mask, cfg);
  IntensityCentroids c;
  c.csf = km.centroids[0];
  c.gm = km.centroids[1];
  c.wm = km.centroids[2];
  return c;
}

double fit_gain(const IntensityCentroids& image,
                const IntensityCentroids& target) {
  const double num = target.csf * image.csf + target.gm * image.gm +
                     target.wm * image.wm;
  const double den =
      image.csf * image.csf + image.gm * image.gm + image.wm * image.wm;
  if (den <= 0.0) throw DegenerateInput("fit_gain: all-zero image centroids");
  const double gain = num / den;
  if (gain <= 0.0) throw DegenerateInput("fit_gain: non-positive gain");
  return gain;
}

Volume3 apply_gain(const Volume3& volume, double gain) {
  if (gain <= 0.0) throw ConfigError("apply_gain: gain must be > 0");
  Volume3 out = volume;
  out.values() *= gain;
  return out;
}

}  // namespace voxseg
