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

#ifndef VOXSEG_NORMALIZE_HPP
#define VOXSEG_NORMALIZE_HPP

#include "voxseg/grid3.hpp"

namespace voxseg {

/// Mean intensities of the three tissue bands, strictly ascending:
/// CSF (low) < GM (medium) < WM (high).
struct IntensityCentroids {
  double csf = 0;
  double gm = 0;
  double wm = 0;

  bool valid() const { return csf < gm && gm < wm && csf >= 0; }
};

/// Three-cluster centroids of the masked intensities via the clustering
/// engine (k = 3), sorted ascending. Throws DegenerateInput when the masked
/// voxels carry fewer than 3 distinct values.
IntensityCentroids compute_centroids(const Volume3& volume,
                                     const BinaryMask& mask);

/// Least-squares single multiplicative gain through the origin:
/// s = sum(t_k * i_k) / sum(i_k^2); exact when the triples are proportional.
double fit_gain(const IntensityCentroids& image,
                const IntensityCentroids& target);

/// Voxelwise multiply; geometry unchanged.
Volume3 apply_gain(const Volume3& volume, double gain);

}  // namespace voxseg

#endif  // VOXSEG_NORMALIZE_HPP
