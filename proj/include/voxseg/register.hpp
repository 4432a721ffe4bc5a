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

#ifndef VOXSEG_REGISTER_HPP
#define VOXSEG_REGISTER_HPP

#include "voxseg/affine.hpp"
#include "voxseg/grid3.hpp"

namespace voxseg {

enum class RegistrationCost { ncc, ssd };

/// Derivative-free multi-resolution optimizer settings. The search is a
/// per-level coordinate descent over the 12 affine parameters with step
/// halving; fully deterministic (no random restarts).
struct RegistrationConfig {
  RegistrationCost cost = RegistrationCost::ncc;
  int pyramid_levels = 3;       // mean-pooled by 2^(levels-1-i)
  int max_iterations = 60;      // descent passes per level
  double translation_step = 1.0;  // initial steps; translation in level voxels
  double rotation_step = 2.0;     // degrees
  double scale_step = 0.02;
  double shear_step = 0.02;
  double step_shrink = 0.5;
  int max_step_halvings = 6;
  double cost_tolerance = 1e-9;  // stop when a full pass gains less than this
};

struct RegistrationResult {
  AffineParams params;       // full-resolution voxel units
  AffineTransform transform;
  double initial_cost = 0;   // cost of the identity at full resolution
  double final_cost = 0;     // <= initial_cost by construction
  long cost_evaluations = 0;
};

/// Normalized cross-correlation between two same-sized volumes.
double ncc(const Volume3& a, const Volume3& b);

/// Finds the affine transform minimizing cfg.cost between
/// resample(moving, t) and fixed. Throws DegenerateInput when either volume
/// is constant (NCC undefined). Never returns a transform worse than the
/// identity; with nothing to gain it returns the identity itself.
RegistrationResult register_affine(const Volume3& moving, const Volume3& fixed,
                                   const RegistrationConfig& cfg);

/// Mean-pooling downsample by an integer factor (partial edge blocks average
/// what is in bounds). Shared with the registration pyramid.
Volume3 downsample_mean(const Volume3& v, int factor);

}  // namespace voxseg

#endif  // VOXSEG_REGISTER_HPP
