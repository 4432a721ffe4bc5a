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

#include "voxseg/register.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace voxseg {

double ncc(const Volume3& a, const Volume3& b) {
  if (a.size() != b.size())
    throw GeometryMismatch("ncc: volume sizes differ");
  const double ma = a.values().mean();
  const double mb = b.values().mean();
  const ArrayXd da = a.values() - ma;
  const ArrayXd db = b.values() - mb;
  const double va = (da * da).sum();
  const double vb = (db * db).sum();
  if (va <= 0.0 || vb <= 0.0)
    throw DegenerateInput("ncc undefined for a constant volume");
  return (da * db).sum() / std::sqrt(va * vb);
}

Volume3 downsample_mean(const Volume3& v, int factor) {
  if (factor <= 1) return v;
  const Vec3i d = v.dims();
  const Vec3i od((d.x() + factor - 1) / factor, (d.y() + factor - 1) / factor,
                 (d.z() + factor - 1) / factor);
  Volume3 out(od, v.spacing() * factor);
  for (int z = 0; z < od.z(); ++z)
    for (int y = 0; y < od.y(); ++y)
      for (int x = 0; x < od.x(); ++x) {
        double sum = 0.0;
        int n = 0;
        for (int dz = 0; dz < factor; ++dz)
          for (int dy = 0; dy < factor; ++dy)
            for (int dx = 0; dx < factor; ++dx) {
              const int sx = x * factor + dx, sy = y * factor + dy,
                        sz = z * factor + dz;
              if (!v.contains(sx, sy, sz)) continue;
              sum += v(sx, sy, sz);
              ++n;
            }
        out(x, y, z) = sum / n;
      }
  return out;
}

namespace {

double& param_ref(AffineParams& p, int i) {
  switch (i) {
    case 0: return p.translation.x();
    case 1: return p.translation.y();
    case 2: return p.translation.z();
    case 3: return p.rotation_deg.x();
    case 4: return p.rotation_deg.y();
    case 5: return p.rotation_deg.z();
    case 6: return p.scale.x();
    case 7: return p.scale.y();
    case 8: return p.scale.z();
    case 9: return p.shear.x();
    case 10: return p.shear.y();
    case 11: return p.shear.z();
    default: throw ConfigError("bad parameter index");
  }
}

class CostFn {
 public:
  CostFn(const Volume3& moving, const Volume3& fixed, RegistrationCost kind)
      : moving_(moving), fixed_(fixed), kind_(kind) {
    fixed_mean_ = fixed.values().mean();
    fixed_dev_ = fixed.values() - fixed_mean_;
    fixed_var_ = (fixed_dev_ * fixed_dev_).sum();
  }

  // Lower is better; NCC maps to 1 - ncc. Degenerate resamples (constant
  // output, volume pushed out of view) rank worst instead of throwing.
  double operator()(const AffineParams& p, long& evals) const {
    ++evals;
    const Volume3 warped = resample(
        moving_, AffineTransform::from_params(p), Interp::trilinear,
        fixed_.dims());
    if (kind_ == RegistrationCost::ssd)
      return (warped.values() - fixed_.values()).square().mean();
    const double mw = warped.values().mean();
    const ArrayXd dw = warped.values() - mw;
    const double vw = (dw * dw).sum();
    if (vw <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 - (dw * fixed_dev_).sum() / std::sqrt(vw * fixed_var_);
  }

 private:
  const Volume3& moving_;
  const Volume3& fixed_;
  RegistrationCost kind_;
  double fixed_mean_ = 0;
  ArrayXd fixed_dev_;
  double fixed_var_ = 0;
};

// Coordinate descent with step halving at one pyramid level. params and
// steps are expressed in the level's own voxel units.
void descend(const CostFn& cost, AffineParams& params, double& best,
             const RegistrationConfig& cfg, long& evals) {
  std::vector<double> steps = {
      cfg.translation_step, cfg.translation_step, cfg.translation_step,
      cfg.rotation_step,    cfg.rotation_step,    cfg.rotation_step,
      cfg.scale_step,       cfg.scale_step,       cfg.scale_step,
      cfg.shear_step,       cfg.shear_step,       cfg.shear_step};
  int halvings = 0;
  for (int pass = 0; pass < cfg.max_iterations; ++pass) {
    const double pass_start = best;
    bool improved = false;
    for (int i = 0; i < 12; ++i) {
      for (const double dir : {+1.0, -1.0}) {
        AffineParams cand = params;
        param_ref(cand, i) += dir * steps[static_cast<std::size_t>(i)];
        if (i >= 6 && i <= 8 && param_ref(cand, i) <= 0.1) continue;
        const double c = cost(cand, evals);
        if (c < best) {
          best = c;
          params = cand;
          improved = true;
          break;  // keep the winning direction, move to the next parameter
        }
      }
    }
    if (!improved) {
      ++halvings;
      if (halvings > cfg.max_step_halvings) break;
      for (double& s : steps) s *= cfg.step_shrink;
    } else if (pass_start - best < cfg.cost_tolerance) {
      break;
    }
  }
}

}  // namespace

RegistrationResult register_affine(const Volume3& moving, const Volume3& fixed,
                                   const RegistrationConfig& cfg) {
  if (moving.size() == 0 || fixed.size() == 0)
    throw DegenerateInput("register_affine: empty volume");
  const auto variance = [](const Volume3& v) {
    const ArrayXd d = v.values() - v.values().mean();
    return (d * d).sum();
  };
  if (variance(moving) <= 0.0 || variance(fixed) <= 0.0)
    throw DegenerateInput("register_affine: constant volume");
  if (cfg.pyramid_levels < 1)
    throw ConfigError("pyramid_levels must be >= 1");

  long evals = 0;
  AffineParams params;  // running estimate in full-resolution units
  params.center = fixed.center();

  for (int level = 0; level < cfg.pyramid_levels; ++level) {
    const int factor = 1 << (cfg.pyramid_levels - 1 - level);
    if (factor > 1 && fixed.dims().minCoeff() / factor < 4)
      continue;  // volume too small for this level
    const Volume3 mov_l = downsample_mean(moving, factor);
    const Volume3 fix_l = downsample_mean(fixed, factor);
    const CostFn cost(mov_l, fix_l, cfg.cost);

    // Map the running full-resolution estimate into level units: the pooled
    // block center of level voxel p sits at f*p + (f-1)/2.
    const double shift = (factor - 1) / 2.0;
    AffineParams p_l = params;
    p_l.translation = params.translation / factor;
    p_l.center = (params.center - Vec3d::Constant(shift)) / factor;

    AffineParams identity_l;
    identity_l.center = p_l.center;

    double best = cost(p_l, evals);
    const double ident_cost = cost(identity_l, evals);
    if (ident_cost < best) {  // never carry a level estimate that lost to it
      best = ident_cost;
      p_l = identity_l;
    }
    descend(cost, p_l, best, cfg, evals);

    params = p_l;
    params.translation = p_l.translation * factor;
    params.center = p_l.center * factor + Vec3d::Constant(shift);
  }

  // Report costs at full resolution.
  const CostFn cost_full(moving, fixed, cfg.cost);
  AffineParams identity;
  identity.center = fixed.center();
  const double initial = cost_full(identity, evals);
  double final_cost = cost_full(params, evals);
  if (initial < final_cost) {
    params = identity;
    final_cost = initial;
  }

  RegistrationResult res;
  res.params = params;
  res.transform = AffineTransform::from_params(params);
  res.initial_cost = initial;
  res.final_cost = final_cost;
  res.cost_evaluations = evals;
  return res;
}

}  // namespace voxseg
