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

#ifndef VOXSEG_SEGMENT_HPP
#define VOXSEG_SEGMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voxseg/grid3.hpp"

namespace voxseg {

/// Per-class Gaussian intensity parameters; the intensity term of the
/// neighborhood-regularized labeling. Means are kept ascending so class
/// indices always read CSF < GM < WM.
struct TissueModel {
  ArrayXd mean;
  ArrayXd variance;

  int classes() const { return static_cast<int>(mean.size()); }
};

struct PsoConfig {
  int swarm_size = 30;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
  int iters = 100;
};

struct GaConfig {
  int population = 30;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  int generations = 100;
};

struct SegConfig {
  int k = 3;
  /// Ascending start centroids; empty means percentile auto-init.
  std::optional<std::vector<double>> init_centroids;
  int max_iter = 100;
  /// Convergence tolerance, relative to the masked intensity range for
  /// centroid motion; absolute for FCM membership change.
  double tol = 1e-4;
  double beta = 0.7;
  int icm_iters = 5;
  int em_iters = 10;
  /// Off by default: hard-label sample statistics in the M-step. On: stats
  /// weighted by the per-voxel label posterior instead.
  bool soft_m_step = false;
  double fcm_fuzziness = 2.0;
  PsoConfig pso;
  GaConfig ga;
  std::uint64_t seed = 0;
  /// Variance floor as a fraction of (intensity range)^2; keeps
  /// log-densities finite on noise-free synthetic data.
  double variance_floor_rel = 1e-6;
};

// ---------------------------------------------------------------------------
// Clustering engines
// ---------------------------------------------------------------------------

struct KmeansResult {
  LabelVolume labels;
  std::vector<double> centroids;  // ascending
  double sse = 0.0;
  int iterations = 0;
};

/// Lloyd iterations from the configured start centroids until the largest
/// centroid movement drops below tol (relative to the intensity range) or
/// max_iter. Classes come out sorted by ascending centroid. Empty clusters
/// are re-seeded at the masked voxel farthest from its current centroid.
KmeansResult kmeans_segment(const Volume3& volume, const BinaryMask& mask,
                            const SegConfig& cfg);

/// Percentile start: centroids at 10%/50%/90% of the masked intensity range
/// (evenly spread between those anchors for other k), so the lowest start
/// always falls in the low-intensity band.
std::vector<double> default_init_centroids(const Volume3& volume,
                                           const BinaryMask& mask, int k = 3);

struct OtsuResult {
  LabelVolume labels;
  std::vector<double> thresholds;  // band upper edges, intensity units
};

/// Exhaustive multi-level Otsu on a 256-bin histogram of the masked voxels,
/// maximizing between-class variance over all threshold tuples.
OtsuResult otsu_multilevel(const Volume3& volume, const BinaryMask& mask,
                           int k = 3);

struct FcmResult {
  LabelVolume labels;
  std::vector<double> centroids;
  /// n_masked x k, rows sum to 1, masked voxels in raster order.
  Eigen::MatrixXd memberships;
  int iterations = 0;
};

/// Fuzzy C-means with fuzziness m; hard labels by argmax membership. A voxel
/// sitting exactly on a centroid gets membership 1 for that class.
FcmResult fcm_segment(const Volume3& volume, const BinaryMask& mask,
                      const SegConfig& cfg);

// ---------------------------------------------------------------------------
// Neighborhood-regularized refinement (ICM within EM)
// ---------------------------------------------------------------------------

struct IcmState {
  LabelVolume labels;
  TissueModel model;
  double beta = 0.7;
  int iteration = 0;
};

/// One full raster-order sweep. Per masked voxel and class l the score is
///
///   beta * (face-adjacent neighbors currently labeled l)
///   + log Gaussian(x | mean_l, variance_l)
///
/// maximized with ties to the lower class; updates propagate within the
/// sweep (sequential ICM).
IcmState icm_sweep(const Volume3& volume, const BinaryMask& mask,
                   const IcmState& state);

/// Posterior energy of a labeling: sum of per-voxel log Gaussians plus
/// beta times the number of same-label face-adjacent pairs (each pair
/// counted once). Non-decreasing across sequential sweeps at fixed model.
double icm_energy(const Volume3& volume, const BinaryMask& mask,
                  const LabelVolume& labels, const TissueModel& model,
                  double beta);

/// Hard-label sample mean/variance per class. Empty classes fall back to
/// `previous` when given (indices recorded in `frozen`), otherwise throw.
TissueModel estimate_model(const Volume3& volume, const BinaryMask& mask,
                           const LabelVolume& labels, int k,
                           double variance_floor_rel = 1e-6,
                           const TissueModel* previous = nullptr,
                           std::vector<int>* frozen = nullptr);

struct EmIteration {
  int em_iter = 0;
  long changed_voxels = 0;
  double energy = 0.0;          // posterior energy after the E-step
  std::vector<int> frozen_classes;
};

struct HmrfResult {
  LabelVolume labels;
  TissueModel model;
  std::vector<EmIteration> log;
};

/// em_iters rounds of: E-step = icm_iters sequential ICM sweeps under the
/// current model; M-step = re-estimated Gaussian parameters from the new
/// labels. The posterior energy is checked non-decreasing across the sweeps
/// of every E-step.
HmrfResult hmrf_em(const Volume3& volume, const BinaryMask& mask,
                   const LabelVolume& init_labels, const SegConfig& cfg);

// ---------------------------------------------------------------------------
// Metaheuristic centroid refinement
// ---------------------------------------------------------------------------

struct RefineResult {
  LabelVolume labels;
  std::vector<double> centroids;
  double sse = 0.0;
  double kmeans_sse = 0.0;           // the seed solution's SSE
  std::vector<double> best_history;  // best SSE per iteration/generation
};

/// Global-best particle swarm over centroid tuples minimizing the nearest-
/// centroid SSE; the swarm is seeded with the Lloyd solution plus perturbed
/// copies, so sse <= kmeans_sse always.
RefineResult pso_refine(const Volume3& volume, const BinaryMask& mask,
                        const SegConfig& cfg);

/// Generational GA (tournament selection, blend crossover, Gaussian
/// mutation, elitism of one) on centroid tuples; the Lloyd solution is
/// injected into generation 0, so sse <= kmeans_sse always.
RefineResult ga_refine(const Volume3& volume, const BinaryMask& mask,
                       const SegConfig& cfg);

// ---------------------------------------------------------------------------
// Engine selection
// ---------------------------------------------------------------------------

enum class Engine { kmeans, otsu, fcm, pso, ga };

struct EngineSpec {
  Engine base = Engine::kmeans;
  bool hmrf_refine = false;
};

/// Parses "kmeans", "otsu+hmrf", ... Throws ConfigError on unknown names.
EngineSpec parse_engine(const std::string& name);
std::string engine_name(const EngineSpec& spec);

/// Runs the base engine, then optionally refines its labels with hmrf_em.
LabelVolume run_engine(const EngineSpec& spec, const Volume3& volume,
                       const BinaryMask& mask, const SegConfig& cfg);

}  // namespace voxseg

#endif  // VOXSEG_SEGMENT_HPP
