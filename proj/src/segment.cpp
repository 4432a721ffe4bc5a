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

#include "voxseg/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "voxseg/rng.hpp"

namespace voxseg {

namespace {

constexpr std::uint64_t kPsoStream = 0x50534f;  // distinct RNG substreams
constexpr std::uint64_t kGaStream = 0x4741;

struct MaskedValues {
  std::vector<Eigen::Index> indices;  // raster order
  ArrayXd values;
  double min = 0, max = 0, range = 0;
};

MaskedValues collect_masked(const Volume3& volume, const BinaryMask& mask) {
  if (!volume.same_geometry(mask))
    throw GeometryMismatch("volume and mask geometry differ");
  MaskedValues mv;
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    if (mask.values()[i]) mv.indices.push_back(i);
  mv.values.resize(static_cast<Eigen::Index>(mv.indices.size()));
  for (std::size_t j = 0; j < mv.indices.size(); ++j)
    mv.values[static_cast<Eigen::Index>(j)] = volume.values()[mv.indices[j]];
  if (mv.values.size() > 0) {
    mv.min = mv.values.minCoeff();
    mv.max = mv.values.maxCoeff();
    mv.range = mv.max - mv.min;
  }
  return mv;
}

int count_distinct(const ArrayXd& values, int cap) {
  std::vector<double> v(values.data(), values.data() + values.size());
  std::sort(v.begin(), v.end());
  int distinct = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i == 0 || v[i] != v[i - 1]) ++distinct;
    if (distinct >= cap) break;
  }
  return distinct;
}

void require_k_distinct(const ArrayXd& values, int k) {
  if (values.size() < k || count_distinct(values, k) < k)
    throw DegenerateInput("masked voxels carry fewer than k distinct values");
}

int nearest_centroid(double x, const std::vector<double>& c) {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(c.size()); ++j) {
    const double d = (x - c[static_cast<std::size_t>(j)]) *
                     (x - c[static_cast<std::size_t>(j)]);
    if (d < bd) {  // strict: ties stay with the lower index
      bd = d;
      best = j;
    }
  }
  return best;
}

double labeling_sse(const ArrayXd& values, const std::vector<double>& c) {
  double sse = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double d = values[i] - c[static_cast<std::size_t>(
                                     nearest_centroid(values[i], c))];
    sse += d * d;
  }
  return sse;
}

/// Builds the canonical label volume: centroids sorted ascending, classes
/// renumbered 1..k accordingly, background stays 0.
LabelVolume labels_from_centroids(const Volume3& volume, const BinaryMask& mask,
                                  const MaskedValues& mv,
                                  std::vector<double>& centroids) {
  const int k = static_cast<int>(centroids.size());
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return centroids[static_cast<std::size_t>(a)] <
           centroids[static_cast<std::size_t>(b)];
  });
  std::vector<int> rank(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) rank[static_cast<std::size_t>(order[r])] = r;

  std::vector<double> sorted(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r)
    sorted[static_cast<std::size_t>(r)] =
        centroids[static_cast<std::size_t>(order[r])];

  LabelVolume labels(volume.dims(), k, volume.spacing());
  labels.set_voxel_to_world(volume.voxel_to_world());
  for (std::size_t j = 0; j < mv.indices.size(); ++j) {
    const int a = nearest_centroid(mv.values[static_cast<Eigen::Index>(j)],
                                   centroids);
    labels.values()[mv.indices[j]] =
        static_cast<std::uint8_t>(rank[static_cast<std::size_t>(a)] + 1);
  }
  centroids = sorted;
  return labels;
}

std::vector<double> initial_centroids(const MaskedValues& mv,
                                      const SegConfig& cfg) {
  if (cfg.init_centroids) {
    if (static_cast<int>(cfg.init_centroids->size()) != cfg.k)
      throw ConfigError("init_centroids size does not match k");
    return *cfg.init_centroids;
  }
  std::vector<double> c(static_cast<std::size_t>(cfg.k));
  for (int i = 0; i < cfg.k; ++i) {
    const double p =
        cfg.k == 1 ? 0.5 : 0.1 + 0.8 * static_cast<double>(i) / (cfg.k - 1);
    c[static_cast<std::size_t>(i)] = mv.min + p * mv.range;
  }
  return c;
}

double log_gauss(double x, double mean, double variance) {
  return -0.5 * std::log(2.0 * M_PI * variance) -
         (x - mean) * (x - mean) / (2.0 * variance);
}

}  // namespace

std::vector<double> default_init_centroids(const Volume3& volume,
                                           const BinaryMask& mask, int k) {
  const MaskedValues mv = collect_masked(volume, mask);
  if (mv.values.size() == 0)
    throw DegenerateInput("mask selects no voxels");
  SegConfig cfg;
  cfg.k = k;
  return initial_centroids(mv, cfg);
}

namespace {

KmeansResult kmeansimpl(const Volume3& volume, const BinaryMask& mask,
                        const SegConfig& cfg, const MaskedValues& mv) {
  require_k_distinct(mv.values, cfg.k);
  std::vector<double> centroids = initial_centroids(mv, cfg);
  const double tol_abs = cfg.tol * (mv.range > 0 ? mv.range : 1.0);
  const Eigen::Index n = mv.values.size();
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  int iterations = 0;

  for (int it = 0; it < cfg.max_iter; ++it) {
    iterations = it + 1;
    std::vector<double> sum(static_cast<std::size_t>(cfg.k), 0.0);
    std::vector<long> count(static_cast<std::size_t>(cfg.k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = nearest_centroid(mv.values[i], centroids);
      assign[static_cast<std::size_t>(i)] = a;
      sum[static_cast<std::size_t>(a)] += mv.values[i];
      ++count[static_cast<std::size_t>(a)];
    }

    // Deterministic empty-cluster repair: relocate to the masked voxel
    // farthest from its assigned centroid.
    std::vector<int> used;
    for (int j = 0; j < cfg.k; ++j) {
      if (count[static_cast<std::size_t>(j)] > 0) continue;
      double far_d = -1.0;
      Eigen::Index far_i = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::find(used.begin(), used.end(), static_cast<int>(i)) !=
            used.end())
          continue;
        const int a = assign[static_cast<std::size_t>(i)];
        const double d = std::abs(mv.values[i] -
                                  centroids[static_cast<std::size_t>(a)]);
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      centroids[static_cast<std::size_t>(j)] = mv.values[far_i];
      used.push_back(static_cast<int>(far_i));
    }
    if (!used.empty()) continue;  // reassign against repaired centroids

    double movement = 0.0;
    for (int j = 0; j < cfg.k; ++j) {
      const double nc = sum[static_cast<std::size_t>(j)] /
                        static_cast<double>(count[static_cast<std::size_t>(j)]);
      movement = std::max(movement,
                          std::abs(nc - centroids[static_cast<std::size_t>(j)]));
      centroids[static_cast<std::size_t>(j)] = nc;
    }
    if (movement < tol_abs) break;
  }

  KmeansResult res;
  res.iterations = iterations;
  res.centroids = centroids;
  res.labels = labels_from_centroids(volume, mask, mv, res.centroids);
  res.sse = labeling_sse(mv.values, res.centroids);
  return res;
}

}  // namespace

KmeansResult kmeans_segment(const Volume3& volume, const BinaryMask& mask,
                            const SegConfig& cfg) {
  const MaskedValues mv = collect_masked(volume, mask);
  return kmeansimpl(volume, mask, cfg, mv);
}

OtsuResult otsu_multilevel(const Volume3& volume, const BinaryMask& mask,
                           int k) {
  if (k != 2 && k != 3)
    throw ConfigError("otsu_multilevel supports k in {2, 3}");
  const MaskedValues mv = collect_masked(volume, mask);
  require_k_distinct(mv.values, k);

  constexpr int kBins = 256;
  std::vector<double> count(kBins, 0.0);
  const Eigen::Index n = mv.values.size();
  auto bin_of = [&](double x) {
    if (mv.range <= 0) return 0;
    int b = static_cast<int>((x - mv.min) / mv.range * kBins);
    return std::clamp(b, 0, kBins - 1);
  };
  for (Eigen::Index i = 0; i < n; ++i) count[static_cast<std::size_t>(bin_of(mv.values[i]))] += 1.0;

  // Prefix sums of mass and mass*bin-index; between-class variance of a
  // band is weight * mean^2 summed over bands (global-mean term constant).
  std::vector<double> cw(kBins + 1, 0.0), cm(kBins + 1, 0.0);
  for (int b = 0; b < kBins; ++b) {
    cw[static_cast<std::size_t>(b) + 1] = cw[static_cast<std::size_t>(b)] + count[static_cast<std::size_t>(b)];
    cm[static_cast<std::size_t>(b) + 1] =
        cm[static_cast<std::size_t>(b)] + count[static_cast<std::size_t>(b)] * b;
  }
  auto band_score = [&](int lo, int hi) {  // bins [lo, hi]
    const double w = cw[static_cast<std::size_t>(hi) + 1] - cw[static_cast<std::size_t>(lo)];
    if (w <= 0.0) return 0.0;
    const double m = (cm[static_cast<std::size_t>(hi) + 1] - cm[static_cast<std::size_t>(lo)]) / w;
    return w * m * m;
  };

  std::vector<int> best_t;
  double best_score = -1.0;
  if (k == 2) {
    for (int t = 0; t < kBins - 1; ++t) {
      const double s = band_score(0, t) + band_score(t + 1, kBins - 1);
      if (s > best_score) {
        best_score = s;
        best_t = {t};
      }
    }
  } else {
    for (int t1 = 0; t1 < kBins - 2; ++t1) {
      const double s1 = band_score(0, t1);
      for (int t2 = t1 + 1; t2 < kBins - 1; ++t2) {
        const double s = s1 + band_score(t1 + 1, t2) + band_score(t2 + 1, kBins - 1);
        if (s > best_score) {
          best_score = s;
          best_t = {t1, t2};
        }
      }
    }
  }

  OtsuResult res;
  res.labels = LabelVolume(volume.dims(), k, volume.spacing());
  res.labels.set_voxel_to_world(volume.voxel_to_world());
  for (std::size_t j = 0; j < mv.indices.size(); ++j) {
    const int b = bin_of(mv.values[static_cast<Eigen::Index>(j)]);
    int cls = k;
    for (int t = 0; t < static_cast<int>(best_t.size()); ++t)
      if (b <= best_t[static_cast<std::size_t>(t)]) {
        cls = t + 1;
        break;
      }
    res.labels.values()[mv.indices[j]] = static_cast<std::uint8_t>(cls);
  }
  for (int t : best_t)
    res.thresholds.push_back(mv.min + (t + 1) * mv.range / kBins);
  return res;
}

FcmResult fcm_segment(const Volume3& volume, const BinaryMask& mask,
                      const SegConfig& cfg) {
  const MaskedValues mv = collect_masked(volume, mask);
  require_k_distinct(mv.values, cfg.k);
  if (cfg.fcm_fuzziness <= 1.0)
    throw ConfigError("fcm fuzziness must be > 1");

  const Eigen::Index n = mv.values.size();
  const int k = cfg.k;
  std::vector<double> centroids = initial_centroids(mv, cfg);
  Eigen::MatrixXd u(n, k);
  const double expo = 1.0 / (cfg.fcm_fuzziness - 1.0);

  auto update_memberships = [&](Eigen::MatrixXd& out) {
    std::vector<double> dd(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
      int exact = -1;
      for (int j = 0; j < k; ++j) {
        const double d = mv.values[i] - centroids[static_cast<std::size_t>(j)];
        dd[static_cast<std::size_t>(j)] = d * d;
        if (d * d == 0.0 && exact < 0) exact = j;
      }
      if (exact >= 0) {  // singular case: sits on a centroid
        for (int j = 0; j < k; ++j) out(i, j) = (j == exact) ? 1.0 : 0.0;
        continue;
      }
      // Ratio form keeps this stable when some distance is very small.
      for (int j = 0; j < k; ++j) {
        double denom = 0.0;
        for (int l = 0; l < k; ++l)
          denom += std::pow(dd[static_cast<std::size_t>(j)] /
                                dd[static_cast<std::size_t>(l)],
                            expo);
        out(i, j) = 1.0 / denom;
      }
    }
  };

  update_memberships(u);
  int iterations = 0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    iterations = it + 1;
    for (int j = 0; j < k; ++j) {
      double num = 0.0, den = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double w = std::pow(u(i, j), cfg.fcm_fuzziness);
        num += w * mv.values[i];
        den += w;
      }
      if (den > 0.0) centroids[static_cast<std::size_t>(j)] = num / den;
    }
    Eigen::MatrixXd next(n, k);
    update_memberships(next);
    const double delta = (next - u).cwiseAbs().maxCoeff();
    u.swap(next);
    if (delta < cfg.tol) break;
  }

  // Canonical order: ascending centroids, membership columns permuted along.
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return centroids[static_cast<std::size_t>(a)] <
           centroids[static_cast<std::size_t>(b)];
  });
  FcmResult res;
  res.iterations = iterations;
  res.centroids.resize(static_cast<std::size_t>(k));
  res.memberships.resize(n, k);
  for (int r = 0; r < k; ++r) {
    res.centroids[static_cast<std::size_t>(r)] =
        centroids[static_cast<std::size_t>(order[r])];
    res.memberships.col(r) = u.col(order[static_cast<std::size_t>(r)]);
  }
  res.labels = LabelVolume(volume.dims(), k, volume.spacing());
  res.labels.set_voxel_to_world(volume.voxel_to_world());
  for (std::size_t j = 0; j < mv.indices.size(); ++j) {
    Eigen::Index best;
    res.memberships.row(static_cast<Eigen::Index>(j)).maxCoeff(&best);
    res.labels.values()[mv.indices[j]] = static_cast<std::uint8_t>(best + 1);
  }
  return res;
}

IcmState icm_sweep(const Volume3& volume, const BinaryMask& mask,
                   const IcmState& state) {
  if (!volume.same_geometry(mask) || !volume.same_geometry(state.labels))
    throw GeometryMismatch("icm_sweep geometry mismatch");
  const int k = state.model.classes();
  IcmState out = state;
  const Vec3i d = volume.dims();
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x) {
        if (!mask(x, y, z)) continue;
        const double v = volume(x, y, z);
        int best = 1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int l = 1; l <= k; ++l) {
          int same = 0;
          auto nb = [&](int nx, int ny, int nz) {
            if (out.labels.contains(nx, ny, nz) &&
                out.labels(nx, ny, nz) == l)
              ++same;
          };
          nb(x - 1, y, z);
          nb(x + 1, y, z);
          nb(x, y - 1, z);
          nb(x, y + 1, z);
          nb(x, y, z - 1);
          nb(x, y, z + 1);
          const double score =
              state.beta * same +
              log_gauss(v, state.model.mean[l - 1], state.model.variance[l - 1]);
          if (score > best_score) {  // ties resolve to the lower class
            best_score = score;
            best = l;
          }
        }
        out.labels(x, y, z) = static_cast<std::uint8_t>(best);
      }
  out.iteration = state.iteration + 1;
  return out;
}

double icm_energy(const Volume3& volume, const BinaryMask& mask,
                  const LabelVolume& labels, const TissueModel& model,
                  double beta) {
  double energy = 0.0;
  const Vec3i d = volume.dims();
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x) {
        if (!mask(x, y, z)) continue;
        const int l = labels(x, y, z);
        energy += log_gauss(volume(x, y, z), model.mean[l - 1],
                            model.variance[l - 1]);
        // Each face-adjacent pair counted once via +x/+y/+z neighbors.
        auto pair = [&](int nx, int ny, int nz) {
          if (mask.contains(nx, ny, nz) && mask(nx, ny, nz) &&
              labels(nx, ny, nz) == l)
            energy += beta;
        };
        pair(x + 1, y, z);
        pair(x, y + 1, z);
        pair(x, y, z + 1);
      }
  return energy;
}

TissueModel estimate_model(const Volume3& volume, const BinaryMask& mask,
                           const LabelVolume& labels, int k,
                           double variance_floor_rel,
                           const TissueModel* previous,
                           std::vector<int>* frozen) {
  const MaskedValues mv = collect_masked(volume, mask);
  std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
  std::vector<double> sq(static_cast<std::size_t>(k), 0.0);
  std::vector<long> count(static_cast<std::size_t>(k), 0);
  for (std::size_t j = 0; j < mv.indices.size(); ++j) {
    const int l = labels.values()[mv.indices[j]];
    if (l < 1 || l > k)
      throw DataError("label outside 1..k on a masked voxel");
    const double v = mv.values[static_cast<Eigen::Index>(j)];
    sum[static_cast<std::size_t>(l - 1)] += v;
    sq[static_cast<std::size_t>(l - 1)] += v * v;
    ++count[static_cast<std::size_t>(l - 1)];
  }
  const double floor = variance_floor_rel *
                       (mv.range > 0 ? mv.range * mv.range : 1.0);
  TissueModel model;
  model.mean.resize(k);
  model.variance.resize(k);
  for (int l = 0; l < k; ++l) {
    if (count[static_cast<std::size_t>(l)] == 0) {
      if (!previous)
        throw DegenerateInput("class " + std::to_string(l + 1) +
                              " has no voxels");
      model.mean[l] = previous->mean[l];
      model.variance[l] = previous->variance[l];
      if (frozen) frozen->push_back(l + 1);
      continue;
    }
    const double n = static_cast<double>(count[static_cast<std::size_t>(l)]);
    const double mean = sum[static_cast<std::size_t>(l)] / n;
    model.mean[l] = mean;
    model.variance[l] =
        std::max(sq[static_cast<std::size_t>(l)] / n - mean * mean, floor);
  }
  return model;
}

HmrfResult hmrf_em(const Volume3& volume, const BinaryMask& mask,
                   const LabelVolume& init_labels, const SegConfig& cfg) {
  if (!volume.same_geometry(init_labels))
    throw GeometryMismatch("hmrf_em: init labels geometry differs");
  HmrfResult res;
  res.labels = init_labels;
  res.model = estimate_model(volume, mask, init_labels, cfg.k,
                             cfg.variance_floor_rel);

  for (int em = 1; em <= cfg.em_iters; ++em) {
    const LabelVolume before = res.labels;

    // E-step: sequential ICM sweeps; the posterior energy must not drop.
    IcmState state{res.labels, res.model, cfg.beta, 0};
    double energy =
        icm_energy(volume, mask, state.labels, res.model, cfg.beta);
    for (int s = 0; s < cfg.icm_iters; ++s) {
      state = icm_sweep(volume, mask, state);
      const double e =
          icm_energy(volume, mask, state.labels, res.model, cfg.beta);
      if (e < energy - 1e-9 * (1.0 + std::abs(energy)))
        throw NumericError("ICM energy decreased within a sweep");
      energy = e;
    }
    res.labels = state.labels;

    EmIteration it;
    it.em_iter = em;
    it.energy = energy;
    for (Eigen::Index i = 0; i < res.labels.size(); ++i)
      if (res.labels.values()[i] != before.values()[i]) ++it.changed_voxels;

    // M-step: Gaussian parameters from the current labeling; empty classes
    // keep their previous parameters.
    if (cfg.soft_m_step) {
      res.model = [&] {
        const MaskedValues mv = collect_masked(volume, mask);
        TissueModel m;
        m.mean.resize(cfg.k);
        m.variance.resize(cfg.k);
        std::vector<double> wsum(static_cast<std::size_t>(cfg.k), 0.0);
        std::vector<double> wx(static_cast<std::size_t>(cfg.k), 0.0);
        std::vector<double> wxx(static_cast<std::size_t>(cfg.k), 0.0);
        const Vec3i d = volume.dims();
        for (int z = 0; z < d.z(); ++z)
          for (int y = 0; y < d.y(); ++y)
            for (int x = 0; x < d.x(); ++x) {
              if (!mask(x, y, z)) continue;
              const double v = volume(x, y, z);
              ArrayXd score(cfg.k);
              for (int l = 1; l <= cfg.k; ++l) {
                int same = 0;
                auto nb = [&](int nx, int ny, int nz) {
                  if (res.labels.contains(nx, ny, nz) &&
                      res.labels(nx, ny, nz) == l)
                    ++same;
                };
                nb(x - 1, y, z);
                nb(x + 1, y, z);
                nb(x, y - 1, z);
                nb(x, y + 1, z);
                nb(x, y, z - 1);
                nb(x, y, z + 1);
                score[l - 1] = cfg.beta * same +
                               log_gauss(v, res.model.mean[l - 1],
                                         res.model.variance[l - 1]);
              }
              const ArrayXd p = (score - score.maxCoeff()).exp();
              const double ps = p.sum();
              for (int l = 0; l < cfg.k; ++l) {
                const double w = p[l] / ps;
                wsum[static_cast<std::size_t>(l)] += w;
                wx[static_cast<std::size_t>(l)] += w * v;
                wxx[static_cast<std::size_t>(l)] += w * v * v;
              }
            }
        const double floor = cfg.variance_floor_rel *
                             (mv.range > 0 ? mv.range * mv.range : 1.0);
        for (int l = 0; l < cfg.k; ++l) {
          if (wsum[static_cast<std::size_t>(l)] <= 1e-12) {
            m.mean[l] = res.model.mean[l];
            m.variance[l] = res.model.variance[l];
            it.frozen_classes.push_back(l + 1);
            continue;
          }
          const double mean =
              wx[static_cast<std::size_t>(l)] / wsum[static_cast<std::size_t>(l)];
          m.mean[l] = mean;
          m.variance[l] = std::max(
              wxx[static_cast<std::size_t>(l)] / wsum[static_cast<std::size_t>(l)] -
                  mean * mean,
              floor);
        }
        return m;
      }();
    } else {
      res.model = estimate_model(volume, mask, res.labels, cfg.k,
                                 cfg.variance_floor_rel, &res.model,
                                 &it.frozen_classes);
    }
    res.log.push_back(std::move(it));
  }
  return res;
}

namespace {

RefineResult refine_common(const Volume3& volume, const BinaryMask& mask,
                           const SegConfig& cfg, const MaskedValues& mv,
                           std::vector<double> best,
                           std::vector<double> history, double kmeans_sse) {
  RefineResult res;
  res.kmeans_sse = kmeans_sse;
  res.best_history = std::move(history);
  res.centroids = std::move(best);
  res.labels = labels_from_centroids(volume, mask, mv, res.centroids);
  res.sse = labeling_sse(mv.values, res.centroids);
  return res;
}

}  // namespace

RefineResult pso_refine(const Volume3& volume, const BinaryMask& mask,
                        const SegConfig& cfg) {
  const MaskedValues mv = collect_masked(volume, mask);
  const KmeansResult km = kmeansimpl(volume, mask, cfg, mv);
  Rng rng = SeedStream(cfg.seed).substream(kPsoStream);
  const int k = cfg.k;
  const int swarm = cfg.pso.swarm_size;
  const double sigma = 0.05 * (mv.range > 0 ? mv.range : 1.0);

  std::vector<std::vector<double>> pos(static_cast<std::size_t>(swarm));
  std::vector<std::vector<double>> vel(static_cast<std::size_t>(swarm));
  std::vector<std::vector<double>> pbest(static_cast<std::size_t>(swarm));
  std::vector<double> pbest_cost(static_cast<std::size_t>(swarm));
  std::vector<double> gbest = km.centroids;
  double gbest_cost = km.sse;

  for (int i = 0; i < swarm; ++i) {
    pos[static_cast<std::size_t>(i)] = km.centroids;
    if (i > 0)
      for (double& x : pos[static_cast<std::size_t>(i)])
        x = std::clamp(x + rng.normal(0.0, sigma), mv.min, mv.max);
    vel[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(k), 0.0);
    const double c = labeling_sse(mv.values, pos[static_cast<std::size_t>(i)]);
    pbest[static_cast<std::size_t>(i)] = pos[static_cast<std::size_t>(i)];
    pbest_cost[static_cast<std::size_t>(i)] = c;
    if (c < gbest_cost) {
      gbest_cost = c;
      gbest = pos[static_cast<std::size_t>(i)];
    }
  }

  std::vector<double> history = {gbest_cost};
  for (int t = 0; t < cfg.pso.iters; ++t) {
    for (int i = 0; i < swarm; ++i) {
      auto& x = pos[static_cast<std::size_t>(i)];
      auto& v = vel[static_cast<std::size_t>(i)];
      for (int d = 0; d < k; ++d) {
        const double r1 = rng.uniform01();
        const double r2 = rng.uniform01();
        v[static_cast<std::size_t>(d)] =
            cfg.pso.inertia * v[static_cast<std::size_t>(d)] +
            cfg.pso.cognitive * r1 *
                (pbest[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] -
                 x[static_cast<std::size_t>(d)]) +
            cfg.pso.social * r2 * (gbest[static_cast<std::size_t>(d)] -
                                   x[static_cast<std::size_t>(d)]);
        x[static_cast<std::size_t>(d)] = std::clamp(
            x[static_cast<std::size_t>(d)] + v[static_cast<std::size_t>(d)],
            mv.min, mv.max);
      }
      const double c = labeling_sse(mv.values, x);
      if (c < pbest_cost[static_cast<std::size_t>(i)]) {
        pbest_cost[static_cast<std::size_t>(i)] = c;
        pbest[static_cast<std::size_t>(i)] = x;
      }
      if (c < gbest_cost) {
        gbest_cost = c;
        gbest = x;
      }
    }
    history.push_back(gbest_cost);
  }
  return refine_common(volume, mask, cfg, mv, gbest, history, km.sse);
}

RefineResult ga_refine(const Volume3& volume, const BinaryMask& mask,
                       const SegConfig& cfg) {
  const MaskedValues mv = collect_masked(volume, mask);
  const KmeansResult km = kmeansimpl(volume, mask, cfg, mv);
  Rng rng = SeedStream(cfg.seed).substream(kGaStream);
  const int k = cfg.k;
  const int pop_size = std::max(cfg.ga.population, 2);
  const double sigma = 0.05 * (mv.range > 0 ? mv.range : 1.0);

  std::vector<std::vector<double>> pop(static_cast<std::size_t>(pop_size));
  std::vector<double> fitness(static_cast<std::size_t>(pop_size));
  pop[0] = km.centroids;
  for (int i = 1; i < pop_size; ++i) {
    pop[static_cast<std::size_t>(i)] = km.centroids;
    for (double& x : pop[static_cast<std::size_t>(i)])
      x = std::clamp(x + rng.normal(0.0, sigma), mv.min, mv.max);
  }
  for (int i = 0; i < pop_size; ++i)
    fitness[static_cast<std::size_t>(i)] =
        labeling_sse(mv.values, pop[static_cast<std::size_t>(i)]);

  auto best_index = [&] {
    return static_cast<int>(std::min_element(fitness.begin(), fitness.end()) -
                            fitness.begin());
  };
  auto tournament = [&] {
    const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(pop_size)));
    const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(pop_size)));
    return fitness[static_cast<std::size_t>(a)] <=
                   fitness[static_cast<std::size_t>(b)]
               ? a
               : b;
  };

  std::vector<double> history = {fitness[static_cast<std::size_t>(best_index())]};
  for (int g = 0; g < cfg.ga.generations; ++g) {
    std::vector<std::vector<double>> next;
    next.reserve(static_cast<std::size_t>(pop_size));
    next.push_back(pop[static_cast<std::size_t>(best_index())]);  // elitism
    while (static_cast<int>(next.size()) < pop_size) {
      const auto& pa = pop[static_cast<std::size_t>(tournament())];
      const auto& pb = pop[static_cast<std::size_t>(tournament())];
      std::vector<double> child(static_cast<std::size_t>(k));
      if (rng.bernoulli(cfg.ga.crossover_rate)) {
        for (int d = 0; d < k; ++d) {
          // BLX-0.5 blend around the parent interval.
          const double lo = std::min(pa[static_cast<std::size_t>(d)],
                                     pb[static_cast<std::size_t>(d)]);
          const double hi = std::max(pa[static_cast<std::size_t>(d)],
                                     pb[static_cast<std::size_t>(d)]);
          const double span = hi - lo;
          child[static_cast<std::size_t>(d)] =
              rng.uniform(lo - 0.5 * span, hi + 0.5 * span);
        }
      } else {
        child = pa;
      }
      for (int d = 0; d < k; ++d)
        if (rng.bernoulli(cfg.ga.mutation_rate))
          child[static_cast<std::size_t>(d)] += rng.normal(0.0, sigma);
      for (double& x : child) x = std::clamp(x, mv.min, mv.max);
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    for (int i = 0; i < pop_size; ++i)
      fitness[static_cast<std::size_t>(i)] =
          labeling_sse(mv.values, pop[static_cast<std::size_t>(i)]);
    history.push_back(fitness[static_cast<std::size_t>(best_index())]);
  }
  return refine_common(volume, mask, cfg, mv,
                       pop[static_cast<std::size_t>(best_index())], history,
                       km.sse);
}

EngineSpec parse_engine(const std::string& name) {
  EngineSpec spec;
  std::string base = name;
  const auto plus = name.find('+');
  if (plus != std::string::npos) {
    if (name.substr(plus + 1) != "hmrf")
      throw ConfigError("unknown engine suffix in '" + name + "'");
    spec.hmrf_refine = true;
    base = name.substr(0, plus);
  }
  if (base == "kmeans")
    spec.base = Engine::kmeans;
  else if (base == "otsu")
    spec.base = Engine::otsu;
  else if (base == "fcm")
    spec.base = Engine::fcm;
  else if (base == "pso")
    spec.base = Engine::pso;
  else if (base == "ga")
    spec.base = Engine::ga;
  else
    throw ConfigError("unknown engine '" + name + "'");
  return spec;
}

std::string engine_name(const EngineSpec& spec) {
  std::string base;
  switch (spec.base) {
    case Engine::kmeans: base = "kmeans"; break;
    case Engine::otsu: base = "otsu"; break;
    case Engine::fcm: base = "fcm"; break;
    case Engine::pso: base = "pso"; break;
    case Engine::ga: base = "ga"; break;
  }
  return spec.hmrf_refine ? base + "+hmrf" : base;
}

LabelVolume run_engine(const EngineSpec& spec, const Volume3& volume,
                       const BinaryMask& mask, const SegConfig& cfg) {
  LabelVolume labels;
  switch (spec.base) {
    case Engine::kmeans: labels = kmeans_segment(volume, mask, cfg).labels; break;
    case Engine::otsu: labels = otsu_multilevel(volume, mask, cfg.k).labels; break;
    case Engine::fcm: labels = fcm_segment(volume, mask, cfg).labels; break;
    case Engine::pso: labels = pso_refine(volume, mask, cfg).labels; break;
    case Engine::ga: labels = ga_refine(volume, mask, cfg).labels; break;
  }
  if (spec.hmrf_refine) labels = hmrf_em(volume, mask, labels, cfg).labels;
  return labels;
}

}  // namespace voxseg
