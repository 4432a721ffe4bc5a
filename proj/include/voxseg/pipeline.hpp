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

#ifndef VOXSEG_PIPELINE_HPP
#define VOXSEG_PIPELINE_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "voxseg/grid3.hpp"
#include "voxseg/metrics.hpp"
#include "voxseg/normalize.hpp"
#include "voxseg/register.hpp"
#include "voxseg/segment.hpp"

namespace voxseg {

/// End-to-end pipeline settings: extraction -> normalization ->
/// registration -> crop -> segmentation, in that fixed order. Defaults
/// follow the standard profile (0.6/0.2/0.2 split, 5 age bins, closing
/// radius 3 voxels, 160x160x192 crop box).
struct PipelineConfig {
  // Paths; empty means not provided.
  std::string input_path;
  std::string mask_path;
  std::string template_path;
  std::string truth_path;
  std::string out_dir;
  std::optional<IntensityCentroids> template_centroids;

  // Stage toggles.
  bool extract = true;
  bool normalize = true;
  bool register_to_template = true;
  bool crop_output = false;
  bool segment = true;

  std::string engine = "kmeans+hmrf";
  double se_radius = 3.0;
  Vec3i crop_dims{160, 160, 192};
  std::optional<Vec3i> crop_offset;  // default: centered

  SegConfig seg;
  RegistrationConfig reg;

  std::array<double, 3> split_ratios{0.6, 0.2, 0.2};
  int age_bin_count = 5;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
  static PipelineConfig from_json_text(const std::string& text);
  static PipelineConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

struct StageTiming {
  std::string name;
  double seconds = 0;
};

struct OutputFile {
  std::string path;
  std::string fnv1a64;
};

/// What ran, in order, how long each stage took, and a content hash for
/// every file the run produced. Identical config+seed reproduces identical
/// hashes for all non-timing outputs.
struct ProvenanceRecord {
  std::string tool = "voxseg";
  std::uint64_t seed = 0;
  std::string config_json;
  std::vector<std::string> stage_order;
  std::vector<StageTiming> timings;
  std::vector<OutputFile> outputs;
  std::vector<std::string> warnings;
};

std::string provenance_to_json(const ProvenanceRecord& record);

struct PipelineResult {
  Volume3 preprocessed;
  BinaryMask mask;  // the mask actually used for segmentation
  LabelVolume labels;
  std::optional<OverlapReport> report;
  ProvenanceRecord provenance;
};

/// Runs the configured stages on an in-memory subject. Intermediates are
/// written as NIfTI under cfg.out_dir when it is non-empty; the provenance
/// record always reflects what ran. The report is produced iff truth is
/// given.
PipelineResult run_pipeline(const PipelineConfig& cfg, const Volume3& image,
                            const BinaryMask& mask,
                            const LabelVolume* truth = nullptr,
                            const Volume3* template_volume = nullptr);

/// File-driven variant used by the CLI: loads everything from cfg paths.
PipelineResult run_pipeline_files(const PipelineConfig& cfg);

/// Benchmarks the given engines on the paper-scale noisy phantom profile
/// and writes benchmark.json / benchmark.csv under cfg.out_dir.
std::vector<BenchmarkEntry> run_benchmark(const PipelineConfig& cfg,
                                          const std::vector<EngineSpec>& engines,
                                          int repetitions = 1,
                                          const Vec3i* dims_override = nullptr);

}  // namespace voxseg

#endif  // VOXSEG_PIPELINE_HPP
