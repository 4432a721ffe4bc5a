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

// voxseg: 3D brain-MRI preprocessing and tissue-segmentation toolkit.
//
// Subcommands: phantom, preprocess, segment, evaluate, benchmark, split,
// augment. Exit codes: 0 success, 2 config error, 3 data error, 4 numerical
// failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxseg/augment.hpp"
#include "voxseg/hash.hpp"
#include "voxseg/metrics.hpp"
#include "voxseg/nifti.hpp"
#include "voxseg/phantom.hpp"
#include "voxseg/pipeline.hpp"
#include "voxseg/split.hpp"

namespace fs = std::filesystem;
using namespace voxseg;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string input;
  std::string mask;
  std::string tmpl;
  std::string template_centroids;
  std::string engine;
  std::string truth;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoFailure("cannot create: " + path);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoFailure("cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

PipelineConfig build_config(const CommonArgs& a) {
  PipelineConfig cfg;
  if (!a.config_path.empty())
    cfg = PipelineConfig::from_json_file(a.config_path);
  if (!a.input.empty()) cfg.input_path = a.input;
  if (!a.mask.empty()) cfg.mask_path = a.mask;
  if (!a.tmpl.empty()) cfg.template_path = a.tmpl;
  if (!a.truth.empty()) cfg.truth_path = a.truth;
  if (!a.out.empty()) cfg.out_dir = a.out;
  if (!a.engine.empty()) cfg.engine = a.engine;
  if (a.seed_set) {
    cfg.seed = a.seed;
    cfg.seg.seed = a.seed;
  }
  if (!a.template_centroids.empty()) {
    IntensityCentroids c;
    if (std::sscanf(a.template_centroids.c_str(), "%lf,%lf,%lf", &c.csf, &c.gm,
                    &c.wm) != 3)
      throw ConfigError("--template-centroids expects three numbers a,b,c");
    cfg.template_centroids = c;
  }
  return cfg;
}

void add_common(CLI::App* sub, CommonArgs& a, bool seed_required) {
  sub->add_option("--config", a.config_path, "pipeline config JSON file");
  sub->add_option("--input", a.input, "input volume (.nii)");
  sub->add_option("--mask", a.mask, "binary mask (.nii)");
  sub->add_option("--template", a.tmpl, "template volume (.nii)");
  sub->add_option("--template-centroids", a.template_centroids,
                  "template centroids a,b,c instead of a template volume");
  sub->add_option("--engine", a.engine,
                  "segmentation engine: {kmeans|otsu|fcm|pso|ga}[+hmrf]");
  sub->add_option("--truth", a.truth, "ground-truth labels (.nii)");
  sub->add_option("--out", a.out, "output directory");
  auto* seed = sub->add_option("--seed", a.seed, "RNG seed")
                   ->each([&a](const std::string&) { a.seed_set = true; });
  if (seed_required) seed->required();
}

int cmd_phantom(const CommonArgs& a, const std::string& dims_str,
                double noise_sigma, double bias, bool paper_scale,
                int cohort_n, double ad_fraction) {
  PhantomSpec spec;
  if (paper_scale) {
    spec = PhantomSpec::paper_scale();
  } else {
    Vec3i dims(64, 64, 64);
    if (!dims_str.empty()) {
      int x, y, z;
      if (std::sscanf(dims_str.c_str(), "%d,%d,%d", &x, &y, &z) != 3)
        throw ConfigError("--dims expects nx,ny,nz");
      dims = Vec3i(x, y, z);
    }
    spec = PhantomSpec::for_dims(dims);
  }
  spec.noise_sigma = noise_sigma;
  spec.bias_amplitude = bias;
  spec.seed = a.seed;

  if (a.out.empty()) throw ConfigError("phantom needs --out");
  fs::create_directories(a.out);
  const Phantom ph = generate_phantom(spec);
  write_nifti(ph.image, (fs::path(a.out) / "phantom.nii").string());
  write_nifti(ph.truth, (fs::path(a.out) / "truth.nii").string());
  write_nifti(ph.brain_mask, (fs::path(a.out) / "brain_mask.nii").string());
  write_nifti(ph.head_mask, (fs::path(a.out) / "head_mask.nii").string());

  if (cohort_n > 0) {
    const auto cohort = generate_cohort(cohort_n, ad_fraction, a.seed);
    write_file((fs::path(a.out) / "cohort.csv").string(),
               cohort_to_csv(cohort));
  }
  std::cout << "phantom written to " << a.out << "\n";
  return 0;
}

int cmd_preprocess(const CommonArgs& a) {
  PipelineConfig cfg = build_config(a);
  cfg.segment = false;
  const PipelineResult res = run_pipeline_files(cfg);
  for (const auto& w : res.provenance.warnings)
    std::cerr << "warning: " << w << "\n";
  std::cout << "preprocessed volume written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_segment(const CommonArgs& a, bool preprocess_first) {
  PipelineConfig cfg = build_config(a);
  if (!preprocess_first) {
    cfg.extract = false;
    cfg.normalize = false;
    cfg.register_to_template = false;
    cfg.crop_output = false;
  }
  cfg.segment = true;
  const PipelineResult res = run_pipeline_files(cfg);
  for (const auto& w : res.provenance.warnings)
    std::cerr << "warning: " << w << "\n";
  if (res.report)
    std::cout << "macro dice " << res.report->macro.dice << "\n";
  std::cout << "labels written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& a, const std::string& pred_path) {
  if (pred_path.empty()) throw ConfigError("evaluate needs --pred");
  if (a.truth.empty()) throw ConfigError("evaluate needs --truth");
  const LabelVolume pred = read_nifti_labels(pred_path);
  const LabelVolume truth = read_nifti_labels(a.truth);
  BinaryMask mask(pred.dims(), pred.spacing());
  mask.set_voxel_to_world(pred.voxel_to_world());
  if (!a.mask.empty()) {
    mask = read_nifti_labels(a.mask, 1);
  } else {
    // Default evaluation region: voxels labeled in both volumes.
    for (Eigen::Index i = 0; i < mask.size(); ++i)
      mask.values()[i] =
          (pred.values()[i] >= 1 && truth.values()[i] >= 1) ? 1 : 0;
  }
  OverlapReport rep = overlap_report(confusion(pred, truth, mask));
  rep.method = pred_path;
  const std::string text = report_to_json(rep);
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_file((fs::path(a.out) / "report.json").string(), text);
  }
  std::cout << text << "\n";
  return 0;
}

int cmd_benchmark(const CommonArgs& a, const std::string& engines_str,
                  int repetitions, const std::string& dims_str) {
  PipelineConfig cfg = build_config(a);
  if (cfg.out_dir.empty()) throw ConfigError("benchmark needs --out");
  std::vector<EngineSpec> engines;
  std::stringstream ss(engines_str);
  std::string name;
  while (std::getline(ss, name, ',')) engines.push_back(parse_engine(name));
  if (engines.empty()) throw ConfigError("benchmark needs --engines");

  Vec3i dims;
  const Vec3i* dims_ptr = nullptr;
  if (!dims_str.empty()) {
    int x, y, z;
    if (std::sscanf(dims_str.c_str(), "%d,%d,%d", &x, &y, &z) != 3)
      throw ConfigError("--dims expects nx,ny,nz");
    dims = Vec3i(x, y, z);
    dims_ptr = &dims;
  }
  const auto entries = run_benchmark(cfg, engines, repetitions, dims_ptr);
  for (const auto& e : entries) {
    if (e.failed)
      std::cout << e.method << ": failed (" << e.error << ")\n";
    else
      std::cout << e.method << ": dice " << e.report.macro.dice << ", "
                << e.report.wall_time_seconds << " s\n";
  }
  return 0;
}

int cmd_split(const CommonArgs& a, const std::string& cohort_path,
              const std::string& ratios_str, int age_bins, int downsample_to) {
  if (cohort_path.empty()) throw ConfigError("split needs --cohort");
  std::vector<SubjectRecord> records = cohort_from_csv(read_file(cohort_path));

  if (downsample_to > 0) {
    const auto keep =
        stratified_downsample(records, downsample_to, age_bins, a.seed);
    std::vector<SubjectRecord> trimmed;
    trimmed.reserve(keep.size());
    for (int i : keep) trimmed.push_back(records[static_cast<std::size_t>(i)]);
    records = std::move(trimmed);
  }

  std::array<double, 3> ratios{0.6, 0.2, 0.2};
  if (!ratios_str.empty()) {
    if (std::sscanf(ratios_str.c_str(), "%lf,%lf,%lf", &ratios[0], &ratios[1],
                    &ratios[2]) != 3)
      throw ConfigError("--ratios expects three numbers");
  }
  const SplitAssignment split =
      split_dataset(records, ratios, age_bins, a.seed);
  const std::string csv = split_to_csv(records, split);
  if (a.out.empty()) throw ConfigError("split needs --out");
  fs::create_directories(fs::path(a.out).parent_path().empty()
                             ? "."
                             : fs::path(a.out).parent_path().string());
  const std::string path = fs::is_directory(a.out)
                               ? (fs::path(a.out) / "split.csv").string()
                               : a.out;
  write_file(path, csv);
  const auto c = split.counts();
  std::cout << "split " << records.size() << " subjects into " << c[0] << "/"
            << c[1] << "/" << c[2] << " -> " << path << "\n";
  return 0;
}

int cmd_augment(const CommonArgs& a, bool labels_mode, int index) {
  if (a.input.empty()) throw ConfigError("augment needs --input");
  if (a.out.empty()) throw ConfigError("augment needs --out");
  fs::create_directories(a.out);
  SeedStream stream(a.seed);
  Rng rng = stream.substream(static_cast<std::uint64_t>(index));
  const AugmentationParams params = sample_augmentation(rng);
  write_file((fs::path(a.out) / "augmentation.json").string(),
             augmentation_to_json(params));
  if (labels_mode) {
    const LabelVolume in = read_nifti_labels(a.input);
    write_nifti(apply_augmentation(in, params),
                (fs::path(a.out) / "augmented.nii").string());
  } else {
    const Volume3 in = read_nifti(a.input);
    write_nifti(apply_augmentation(in, params),
                (fs::path(a.out) / "augmented.nii").string());
  }
  std::cout << "augmented volume written to " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3D brain-MRI preprocessing and tissue segmentation"};
  app.require_subcommand(1);

  CommonArgs args;

  // phantom
  auto* phantom = app.add_subcommand("phantom", "generate a synthetic head");
  std::string dims_str;
  double noise_sigma = 0, bias = 0, ad_fraction = 0.5;
  bool paper_scale = false;
  int cohort_n = 0;
  add_common(phantom, args, /*seed_required=*/true);
  phantom->add_option("--dims", dims_str, "dims nx,ny,nz (default 64,64,64)");
  phantom->add_option("--noise-sigma", noise_sigma, "Gaussian noise sigma");
  phantom->add_option("--bias", bias, "bias field amplitude [0,0.5)");
  phantom->add_flag("--paper-scale", paper_scale, "use 160x160x192 dims");
  phantom->add_option("--cohort", cohort_n, "also emit a cohort.csv of n subjects");
  phantom->add_option("--ad-fraction", ad_fraction, "AD fraction of cohort");

  // preprocess
  auto* preprocess =
      app.add_subcommand("preprocess", "extract, normalize, register, crop");
  add_common(preprocess, args, /*seed_required=*/false);

  // segment
  auto* segment = app.add_subcommand("segment", "tissue segmentation");
  bool preprocess_first = false;
  add_common(segment, args, /*seed_required=*/true);
  segment->add_flag("--full-pipeline", preprocess_first,
                    "run preprocessing stages before segmenting");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "overlap metrics");
  std::string pred_path;
  add_common(evaluate, args, /*seed_required=*/false);
  evaluate->add_option("--pred", pred_path, "predicted labels (.nii)");

  // benchmark
  auto* benchmark = app.add_subcommand("benchmark", "engine timing/accuracy");
  std::string engines_str = "otsu,kmeans,pso,ga";
  std::string bench_dims;
  int repetitions = 1;
  add_common(benchmark, args, /*seed_required=*/true);
  benchmark->add_option("--engines", engines_str, "comma-separated engines");
  benchmark->add_option("--repetitions", repetitions, "timing repetitions");
  benchmark->add_option("--dims", bench_dims,
                        "phantom dims (default paper scale 160,160,192)");

  // split
  auto* split = app.add_subcommand("split", "stratified dataset split");
  std::string cohort_path, ratios_str;
  int age_bins = 5, downsample_to = 0;
  add_common(split, args, /*seed_required=*/true);
  split->add_option("--cohort", cohort_path, "cohort.csv");
  split->add_option("--ratios", ratios_str, "train,val,test (default .6,.2,.2)");
  split->add_option("--age-bins", age_bins, "age bin count (default 5)");
  split->add_option("--downsample-to", downsample_to,
                    "stratified downsample before splitting");

  // augment
  auto* augment = app.add_subcommand("augment", "random 3D augmentation");
  bool labels_mode = false;
  int aug_index = 0;
  add_common(augment, args, /*seed_required=*/true);
  augment->add_flag("--labels", labels_mode, "input is a label volume");
  augment->add_option("--index", aug_index, "substream index (per subject)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*phantom)
      return cmd_phantom(args, dims_str, noise_sigma, bias, paper_scale,
                         cohort_n, ad_fraction);
    if (*preprocess) return cmd_preprocess(args);
    if (*segment) return cmd_segment(args, preprocess_first);
    if (*evaluate) return cmd_evaluate(args, pred_path);
    if (*benchmark)
      return cmd_benchmark(args, engines_str, repetitions, bench_dims);
    if (*split)
      return cmd_split(args, cohort_path, ratios_str, age_bins, downsample_to);
    if (*augment) return cmd_augment(args, labels_mode, aug_index);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
