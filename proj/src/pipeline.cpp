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

#include "voxseg/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "voxseg/affine.hpp"
#include "voxseg/hash.hpp"
#include "voxseg/morphology.hpp"
#include "voxseg/nifti.hpp"
#include "voxseg/phantom.hpp"

namespace voxseg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoFailure("cannot create: " + path);
  out << text;
}

json seg_to_json(const SegConfig& s) {
  return json{{"k", s.k},
              {"max_iter", s.max_iter},
              {"tol", s.tol},
              {"beta", s.beta},
              {"icm_iters", s.icm_iters},
              {"em_iters", s.em_iters},
              {"soft_m_step", s.soft_m_step},
              {"fcm_fuzziness", s.fcm_fuzziness},
              {"pso",
               {{"swarm_size", s.pso.swarm_size},
                {"inertia", s.pso.inertia},
                {"cognitive", s.pso.cognitive},
                {"social", s.pso.social},
                {"iters", s.pso.iters}}},
              {"ga",
               {{"population", s.ga.population},
                {"crossover_rate", s.ga.crossover_rate},
                {"mutation_rate", s.ga.mutation_rate},
                {"generations", s.ga.generations}}},
              {"seed", s.seed}};
}

void seg_from_json(const json& j, SegConfig& s) {
  s.k = j.value("k", s.k);
  s.max_iter = j.value("max_iter", s.max_iter);
  s.tol = j.value("tol", s.tol);
  s.beta = j.value("beta", s.beta);
  s.icm_iters = j.value("icm_iters", s.icm_iters);
  s.em_iters = j.value("em_iters", s.em_iters);
  s.soft_m_step = j.value("soft_m_step", s.soft_m_step);
  s.fcm_fuzziness = j.value("fcm_fuzziness", s.fcm_fuzziness);
  if (j.contains("init_centroids"))
    s.init_centroids = j.at("init_centroids").get<std::vector<double>>();
  if (j.contains("pso")) {
    const auto& p = j.at("pso");
    s.pso.swarm_size = p.value("swarm_size", s.pso.swarm_size);
    s.pso.inertia = p.value("inertia", s.pso.inertia);
    s.pso.cognitive = p.value("cognitive", s.pso.cognitive);
    s.pso.social = p.value("social", s.pso.social);
    s.pso.iters = p.value("iters", s.pso.iters);
  }
  if (j.contains("ga")) {
    const auto& g = j.at("ga");
    s.ga.population = g.value("population", s.ga.population);
    s.ga.crossover_rate = g.value("crossover_rate", s.ga.crossover_rate);
    s.ga.mutation_rate = g.value("mutation_rate", s.ga.mutation_rate);
    s.ga.generations = g.value("generations", s.ga.generations);
  }
  s.seed = j.value("seed", s.seed);
}

json reg_to_json(const RegistrationConfig& r) {
  return json{{"cost", r.cost == RegistrationCost::ncc ? "ncc" : "ssd"},
              {"pyramid_levels", r.pyramid_levels},
              {"max_iterations", r.max_iterations},
              {"translation_step", r.translation_step},
              {"rotation_step", r.rotation_step},
              {"scale_step", r.scale_step},
              {"shear_step", r.shear_step},
              {"step_shrink", r.step_shrink},
              {"max_step_halvings", r.max_step_halvings},
              {"cost_tolerance", r.cost_tolerance}};
}

void reg_from_json(const json& j, RegistrationConfig& r) {
  if (j.contains("cost")) {
    const std::string c = j.at("cost").get<std::string>();
    if (c == "ncc")
      r.cost = RegistrationCost::ncc;
    else if (c == "ssd")
      r.cost = RegistrationCost::ssd;
    else
      throw ConfigError("unknown registration cost '" + c + "'");
  }
  r.pyramid_levels = j.value("pyramid_levels", r.pyramid_levels);
  r.max_iterations = j.value("max_iterations", r.max_iterations);
  r.translation_step = j.value("translation_step", r.translation_step);
  r.rotation_step = j.value("rotation_step", r.rotation_step);
  r.scale_step = j.value("scale_step", r.scale_step);
  r.shear_step = j.value("shear_step", r.shear_step);
  r.step_shrink = j.value("step_shrink", r.step_shrink);
  r.max_step_halvings = j.value("max_step_halvings", r.max_step_halvings);
  r.cost_tolerance = j.value("cost_tolerance", r.cost_tolerance);
}

}  // namespace

void PipelineConfig::validate() const {
  const double sum = split_ratios[0] + split_ratios[1] + split_ratios[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("split ratios must sum to 1");
  if (age_bin_count < 1) throw ConfigError("age_bin_count must be >= 1");
  if (se_radius <= 0) throw ConfigError("se_radius must be > 0");
  if ((crop_dims.array() < 1).any())
    throw ConfigError("crop dims must be >= 1");
  parse_engine(engine);  // throws on unknown engine
  if (template_centroids && !template_centroids->valid())
    throw ConfigError("template centroids must be ascending and >= 0");
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  PipelineConfig c;
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    c.input_path = p.value("input", "");
    c.mask_path = p.value("mask", "");
    c.template_path = p.value("template", "");
    c.truth_path = p.value("truth", "");
    c.out_dir = p.value("out_dir", "");
  }
  if (j.contains("template_centroids")) {
    const auto& t = j.at("template_centroids");
    c.template_centroids = IntensityCentroids{
        t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
  }
  if (j.contains("stages")) {
    const auto& s = j.at("stages");
    c.extract = s.value("extract", c.extract);
    c.normalize = s.value("normalize", c.normalize);
    c.register_to_template = s.value("register", c.register_to_template);
    c.crop_output = s.value("crop", c.crop_output);
    c.segment = s.value("segment", c.segment);
  }
  c.engine = j.value("engine", c.engine);
  c.se_radius = j.value("se_radius", c.se_radius);
  if (j.contains("crop_dims")) {
    const auto& d = j.at("crop_dims");
    c.crop_dims = Vec3i(d.at(0).get<int>(), d.at(1).get<int>(),
                        d.at(2).get<int>());
  }
  if (j.contains("crop_offset")) {
    const auto& d = j.at("crop_offset");
    c.crop_offset = Vec3i(d.at(0).get<int>(), d.at(1).get<int>(),
                          d.at(2).get<int>());
  }
  if (j.contains("seg")) seg_from_json(j.at("seg"), c.seg);
  if (j.contains("registration")) reg_from_json(j.at("registration"), c.reg);
  if (j.contains("split_ratios")) {
    const auto& r = j.at("split_ratios");
    c.split_ratios = {r.at(0).get<double>(), r.at(1).get<double>(),
                      r.at(2).get<double>()};
  }
  c.age_bin_count = j.value("age_bin_count", c.age_bin_count);
  c.seed = j.value("seed", c.seed);
  return c;
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string PipelineConfig::to_json_text() const {
  json j;
  j["paths"] = {{"input", input_path},
                {"mask", mask_path},
                {"template", template_path},
                {"truth", truth_path},
                {"out_dir", out_dir}};
  if (template_centroids)
    j["template_centroids"] = {template_centroids->csf, template_centroids->gm,
                               template_centroids->wm};
  j["stages"] = {{"extract", extract},
                 {"normalize", normalize},
                 {"register", register_to_template},
                 {"crop", crop_output},
                 {"segment", segment}};
  j["engine"] = engine;
  j["se_radius"] = se_radius;
  j["crop_dims"] = {crop_dims.x(), crop_dims.y(), crop_dims.z()};
  if (crop_offset)
    j["crop_offset"] = {crop_offset->x(), crop_offset->y(), crop_offset->z()};
  j["seg"] = seg_to_json(seg);
  j["registration"] = reg_to_json(reg);
  j["split_ratios"] = {split_ratios[0], split_ratios[1], split_ratios[2]};
  j["age_bin_count"] = age_bin_count;
  j["seed"] = seed;
  return j.dump(2);
}

std::string provenance_to_json(const ProvenanceRecord& record) {
  json j;
  j["tool"] = record.tool;
  j["seed"] = record.seed;
  j["config"] = json::parse(record.config_json);
  j["stage_order"] = record.stage_order;
  json timings = json::array();
  for (const auto& t : record.timings)
    timings.push_back({{"name", t.name}, {"seconds", t.seconds}});
  j["timings"] = timings;
  json outputs = json::array();
  for (const auto& o : record.outputs)
    outputs.push_back({{"path", o.path}, {"fnv1a64", o.fnv1a64}});
  j["outputs"] = outputs;
  j["warnings"] = record.warnings;
  return j.dump(2);
}

namespace {

class OutputWriter {
 public:
  OutputWriter(const std::string& out_dir, ProvenanceRecord& record)
      : dir_(out_dir), record_(record) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  bool enabled() const { return !dir_.empty(); }

  template <typename V>
  void volume(const std::string& name, const V& v) {
    if (!enabled()) return;
    const std::string path = (fs::path(dir_) / name).string();
    write_nifti(v, path);
    record_.outputs.push_back({path, hash_file(path)});
  }

  void text(const std::string& name, const std::string& content) {
    if (!enabled()) return;
    const std::string path = (fs::path(dir_) / name).string();
    write_text(path, content);
    record_.outputs.push_back({path, hash_file(path)});
  }

 private:
  std::string dir_;
  ProvenanceRecord& record_;
};

BinaryMask mask_and_truth(const BinaryMask& mask, const LabelVolume& truth) {
  BinaryMask out = mask;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (truth.values()[i] < 1) out.values()[i] = 0;
  return out;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, const Volume3& image,
                            const BinaryMask& mask, const LabelVolume* truth,
                            const Volume3* template_volume) {
  cfg.validate();
  if (!image.same_geometry(mask))
    throw GeometryMismatch("pipeline: image and mask geometry differ");
  if (truth && !image.same_geometry(*truth))
    throw GeometryMismatch("pipeline: image and truth geometry differ");
  if (cfg.normalize && !cfg.template_centroids && !template_volume)
    throw ConfigError("normalization needs a template or centroids");

  PipelineResult res;
  res.provenance.seed = cfg.seed;
  res.provenance.config_json = cfg.to_json_text();
  OutputWriter out(cfg.out_dir, res.provenance);

  Volume3 work = image;
  BinaryMask seg_mask = mask;
  LabelVolume truth_work;
  if (truth) truth_work = *truth;

  auto stage = [&](const std::string& name, auto&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    res.provenance.stage_order.push_back(name);
    res.provenance.timings.push_back({name, seconds_since(t0)});
  };

  if (cfg.extract) {
    stage("extract", [&] {
      const StructuringElement se = StructuringElement::ball(cfg.se_radius);
      seg_mask = close_mask(seg_mask, se);
      work = apply_mask(work, seg_mask);
      out.volume("stripped.nii", work);
      out.volume("brain_mask_closed.nii", seg_mask);
    });
  }

  if (cfg.normalize) {
    stage("normalize", [&] {
      const IntensityCentroids img_c = compute_centroids(work, seg_mask);
      IntensityCentroids tpl_c;
      if (cfg.template_centroids) {
        tpl_c = *cfg.template_centroids;
      } else {
        // Template centroids over its nonzero voxels.
        BinaryMask tmask(template_volume->dims(), template_volume->spacing());
        tmask.set_voxel_to_world(template_volume->voxel_to_world());
        for (Eigen::Index i = 0; i < tmask.size(); ++i)
          tmask.values()[i] = template_volume->values()[i] > 0 ? 1 : 0;
        tpl_c = compute_centroids(*template_volume, tmask);
      }
      const double gain = fit_gain(img_c, tpl_c);
      work = apply_gain(work, gain);
      json j = {{"image_centroids", {img_c.csf, img_c.gm, img_c.wm}},
                {"template_centroids", {tpl_c.csf, tpl_c.gm, tpl_c.wm}},
                {"gain", gain}};
      out.text("normalization.json", j.dump(2));
      out.volume("normalized.nii", work);
    });
  }

  if (cfg.register_to_template) {
    if (!template_volume) {
      res.provenance.warnings.push_back(
          "registration skipped: no template volume");
    } else {
      stage("register", [&] {
        const RegistrationResult rr =
            register_affine(work, *template_volume, cfg.reg);
        work = resample(work, rr.transform, Interp::trilinear,
                        template_volume->dims());
        seg_mask = resample_mask(seg_mask, rr.transform,
                                 template_volume->dims());
        if (truth)
          truth_work = resample_labels(truth_work, rr.transform,
                                       template_volume->dims());
        out.text("affine.json", affine_to_json(rr.params));
        out.volume("registered.nii", work);
      });
    }
  }

  if (cfg.crop_output) {
    stage("crop", [&] {
      const Vec3i off = cfg.crop_offset
                            ? *cfg.crop_offset
                            : centered_crop_offset(work.dims(), cfg.crop_dims);
      work = crop(work, cfg.crop_dims, off);
      seg_mask = crop(seg_mask, cfg.crop_dims, off);
      if (truth) truth_work = crop(truth_work, cfg.crop_dims, off);
      out.volume("cropped.nii", work);
    });
  }

  res.preprocessed = work;
  res.mask = seg_mask;
  out.volume("preprocessed.nii", work);

  if (cfg.segment) {
    const EngineSpec spec = parse_engine(cfg.engine);
    stage("segment", [&] {
      if (spec.hmrf_refine) {
        EngineSpec base = spec;
        base.hmrf_refine = false;
        const LabelVolume init = run_engine(base, work, seg_mask, cfg.seg);
        const HmrfResult hm = hmrf_em(work, seg_mask, init, cfg.seg);
        res.labels = hm.labels;
        std::string lines;
        for (const auto& it : hm.log) {
          json j = {{"em_iter", it.em_iter},
                    {"changed_voxels", it.changed_voxels},
                    {"energy", it.energy},
                    {"frozen_classes", it.frozen_classes}};
          lines += j.dump() + "\n";
        }
        out.text("hmrf_log.jsonl", lines);
      } else {
        res.labels = run_engine(spec, work, seg_mask, cfg.seg);
      }
      // Tissue-labeled output carries at most the 3 tissue bins plus
      // background.
      if (distinct_value_count(res.labels) > res.labels.class_count + 1)
        throw NumericError("label volume has more bins than classes");
      out.volume("labels.nii", res.labels);
    });

    if (truth) {
      stage("evaluate", [&] {
        const BinaryMask eval_mask = mask_and_truth(seg_mask, truth_work);
        OverlapReport rep =
            overlap_report(confusion(res.labels, truth_work, eval_mask));
        rep.method = cfg.engine;
        for (const auto& t : res.provenance.timings)
          if (t.name == "segment") rep.wall_time_seconds = t.seconds;
        res.report = rep;
        out.text("report.json", report_to_json(rep));
      });
    }
  }

  out.text("provenance.json", provenance_to_json(res.provenance));
  return res;
}

PipelineResult run_pipeline_files(const PipelineConfig& cfg) {
  cfg.validate();
  if (cfg.input_path.empty()) throw ConfigError("no input volume given");
  if (cfg.mask_path.empty()) throw ConfigError("no mask volume given");
  if (cfg.normalize && cfg.template_path.empty() && !cfg.template_centroids)
    throw ConfigError(
        "normalization needs a template volume or template centroids");
  const Volume3 image = read_nifti(cfg.input_path);
  const BinaryMask mask = read_nifti_labels(cfg.mask_path, 1);

  std::optional<Volume3> tmpl;
  if (!cfg.template_path.empty()) tmpl = read_nifti(cfg.template_path);
  std::optional<LabelVolume> truth;
  if (!cfg.truth_path.empty())
    truth = read_nifti_labels(cfg.truth_path, cfg.seg.k);

  return run_pipeline(cfg, image, mask, truth ? &*truth : nullptr,
                      tmpl ? &*tmpl : nullptr);
}

std::vector<BenchmarkEntry> run_benchmark(const PipelineConfig& cfg,
                                          const std::vector<EngineSpec>& engines,
                                          int repetitions,
                                          const Vec3i* dims_override) {
  PhantomSpec spec = dims_override ? PhantomSpec::for_dims(*dims_override)
                                   : PhantomSpec::paper_scale();
  // Noise at 15% of the tissue intensity span, the standard noisy profile.
  spec.noise_sigma = 0.15 * (spec.wm_mean - spec.csf_mean);
  spec.seed = cfg.seed;
  const Phantom ph = generate_phantom(spec);

  const auto entries = benchmark_engines(ph.image, ph.brain_mask, ph.truth,
                                         engines, cfg.seg, repetitions);

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    std::vector<OverlapReport> reports;
    json j = json::array();
    for (const auto& e : entries) {
      if (e.failed) {
        j.push_back({{"method", e.method}, {"error", e.error}});
        continue;
      }
      reports.push_back(e.report);
      j.push_back(json::parse(report_to_json(e.report)));
    }
    write_text((fs::path(cfg.out_dir) / "benchmark.json").string(), j.dump(2));
    write_text((fs::path(cfg.out_dir) / "benchmark.csv").string(),
               reports_to_csv(reports));
  }
  return entries;
}

}  // namespace voxseg
