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

#include "voxseg/phantom.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "voxseg/rng.hpp"

namespace voxseg {

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f697365;
constexpr std::uint64_t kBiasStream = 0x62696173;
constexpr std::uint64_t kCohortStream = 0x636f686f;

// Per-axis shell fractions of the half-extent; distinct per axis so the
// phantom has no rotational symmetry.
const Vec3d kSkullFrac(0.86, 0.94, 0.78);
const Vec3d kCsfFrac(0.76, 0.84, 0.68);
const Vec3d kGmFrac(0.64, 0.72, 0.56);
const Vec3d kWmFrac(0.44, 0.52, 0.36);

bool inside(const Vec3d& p, const Vec3d& c, const Vec3d& axes) {
  const Vec3d q = (p - c).array() / axes.array();
  return q.squaredNorm() <= 1.0;
}

}  // namespace

PhantomSpec PhantomSpec::for_dims(const Vec3i& dims) {
  PhantomSpec spec;
  spec.dims = dims;
  const Vec3d half = (dims.cast<double>() - Vec3d::Ones()) / 2.0;
  spec.skull_axes = kSkullFrac.cwiseProduct(half);
  spec.csf_axes = kCsfFrac.cwiseProduct(half);
  spec.gm_axes = kGmFrac.cwiseProduct(half);
  spec.wm_axes = kWmFrac.cwiseProduct(half);
  return spec;
}

PhantomSpec PhantomSpec::paper_scale() {
  return for_dims(Vec3i(160, 160, 192));
}

void PhantomSpec::validate() const {
  if ((dims.array() < 8).any())
    throw SpecInvalid("phantom dims must be >= 8 per axis");
  auto nested = [](const Vec3d& outer, const Vec3d& inner) {
    return (outer.array() > inner.array()).all();
  };
  if (!(nested(skull_axes, csf_axes) && nested(csf_axes, gm_axes) &&
        nested(gm_axes, wm_axes)))
    throw SpecInvalid("phantom shells must be strictly nested");
  if ((wm_axes.array() <= 0).any())
    throw SpecInvalid("phantom semi-axes must be positive");
  if ((ventricle_axes.array() > 0).any()) {
    if ((ventricle_axes.array() <= 0).any())
      throw SpecInvalid("ventricle semi-axes must all be positive");
    if (((ventricle_offset.cwiseAbs() + ventricle_axes).array() >=
         wm_axes.array())
            .any())
      throw SpecInvalid("ventricle must sit strictly inside the WM core");
  }
  if (noise_sigma < 0) throw SpecInvalid("noise_sigma must be >= 0");
  if (bias_amplitude < 0 || bias_amplitude >= 0.5)
    throw SpecInvalid("bias_amplitude must be in [0, 0.5)");
  const double means[5] = {background_mean, csf_mean, gm_mean, wm_mean,
                           skull_mean};
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      if (means[i] == means[j])
        throw SpecInvalid("phantom tissue means must be distinct");
}

Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  Phantom ph;
  ph.image = Volume3(spec.dims);
  ph.truth = LabelVolume(spec.dims, 3);
  ph.brain_mask = BinaryMask(spec.dims);
  ph.head_mask = BinaryMask(spec.dims);

  const Vec3d c = ph.image.center();
  const BiasField bias =
      make_bias_field(spec.dims, spec.bias_amplitude,
                      SeedStream(spec.seed).substream_seed(kBiasStream));
  Rng noise = SeedStream(spec.seed).substream(kNoiseStream);

  const Vec3i d = spec.dims;
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x) {
        const Vec3d p(x, y, z);
        double mean = spec.background_mean;
        std::uint8_t label = 0;
        bool head = false, brain = false;
        const bool has_ventricle = (spec.ventricle_axes.array() > 0).all();
        if (has_ventricle &&
            inside(p, c + spec.ventricle_offset, spec.ventricle_axes)) {
          mean = spec.csf_mean;  // interior CSF
          label = 1;
          brain = head = true;
        } else if (inside(p, c, spec.wm_axes)) {
          mean = spec.wm_mean;
          label = 3;
          brain = head = true;
        } else if (inside(p, c, spec.gm_axes)) {
          mean = spec.gm_mean;
          label = 2;
          brain = head = true;
        } else if (inside(p, c, spec.csf_axes)) {
          mean = spec.csf_mean;
          label = 1;
          brain = head = true;
        } else if (inside(p, c, spec.skull_axes)) {
          mean = spec.skull_mean;
          head = true;
        }
        double v = mean;
        if (spec.bias_amplitude > 0) v *= bias.value(p);
        if (spec.noise_sigma > 0) v += noise.normal(0.0, spec.noise_sigma);
        ph.image(x, y, z) = v;
        ph.truth(x, y, z) = label;
        ph.brain_mask(x, y, z) = brain ? 1 : 0;
        ph.head_mask(x, y, z) = head ? 1 : 0;
      }
  return ph;
}

double BiasField::raw(const Vec3d& p) const {
  const double x = p.x(), y = p.y(), z = p.z();
  const double terms[10] = {1.0, x,     y,     z,     x * x,
                            y * y, z * z, x * y, x * z, y * z};
  double s = 0;
  for (int i = 0; i < 10; ++i) s += coeffs[i] * terms[i];
  return s;
}

double BiasField::value(const Vec3d& p) const {
  if (amplitude == 0.0) return 1.0;
  const double t = (raw(p) - raw_min) / (raw_max - raw_min);
  return 1.0 - amplitude + 2.0 * amplitude * t;
}

BiasField make_bias_field(const Vec3i& dims, double amplitude,
                          std::uint64_t seed) {
  if (amplitude < 0 || amplitude >= 0.5)
    throw SpecInvalid("bias amplitude must be in [0, 0.5)");
  BiasField f;
  f.amplitude = amplitude;
  Rng rng(seed);
  // Coordinates are scaled by the extent inside the coefficients so the
  // quadratic varies by O(1) across the grid.
  const Vec3d ext = dims.cast<double>();
  f.coeffs[0] = rng.uniform(-1.0, 1.0);
  for (int a = 0; a < 3; ++a) f.coeffs[1 + a] = rng.uniform(-1.0, 1.0) / ext[a];
  for (int a = 0; a < 3; ++a)
    f.coeffs[4 + a] = rng.uniform(-1.0, 1.0) / (ext[a] * ext[a]);
  f.coeffs[7] = rng.uniform(-1.0, 1.0) / (ext.x() * ext.y());
  f.coeffs[8] = rng.uniform(-1.0, 1.0) / (ext.x() * ext.z());
  f.coeffs[9] = rng.uniform(-1.0, 1.0) / (ext.y() * ext.z());

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int z = 0; z < dims.z(); ++z)
    for (int y = 0; y < dims.y(); ++y)
      for (int x = 0; x < dims.x(); ++x) {
        const double r = f.raw(Vec3d(x, y, z));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
  if (hi <= lo) hi = lo + 1.0;  // constant draw; field collapses to 1
  f.raw_min = lo;
  f.raw_max = hi;
  return f;
}

Volume3 apply_bias_field(const Volume3& volume, double amplitude,
                         std::uint64_t seed) {
  if (amplitude == 0.0) return volume;
  const BiasField f = make_bias_field(volume.dims(), amplitude, seed);
  Volume3 out = volume;
  const Vec3i d = volume.dims();
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x)
        out(x, y, z) = volume(x, y, z) * f.value(Vec3d(x, y, z));
  return out;
}

std::vector<SubjectRecord> generate_cohort(int n, double ad_fraction,
                                           std::uint64_t seed) {
  if (n < 1) throw ConfigError("cohort size must be >= 1");
  if (ad_fraction < 0 || ad_fraction > 1)
    throw ConfigError("ad_fraction must be in [0, 1]");
  constexpr int kBins = 5;
  constexpr double kAgeLo = 55.0, kAgeHi = 95.0;
  const double width = (kAgeHi - kAgeLo) / kBins;
  const long ad_quota = std::lround(ad_fraction * n);

  Rng rng = SeedStream(seed).substream(kCohortStream);
  std::vector<SubjectRecord> records;
  records.reserve(static_cast<std::size_t>(n));
  long ad_emitted = 0;
  for (int i = 0; i < n; ++i) {
    SubjectRecord r;
    std::ostringstream id;
    id << "sub-" << std::setw(4) << std::setfill('0') << (i + 1);
    r.subject_id = id.str();
    const int bin = i % kBins;  // round-robin keeps every bin populated
    r.age = kAgeLo + width * bin + rng.uniform01() * width;
    // Evenly interleave diagnoses to the exact quota.
    const long should_have = std::lround(ad_fraction * (i + 1));
    if (ad_emitted < should_have && ad_emitted < ad_quota) {
      r.diagnosis = Diagnosis::AD;
      ++ad_emitted;
    } else {
      r.diagnosis = Diagnosis::CN;
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::string cohort_to_csv(const std::vector<SubjectRecord>& records) {
  std::ostringstream os;
  os << "subject_id,age,diagnosis\n";
  os.precision(6);
  for (const auto& r : records)
    os << r.subject_id << ',' << std::fixed << r.age << ','
       << (r.diagnosis == Diagnosis::AD ? "AD" : "CN") << '\n';
  return os.str();
}

std::vector<SubjectRecord> cohort_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("subject_id,age,diagnosis", 0) != 0)
    throw DataError("cohort csv: missing header");
  std::vector<SubjectRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    SubjectRecord r;
    std::string age, diag;
    if (!std::getline(ls, r.subject_id, ',') || !std::getline(ls, age, ',') ||
        !std::getline(ls, diag))
      throw DataError("cohort csv: malformed row: " + line);
    r.age = std::stod(age);
    if (diag == "AD")
      r.diagnosis = Diagnosis::AD;
    else if (diag == "CN")
      r.diagnosis = Diagnosis::CN;
    else
      throw DataError("cohort csv: unknown diagnosis: " + diag);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw DataError("cohort csv: no records");
  return records;
}

}  // namespace voxseg
