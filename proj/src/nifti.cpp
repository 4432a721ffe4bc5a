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

#include "voxseg/nifti.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace voxseg {

namespace {

// NIfTI-1 header, field offsets per the public layout. The struct is
// layout-exact (all members naturally aligned), asserted below.
struct Nifti1Header {
  std::int32_t sizeof_hdr;     //   0
  char data_type[10];          //   4
  char db_name[18];            //  14
  std::int32_t extents;        //  32
  std::int16_t session_error;  //  36
  char regular;                //  38
  char dim_info;               //  39
  std::int16_t dim[8];         //  40
  float intent_p1;             //  56
  float intent_p2;             //  60
  float intent_p3;             //  64
  std::int16_t intent_code;    //  68
  std::int16_t datatype;       //  70
  std::int16_t bitpix;         //  72
  std::int16_t slice_start;    //  74
  float pixdim[8];             //  76
  float vox_offset;            // 108
  float scl_slope;             // 112
  float scl_inter;             // 116
  std::int16_t slice_end;      // 120
  char slice_code;             // 122
  char xyzt_units;             // 123
  float cal_max;               // 124
  float cal_min;               // 128
  float slice_duration;        // 132
  float toffset;               // 136
  std::int32_t glmax;          // 140
  std::int32_t glmin;          // 144
  char descrip[80];            // 148
  char aux_file[24];           // 228
  std::int16_t qform_code;     // 252
  std::int16_t sform_code;     // 254
  float quatern_b;             // 256
  float quatern_c;             // 260
  float quatern_d;             // 264
  float qoffset_x;             // 268
  float qoffset_y;             // 272
  float qoffset_z;             // 276
  float srow_x[4];             // 280
  float srow_y[4];             // 296
  float srow_z[4];             // 312
  char intent_name[16];        // 328
  char magic[4];               // 344
};
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;

template <typename T>
T byteswap(T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
    std::swap(b[i], b[sizeof(T) - 1 - i]);
  std::memcpy(&v, b, sizeof(T));
  return v;
}

void swap_header(Nifti1Header& h) {
  h.sizeof_hdr = byteswap(h.sizeof_hdr);
  h.extents = byteswap(h.extents);
  h.session_error = byteswap(h.session_error);
  for (auto& d : h.dim) d = byteswap(d);
  h.intent_p1 = byteswap(h.intent_p1);
  h.intent_p2 = byteswap(h.intent_p2);
  h.intent_p3 = byteswap(h.intent_p3);
  h.intent_code = byteswap(h.intent_code);
  h.datatype = byteswap(h.datatype);
  h.bitpix = byteswap(h.bitpix);
  h.slice_start = byteswap(h.slice_start);
  for (auto& p : h.pixdim) p = byteswap(p);
  h.vox_offset = byteswap(h.vox_offset);
  h.scl_slope = byteswap(h.scl_slope);
  h.scl_inter = byteswap(h.scl_inter);
  h.slice_end = byteswap(h.slice_end);
  h.cal_max = byteswap(h.cal_max);
  h.cal_min = byteswap(h.cal_min);
  h.slice_duration = byteswap(h.slice_duration);
  h.toffset = byteswap(h.toffset);
  h.glmax = byteswap(h.glmax);
  h.glmin = byteswap(h.glmin);
  h.qform_code = byteswap(h.qform_code);
  h.sform_code = byteswap(h.sform_code);
  h.quatern_b = byteswap(h.quatern_b);
  h.quatern_c = byteswap(h.quatern_c);
  h.quatern_d = byteswap(h.quatern_d);
  h.qoffset_x = byteswap(h.qoffset_x);
  h.qoffset_y = byteswap(h.qoffset_y);
  h.qoffset_z = byteswap(h.qoffset_z);
  for (auto& s : h.srow_x) s = byteswap(s);
  for (auto& s : h.srow_y) s = byteswap(s);
  for (auto& s : h.srow_z) s = byteswap(s);
}

struct RawVolume {
  Vec3i dims;
  Vec3d spacing;
  Mat4d affine;
  std::int16_t datatype;
  std::vector<unsigned char> payload;  // native byte order after load
};

RawVolume load_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open: " + path);

  Nifti1Header h{};
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (in.gcount() != sizeof(h))
    throw MalformedHeader("file shorter than a NIfTI-1 header: " + path);

  bool swapped = false;
  if (h.sizeof_hdr != 348) {
    if (byteswap(h.sizeof_hdr) == 348) {
      swap_header(h);
      swapped = true;
    } else {
      throw MalformedHeader("sizeof_hdr is not 348: " + path);
    }
  }

  if (std::memcmp(h.magic, "n+1\0", 4) != 0) {
    if (std::memcmp(h.magic, "ni1\0", 4) == 0)
      throw MalformedHeader("two-file NIfTI (.hdr/.img) is not supported: " +
                            path);
    throw MalformedHeader("bad magic: " + path);
  }
  if (h.dim[0] != 3)
    throw MalformedHeader("only 3D volumes are supported, dim[0]=" +
                          std::to_string(h.dim[0]));
  if (h.datatype != kDtUint8 && h.datatype != kDtInt16 &&
      h.datatype != kDtFloat32)
    throw UnsupportedDatatype("datatype code " + std::to_string(h.datatype));
  if (!(h.scl_slope == 0.0f || h.scl_slope == 1.0f) || h.scl_inter != 0.0f)
    throw UnsupportedDatatype("scl_slope/scl_inter scaling is not supported");
  if (h.dim[1] < 1 || h.dim[2] < 1 || h.dim[3] < 1)
    throw MalformedHeader("non-positive dim");

  RawVolume raw;
  raw.dims = Vec3i(h.dim[1], h.dim[2], h.dim[3]);
  raw.datatype = h.datatype;
  for (int i = 0; i < 3; ++i) {
    const float p = h.pixdim[i + 1];
    raw.spacing[i] = (p > 0.0f) ? static_cast<double>(p) : 1.0;
  }
  raw.affine = Mat4d::Identity();
  if (h.sform_code > 0) {
    for (int c = 0; c < 4; ++c) {
      raw.affine(0, c) = h.srow_x[c];
      raw.affine(1, c) = h.srow_y[c];
      raw.affine(2, c) = h.srow_z[c];
    }
  } else {
    raw.affine(0, 0) = raw.spacing.x();
    raw.affine(1, 1) = raw.spacing.y();
    raw.affine(2, 2) = raw.spacing.z();
  }

  const std::int64_t n = static_cast<std::int64_t>(raw.dims.x()) *
                         raw.dims.y() * raw.dims.z();
  const int elem = (h.datatype == kDtUint8) ? 1 : (h.datatype == kDtInt16 ? 2 : 4);
  const std::int64_t vox_offset = static_cast<std::int64_t>(h.vox_offset);
  if (vox_offset < 348)
    throw MalformedHeader("vox_offset below header size");

  in.seekg(0, std::ios::end);
  const std::int64_t file_size = in.tellg();
  if (file_size - vox_offset < n * elem)
    throw DimensionMismatch("payload shorter than dim product: " + path);

  in.seekg(vox_offset);
  raw.payload.resize(static_cast<std::size_t>(n * elem));
  in.read(reinterpret_cast<char*>(raw.payload.data()),
          static_cast<std::streamsize>(raw.payload.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.payload.size()))
    throw DimensionMismatch("truncated payload: " + path);

  if (swapped && elem > 1) {
    for (std::int64_t i = 0; i < n; ++i) {
      unsigned char* p = raw.payload.data() + i * elem;
      for (int b = 0; b < elem / 2; ++b) std::swap(p[b], p[elem - 1 - b]);
    }
  }
  return raw;
}

Nifti1Header make_header(const Vec3i& dims, const Vec3d& spacing,
                         const Mat4d& affine, std::int16_t datatype,
                         std::int16_t bitpix) {
  Nifti1Header h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  h.dim[1] = static_cast<std::int16_t>(dims.x());
  h.dim[2] = static_cast<std::int16_t>(dims.y());
  h.dim[3] = static_cast<std::int16_t>(dims.z());
  for (int i = 4; i < 8; ++i) h.dim[i] = 1;
  h.datatype = datatype;
  h.bitpix = bitpix;
  h.pixdim[0] = 1.0f;
  h.pixdim[1] = static_cast<float>(spacing.x());
  h.pixdim[2] = static_cast<float>(spacing.y());
  h.pixdim[3] = static_cast<float>(spacing.z());
  for (int i = 4; i < 8; ++i) h.pixdim[i] = 1.0f;
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.scl_inter = 0.0f;
  h.sform_code = 1;
  h.qform_code = 0;
  for (int c = 0; c < 4; ++c) {
    h.srow_x[c] = static_cast<float>(affine(0, c));
    h.srow_y[c] = static_cast<float>(affine(1, c));
    h.srow_z[c] = static_cast<float>(affine(2, c));
  }
  std::memcpy(h.descrip, "voxseg", 6);
  std::memcpy(h.magic, "n+1\0", 4);
  return h;
}

void write_raw(const std::string& path, const Nifti1Header& h,
               const void* payload, std::size_t payload_bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot create: " + path);
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  const char pad[4] = {0, 0, 0, 0};  // extension indicator, vox_offset 352
  out.write(pad, 4);
  out.write(static_cast<const char*>(payload),
            static_cast<std::streamsize>(payload_bytes));
  if (!out) throw IoFailure("short write: " + path);
}

}  // namespace

Volume3 read_nifti(const std::string& path) {
  const RawVolume raw = load_raw(path);
  Volume3 v(raw.dims, raw.spacing);
  v.set_voxel_to_world(raw.affine);
  const Eigen::Index n = v.size();
  if (raw.datatype == kDtUint8) {
    for (Eigen::Index i = 0; i < n; ++i)
      v.values()[i] = static_cast<double>(raw.payload[i]);
  } else if (raw.datatype == kDtInt16) {
    const auto* p = reinterpret_cast<const std::int16_t*>(raw.payload.data());
    for (Eigen::Index i = 0; i < n; ++i)
      v.values()[i] = static_cast<double>(p[i]);
  } else {
    const auto* p = reinterpret_cast<const float*>(raw.payload.data());
    for (Eigen::Index i = 0; i < n; ++i)
      v.values()[i] = static_cast<double>(p[i]);
  }
  return v;
}

LabelVolume read_nifti_labels(const std::string& path, int class_count) {
  const RawVolume raw = load_raw(path);
  LabelVolume lv(raw.dims, class_count, raw.spacing);
  lv.set_voxel_to_world(raw.affine);
  const Eigen::Index n = lv.size();
  auto store = [&](double x, Eigen::Index i) {
    const auto l = static_cast<std::int64_t>(x);
    if (static_cast<double>(l) != x || l < 0 || l > class_count)
      throw DataError("label value " + std::to_string(x) + " outside 0.." +
                      std::to_string(class_count) + " in " + path);
    lv.values()[i] = static_cast<std::uint8_t>(l);
  };
  if (raw.datatype == kDtUint8) {
    for (Eigen::Index i = 0; i < n; ++i)
      store(static_cast<double>(raw.payload[i]), i);
  } else if (raw.datatype == kDtInt16) {
    const auto* p = reinterpret_cast<const std::int16_t*>(raw.payload.data());
    for (Eigen::Index i = 0; i < n; ++i) store(static_cast<double>(p[i]), i);
  } else {
    const auto* p = reinterpret_cast<const float*>(raw.payload.data());
    for (Eigen::Index i = 0; i < n; ++i) store(static_cast<double>(p[i]), i);
  }
  return lv;
}

void write_nifti(const Volume3& v, const std::string& path) {
  const Nifti1Header h =
      make_header(v.dims(), v.spacing(), v.voxel_to_world(), kDtFloat32, 32);
  std::vector<float> payload(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    payload[static_cast<std::size_t>(i)] = static_cast<float>(v.values()[i]);
  write_raw(path, h, payload.data(), payload.size() * sizeof(float));
}

void write_nifti(const LabelVolume& v, const std::string& path) {
  const Nifti1Header h =
      make_header(v.dims(), v.spacing(), v.voxel_to_world(), kDtUint8, 8);
  write_raw(path, h, v.values().data(), static_cast<std::size_t>(v.size()));
}

void write_nifti(const BinaryMask& m, const std::string& path) {
  const Nifti1Header h =
      make_header(m.dims(), m.spacing(), m.voxel_to_world(), kDtUint8, 8);
  write_raw(path, h, m.values().data(), static_cast<std::size_t>(m.size()));
}

}  // namespace voxseg
