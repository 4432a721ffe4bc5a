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

#ifndef VOXSEG_NIFTI_HPP
#define VOXSEG_NIFTI_HPP

#include <string>

#include "voxseg/grid3.hpp"

namespace voxseg {

/// NIfTI-1 single-file (.nii) I/O for the subset this toolkit needs:
/// 3D volumes, datatypes uint8 (2), int16 (4), float32 (16), little- or
/// big-endian on read (endianness probed via sizeof_hdr == 348), always
/// native little-endian on write. No scl_slope/scl_inter scaling, no
/// compression, no two-file (.hdr/.img) form.

/// Reads a volume; integer payloads are widened to double without value
/// change. Spacing comes from pixdim (zeroed pixdim defaults to 1 mm);
/// the voxel-to-world affine comes from the sform when sform_code > 0.
Volume3 read_nifti(const std::string& path);

/// Reads a label volume (uint8 payload expected); validates every label is
/// in {0..class_count}.
LabelVolume read_nifti_labels(const std::string& path, int class_count = 3);

/// Writes float32; read_nifti inverts it exactly for float32-representable
/// values.
void write_nifti(const Volume3& v, const std::string& path);

/// Writes uint8.
void write_nifti(const LabelVolume& v, const std::string& path);
void write_nifti(const BinaryMask& m, const std::string& path);

}  // namespace voxseg

#endif  // VOXSEG_NIFTI_HPP
