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

#ifndef VOXSEG_SPLIT_HPP
#define VOXSEG_SPLIT_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "voxseg/phantom.hpp"

namespace voxseg {

enum class Partition { train, val, test };

const char* partition_name(Partition p);

/// Per-record partition, parallel to the input record list.
struct SplitAssignment {
  std::vector<Partition> partition;

  std::array<int, 3> counts() const;
  std::array<int, 3> counts(const std::vector<SubjectRecord>& records,
                            Diagnosis d) const;
};

/// Stratified split: within each (diagnosis x age-bin) stratum the records
/// are shuffled by seed and cut by the ratios with largest-remainder
/// rounding, so balanced cohorts split to exact counts. Empty strata simply
/// contribute nothing.
SplitAssignment split_dataset(const std::vector<SubjectRecord>& records,
                              const std::array<double, 3>& ratios,
                              int age_bin_count, std::uint64_t seed);

/// Stratified downsampler: keeps `target` records, drawn evenly across
/// (diagnosis x age-bin) strata, shuffled by seed. Returns kept indices in
/// ascending order.
std::vector<int> stratified_downsample(
    const std::vector<SubjectRecord>& records, int target, int age_bin_count,
    std::uint64_t seed);

std::string split_to_csv(const std::vector<SubjectRecord>& records,
                         const SplitAssignment& assignment);

}  // namespace voxseg

#endif  // VOXSEG_SPLIT_HPP
