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

#include "voxseg/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "voxseg/errors.hpp"
#include "voxseg/rng.hpp"

namespace voxseg {

namespace {

constexpr double kAgeLo = 55.0, kAgeHi = 95.0;

int age_bin(double age, int bins) {
  const double width = (kAgeHi - kAgeLo) / bins;
  const int b = static_cast<int>((age - kAgeLo) / width);
  return std::clamp(b, 0, bins - 1);
}

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.below(i))]);
}

/// Largest-remainder quotas for `m` items over the given ratios; remainder
/// seats go to the largest fractional parts, ties to the earlier partition.
std::array<int, 3> quotas(int m, const std::array<double, 3>& ratios) {
  std::array<int, 3> q{};
  std::array<double, 3> frac{};
  int assigned = 0;
  for (int p = 0; p < 3; ++p) {
    const double exact = m * ratios[static_cast<std::size_t>(p)];
    q[static_cast<std::size_t>(p)] = static_cast<int>(std::floor(exact));
    frac[static_cast<std::size_t>(p)] =
        exact - q[static_cast<std::size_t>(p)];
    assigned += q[static_cast<std::size_t>(p)];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return frac[static_cast<std::size_t>(a)] > frac[static_cast<std::size_t>(b)];
  });
  for (int r = 0; r < m - assigned; ++r)
    ++q[static_cast<std::size_t>(order[static_cast<std::size_t>(r % 3)])];
  return q;
}

// Stratum key: diagnosis major, age bin minor; fixed iteration order keeps
// the assignment reproducible.
long stratum_key(const SubjectRecord& r, int bins) {
  return (r.diagnosis == Diagnosis::AD ? 0 : 1) * bins + age_bin(r.age, bins);
}

}  // namespace

const char* partition_name(Partition p) {
  switch (p) {
    case Partition::train: return "train";
    case Partition::val: return "val";
    case Partition::test: return "test";
  }
  return "?";
}

std::array<int, 3> SplitAssignment::counts() const {
  std::array<int, 3> c{};
  for (Partition p : partition) ++c[static_cast<std::size_t>(p)];
  return c;
}

std::array<int, 3> SplitAssignment::counts(
    const std::vector<SubjectRecord>& records, Diagnosis d) const {
  std::array<int, 3> c{};
  for (std::size_t i = 0; i < partition.size(); ++i)
    if (records[i].diagnosis == d) ++c[static_cast<std::size_t>(partition[i])];
  return c;
}

SplitAssignment split_dataset(const std::vector<SubjectRecord>& records,
                              const std::array<double, 3>& ratios,
                              int age_bin_count, std::uint64_t seed) {
  if (records.empty()) throw ConfigError("split: empty record list");
  if (age_bin_count < 1) throw ConfigError("split: age_bin_count must be >= 1");
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("split: ratios must sum to 1");
  for (double r : ratios)
    if (r < 0) throw ConfigError("split: negative ratio");

  std::map<long, std::vector<int>> strata;
  for (int i = 0; i < static_cast<int>(records.size()); ++i)
    strata[stratum_key(records[static_cast<std::size_t>(i)], age_bin_count)]
        .push_back(i);

  SplitAssignment out;
  out.partition.assign(records.size(), Partition::train);
  const SeedStream stream(seed);
  for (auto& [key, idx] : strata) {
    Rng rng = stream.substream(static_cast<std::uint64_t>(key));
    shuffle_indices(idx, rng);
    const std::array<int, 3> q = quotas(static_cast<int>(idx.size()), ratios);
    int pos = 0;
    for (int p = 0; p < 3; ++p)
      for (int j = 0; j < q[static_cast<std::size_t>(p)]; ++j, ++pos)
        out.partition[static_cast<std::size_t>(idx[static_cast<std::size_t>(pos)])] =
            static_cast<Partition>(p);
  }
  return out;
}

std::vector<int> stratified_downsample(
    const std::vector<SubjectRecord>& records, int target, int age_bin_count,
    std::uint64_t seed) {
  if (target < 0 || target > static_cast<int>(records.size()))
    throw ConfigError("downsample: target outside 0..n");
  std::map<long, std::vector<int>> strata;
  for (int i = 0; i < static_cast<int>(records.size()); ++i)
    strata[stratum_key(records[static_cast<std::size_t>(i)], age_bin_count)]
        .push_back(i);

  const SeedStream stream(seed);
  for (auto& [key, idx] : strata) {
    Rng rng = stream.substream(0x64730000ULL + static_cast<std::uint64_t>(key));
    shuffle_indices(idx, rng);
  }

  // Round-robin over strata keeps the kept set as even as possible.
  std::vector<int> kept;
  std::size_t offset = 0;
  while (static_cast<int>(kept.size()) < target) {
    bool any = false;
    for (auto& [key, idx] : strata) {
      if (offset < idx.size() && static_cast<int>(kept.size()) < target) {
        kept.push_back(idx[offset]);
        any = true;
      }
    }
    if (!any) break;
    ++offset;
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::string split_to_csv(const std::vector<SubjectRecord>& records,
                         const SplitAssignment& assignment) {
  if (records.size() != assignment.partition.size())
    throw ConfigError("split csv: record/assignment size mismatch");
  std::ostringstream os;
  os << "subject_id,partition\n";
  for (std::size_t i = 0; i < records.size(); ++i)
    os << records[i].subject_id << ','
       << partition_name(assignment.partition[i]) << '\n';
  return os.str();
}

}  // namespace voxseg
