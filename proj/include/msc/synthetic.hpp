// Copyright 2026 The msc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "msc/pipeline.hpp"
#include "msc/tensor.hpp"

namespace msc {

/// Planted tricluster description: rank-1 signal gamma * w (x) u (x) v
/// built from indicator vectors over J1, J2, J3, plus i.i.d. standard
/// Gaussian noise addressed by (seed, i, j, k).
struct SyntheticSpec {
  std::array<std::size_t, 3> dims{};
  std::size_t l = 0;        // planted cluster size, equal in every mode
  double gamma = 0.0;       // signal strength, >= 0
  std::uint64_t seed = 0;

  bool operator==(const SyntheticSpec&) const = default;
};

struct GroundTruth {
  ClusterSet j1, j2, j3;
  double gamma = 0.0;
  std::size_t l = 0;
  std::uint64_t seed = 0;
  std::array<std::size_t, 3> dims{};

  const ClusterSet& cluster(int mode) const {
    return mode == 1 ? j1 : (mode == 2 ? j2 : j3);
  }
};

/// Unit vector with entries 1/sqrt(|J|) on J and 0 elsewhere.
std::vector<double> indicator_vector(std::size_t m,
                                     const std::vector<std::size_t>& j);

/// Default planted cluster size: fraction of the smallest mode (the
/// cluster has the same cardinality in every mode), at least 1.
std::size_t default_cluster_size(const std::array<std::size_t, 3>& dims,
                                 double frac = 0.1);

GroundTruth ground_truth_of(const SyntheticSpec& spec);

/// Signal entry gamma * w_i * u_j * v_k (no noise).
double signal_at(const SyntheticSpec& spec, std::size_t i, std::size_t j,
                 std::size_t k);

/// Full tensor entry: signal plus seeded Gaussian noise. The same
/// function backs whole-tensor and slice-local generation, so the two
/// paths agree bitwise.
double entry_at(const SyntheticSpec& spec, std::size_t i, std::size_t j,
                std::size_t k);

std::pair<Tensor3, GroundTruth> generate(const SyntheticSpec& spec);

/// One slice of the synthetic tensor without materializing the rest.
Matrix generate_slice(const SyntheticSpec& spec, int mode, std::size_t index);

}  // namespace msc
