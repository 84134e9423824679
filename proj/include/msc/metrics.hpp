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

#include "msc/matrix.hpp"
#include "msc/pipeline.hpp"
#include "msc/synthetic.hpp"

namespace msc {

/// Cluster quality against ground truth: rec and sim are the means of
/// three per-mode values, each in [0, 1].
struct QualityReport {
  double rec = 0.0;
  double sim = 0.0;
  std::array<double, 3> rec_per_mode{};
  std::array<double, 3> sim_per_mode{};
};

/// Mean over modes of |J intersect Jhat| / |J|.
double recovery_rate(const std::array<ClusterSet, 3>& truth,
                     const std::array<ClusterSet, 3>& found,
                     std::array<double, 3>* per_mode = nullptr);

/// Mean over modes of the average pairwise similarity inside the found
/// cluster (diagonal terms included).
double similarity_index(const std::array<const Matrix*, 3>& sims,
                        const std::array<ClusterSet, 3>& found,
                        std::array<double, 3>* per_mode = nullptr);

/// Both metrics for a sequential run (which retains its similarity
/// matrices) against generator ground truth.
QualityReport evaluate(const GroundTruth& truth, const TriclusterResult& result);

/// Centering and scaling constants for the largest eigenvalue of a white
/// Wishart matrix Z^T Z with Z of shape (m2 x m3):
///   mu    = (sqrt(m2-1) + sqrt(m3))^2
///   sigma = sqrt(mu) * (1/sqrt(m2-1) + 1/sqrt(m3))^(1/3)
std::pair<double, double> tw_center_scale(std::size_t m2, std::size_t m3);

/// Monte Carlo sanity check of the centering: samples Gaussian matrices,
/// standardizes the top eigenvalues of Z^T Z (dense eigensolver, not
/// power iteration) and summarizes them. Not a goodness-of-fit test.
struct WishartSummary {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double min = 0.0;
  double max = 0.0;
  std::size_t samples = 0;
};

WishartSummary wishart_diagnostic(std::size_t m2, std::size_t m3,
                                  std::size_t n_samples, std::uint64_t seed);

}  // namespace msc
