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
#include <cstddef>
#include <optional>
#include <vector>

#include "msc/matrix.hpp"
#include "msc/spectral.hpp"
#include "msc/tensor.hpp"

namespace msc {

/// Per-slice eigen columns, stored column-major so each column
/// (lambda_i * v_i, or the normalized version) is contiguous.
struct EigenMatrix {
  std::size_t vec_len = 0;
  std::size_t num_cols = 0;
  std::vector<double> columns;  // column-major, vec_len * num_cols
  std::vector<double> lambdas;  // per-column eigenvalue (may be empty)
  double lambda_max = 0.0;
  bool normalized = false;

  double* col(std::size_t i) { return columns.data() + i * vec_len; }
  const double* col(std::size_t i) const { return columns.data() + i * vec_len; }
};

/// Sorted slice indices forming one mode's cluster.
struct ClusterSet {
  int mode = 0;
  std::vector<std::size_t> indices;

  bool operator==(const ClusterSet&) const = default;
};

/// Everything one mode's clustering produced. The similarity matrix is
/// retained for evaluation; the parallel path leaves it empty (it is
/// distributed across the group) and fills cluster_similarity instead.
struct ModeResult {
  int mode = 0;
  std::size_t m = 0;
  ClusterSet cluster;
  std::vector<double> d;
  Matrix sim;
  std::size_t iterations = 0;
  double eps = 0.0;
  bool hypothesis_ok = true;
  bool degenerate_gap = false;
  double cluster_similarity = 0.0;
};

struct TriclusterResult {
  std::array<ModeResult, 3> modes;

  const ClusterSet& cluster(int mode) const { return modes[mode - 1].cluster; }
};

/// Spread bound of the marginal values inside a true cluster of size l:
/// l*eps/2 + sqrt(ln(m-l)). Natural logarithm; l >= m is a domain error.
double theorem_threshold(std::size_t l, double eps, std::size_t m);

/// Whether eps satisfies sqrt(eps) <= 1/(m-l). Advisory only: callers
/// warn on violation, never abort.
bool check_epsilon_hypothesis(double eps, std::size_t m, std::size_t l);

/// Largest hypothesis-compliant eps at the expected cluster size
/// floor(0.1*m): (1/(m - floor(0.1*m)))^2.
double default_epsilon(std::size_t m);

/// Column i = lambda_i * v_i for slice i's covariance, slices in
/// ascending order, all with the same deterministic power-iteration
/// settings. ConvergenceError is annotated with the slice index.
EigenMatrix build_eigen_matrix(const Tensor3& t, int mode,
                               const PowerIterOptions& opts = {});

/// Divide every column by lambda_max. Throws DegenerateInputError when
/// lambda_max is zero.
EigenMatrix normalize(EigenMatrix m);

/// Entrywise |V^T V|.
Matrix similarity(const EigenMatrix& v);

/// Row sums of the similarity matrix (diagonal included).
std::vector<double> marginals(const Matrix& c);

/// Initial cluster: sort d descending, cut at the largest gap between
/// consecutive values (ties -> earliest gap), keep everything above it.
/// If all entries are equal there is no gap; every index is returned and
/// *degenerate is set.
ClusterSet max_gap_init(const std::vector<double>& d, int mode = 0,
                        bool* degenerate = nullptr);

struct RefineOutcome {
  ClusterSet cluster;
  std::size_t iterations = 0;
};

/// While the spread of d over the cluster exceeds theorem_threshold,
/// drop the member with the smallest d (ties -> largest index). d is
/// never recomputed; terminates with at least one member.
RefineOutcome refine(const std::vector<double>& d, ClusterSet j0, double eps);

/// Mean pairwise similarity over the cluster, diagonal included:
/// (1/|J|^2) * sum_{i,j in J} c_ij.
double mean_cluster_similarity(const Matrix& c,
                               const std::vector<std::size_t>& indices);

/// One mode of the sequential pipeline: eigen matrix, normalization,
/// similarity, marginals, max-gap init, refinement.
ModeResult msc_mode(const Tensor3& t, int mode,
                    std::optional<double> eps = std::nullopt,
                    const PowerIterOptions& opts = {});

/// All three modes, in order.
TriclusterResult run_msc(const Tensor3& t,
                         std::optional<double> eps = std::nullopt,
                         const PowerIterOptions& opts = {});

}  // namespace msc
