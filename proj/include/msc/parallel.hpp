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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msc/comm.hpp"
#include "msc/pipeline.hpp"
#include "msc/synthetic.hpp"
#include "msc/tensor.hpp"

namespace msc::par {

/// This process's place in the three per-mode groups. Group g (0-based)
/// computes mode g+1; group roots are the lowest global rank of each
/// group and the global root is world rank 0.
struct GroupAssignment {
  int mode = 0;
  int group_rank = 0;
  int group_size = 0;
  int global_rank = 0;
  int world_size = 0;
  bool is_group_root = false;
  bool is_global_root = false;
  std::unique_ptr<Communicator> group_comm;
};

/// Deterministic partition of the world into three equal groups.
/// Throws at startup when world.size() is not a positive multiple of 3.
GroupAssignment split_groups(Communicator& world);

/// The slices this process owns for its group's mode, plus the per-slice
/// eigen results once local_eigen ran. Slice storage never exceeds
/// ceil(m / group_size) slices; the counters below let tests check that.
struct LocalBlock {
  int mode = 0;
  std::array<std::size_t, 3> dims{};
  std::size_t mode_size = 0;
  std::size_t vec_len = 0;  // eigenvector length for this mode's slices
  BlockRange range;
  std::vector<Matrix> slices;

  std::vector<double> local_columns;  // column-major, vec_len * range.count
  std::vector<double> local_lambdas;
  double local_lambda_max = 0.0;

  std::size_t peak_slice_count = 0;  // owned slices held at once
  std::size_t scratch_elems = 0;     // transient receive buffer, in doubles
};

/// Regenerate owned slices locally from the shared synthetic seed; no
/// data moves at all.
LocalBlock distribute_synthetic(const GroupAssignment& ga,
                                const SyntheticSpec& spec);

/// Root streams the file one mode-1 slice at a time over a world
/// broadcast; every process keeps only what it owns. No process ever
/// holds more than its block plus one slice-sized receive buffer.
LocalBlock distribute_file(Communicator& world, const GroupAssignment& ga,
                           const std::string& path);

/// Covariance + power iteration per owned slice, ascending global slice
/// order. ConvergenceError is annotated with (rank, mode, slice).
void local_eigen(LocalBlock& block, const PowerIterOptions& opts = {});

/// All-gather of the unnormalized columns plus an all-reduce of the
/// local lambda maxima, then local normalization. Every group member
/// returns the full matrix V. Collective over the group.
EigenMatrix assemble_v(const LocalBlock& block, Communicator& group);

/// Rows of |V_local^T V| for the owned slice indices and their row sums,
/// dot products accumulated in ascending column order.
struct LocalSimilarity {
  Matrix rows;            // range.count x m
  std::vector<double> d;  // range.count entries
};
LocalSimilarity local_similarity(const LocalBlock& block, const EigenMatrix& v);

/// Gather d to the group root and run max-gap init + refinement there.
/// Returns the mode result at the group root, nullopt elsewhere.
/// Collective over the group.
std::optional<ModeResult> gather_and_select(const LocalBlock& block,
                                            std::span<const double> d_local,
                                            const GroupAssignment& ga,
                                            std::optional<double> eps);

/// Mean in-cluster similarity from the distributed C rows: the root
/// broadcasts the cluster, everyone sums its owned rows over it, partial
/// sums are gathered back. Returns the value at the group root.
/// Collective over the group.
std::optional<double> cluster_similarity_distributed(
    const LocalBlock& block, const LocalSimilarity& ls,
    const GroupAssignment& ga, const ModeResult* at_root);

/// Group roots send their mode results to the global root, which returns
/// the (J1, J2, J3) tuple tagged by mode. Collective over the world.
std::optional<TriclusterResult> gather_result(
    Communicator& world, const GroupAssignment& ga,
    const std::optional<ModeResult>& mine);

struct PhaseTimings {
  double eigen = 0.0;
  double assemble = 0.0;
  double similarity = 0.0;
  double gather = 0.0;
  double select = 0.0;
  double total = 0.0;
};

struct RankTiming {
  int rank = 0;
  int group = 0;  // 0-based group id, mode - 1
  PhaseTimings phases;
};

struct ParallelConfig {
  std::optional<SyntheticSpec> synthetic;
  std::optional<std::string> tensor_file;
  std::optional<double> eps;
  PowerIterOptions power;
};

struct ParallelOutcome {
  TriclusterResult result;
  std::vector<RankTiming> timings;  // one per world rank, rank order
};

/// The whole parallel pipeline. Every process calls it; the global root
/// gets the outcome, everyone else nullopt.
std::optional<ParallelOutcome> parallel_msc(Communicator& world,
                                            const ParallelConfig& config);

/// CSV lines "rank,group,phase,seconds"; one line per phase plus a
/// "total" line per rank.
void write_timings_csv(const std::string& path,
                       const std::vector<RankTiming>& timings);

}  // namespace msc::par
