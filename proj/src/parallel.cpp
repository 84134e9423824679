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

#include "msc/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "msc/errors.hpp"

namespace msc::par {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t eigenvector_length(const std::array<std::size_t, 3>& dims, int mode) {
  // Slice shapes: mode 1 -> (m2 x m3), mode 2 -> (m1 x m3),
  // mode 3 -> (m1 x m2); the covariance is cols x cols.
  return mode == 3 ? dims[1] : dims[2];
}

LocalBlock make_block(const GroupAssignment& ga,
                      const std::array<std::size_t, 3>& dims) {
  LocalBlock block;
  block.mode = ga.mode;
  block.dims = dims;
  block.mode_size = dims[static_cast<std::size_t>(ga.mode - 1)];
  block.vec_len = eigenvector_length(dims, ga.mode);
  block.range = block_range(block.mode_size,
                            static_cast<std::size_t>(ga.group_size),
                            static_cast<std::size_t>(ga.group_rank));
  return block;
}

}  // namespace

GroupAssignment split_groups(Communicator& world) {
  const int p = world.size();
  if (p < 3 || p % 3 != 0) {
    throw std::runtime_error(
        "the process count must be a positive multiple of 3 (one group per "
        "mode); got " + std::to_string(p));
  }
  const int per_group = p / 3;
  GroupAssignment ga;
  ga.global_rank = world.rank();
  ga.world_size = p;
  const int group = ga.global_rank / per_group;
  ga.mode = group + 1;
  ga.group_comm = world.split(group);
  ga.group_rank = ga.group_comm->rank();
  ga.group_size = ga.group_comm->size();
  ga.is_group_root = ga.group_rank == 0;
  ga.is_global_root = ga.global_rank == 0;
  return ga;
}

LocalBlock distribute_synthetic(const GroupAssignment& ga,
                                const SyntheticSpec& spec) {
  LocalBlock block = make_block(ga, spec.dims);
  block.slices.reserve(block.range.count);
  for (std::size_t s = 0; s < block.range.count; ++s) {
    block.slices.push_back(
        generate_slice(spec, block.mode, block.range.start + s));
    block.peak_slice_count = std::max(block.peak_slice_count, block.slices.size());
  }
  return block;
}

LocalBlock distribute_file(Communicator& world, const GroupAssignment& ga,
                           const std::string& path) {
  // Root reads the header and streams mode-1 slices; everyone folds the
  // broadcast buffer into the slices it owns for its group's mode.
  std::optional<TensorFileReader> reader;
  std::array<double, 3> dims_buf{};
  if (ga.is_global_root) {
    try {
      reader.emplace(path);
    } catch (const std::exception& e) {
      throw FormatError("rank " + std::to_string(ga.global_rank) + ": " + e.what());
    }
    const auto d = reader->dims();
    for (int i = 0; i < 3; ++i) dims_buf[i] = static_cast<double>(d[i]);
  }
  world.broadcast({dims_buf.data(), 3}, 0);
  const std::array<std::size_t, 3> dims = {static_cast<std::size_t>(dims_buf[0]),
                                           static_cast<std::size_t>(dims_buf[1]),
                                           static_cast<std::size_t>(dims_buf[2])};

  LocalBlock block = make_block(ga, dims);
  const auto [m1, m2, m3] = dims;
  switch (block.mode) {
    case 1:
      for (std::size_t s = 0; s < block.range.count; ++s)
        block.slices.emplace_back(m2, m3);
      break;
    case 2:
      for (std::size_t s = 0; s < block.range.count; ++s)
        block.slices.emplace_back(m1, m3);
      break;
    default:
      for (std::size_t s = 0; s < block.range.count; ++s)
        block.slices.emplace_back(m1, m2);
      break;
  }
  block.peak_slice_count = block.slices.size();

  std::vector<double> buf(m2 * m3, 0.0);
  block.scratch_elems = buf.size();
  const std::size_t lo = block.range.start;
  const std::size_t hi = block.range.start + block.range.count;
  for (std::size_t i = 0; i < m1; ++i) {
    if (ga.is_global_root) reader->read_slice(buf);
    world.broadcast({buf.data(), buf.size()}, 0);
    switch (block.mode) {
      case 1:
        if (i >= lo && i < hi) {
          std::copy(buf.begin(), buf.end(), block.slices[i - lo].data.begin());
        }
        break;
      case 2:
        for (std::size_t j = lo; j < hi; ++j) {
          // Row j of the mode-1 slice is row i of owned mode-2 slice j.
          std::copy_n(buf.data() + j * m3, m3, block.slices[j - lo].row(i));
        }
        break;
      default:
        for (std::size_t k = lo; k < hi; ++k) {
          double* row = block.slices[k - lo].row(i);
          for (std::size_t j = 0; j < m2; ++j) row[j] = buf[j * m3 + k];
        }
        break;
    }
  }
  if (ga.is_global_root) reader->finish();
  return block;
}

void local_eigen(LocalBlock& block, const PowerIterOptions& opts) {
  block.local_columns.assign(block.vec_len * block.range.count, 0.0);
  block.local_lambdas.assign(block.range.count, 0.0);
  block.local_lambda_max = 0.0;
  for (std::size_t s = 0; s < block.range.count; ++s) {
    const Matrix cov = covariance(block.slices[s]);
    EigenPair pair;
    try {
      pair = top_eigenpair(cov, opts);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("mode " + std::to_string(block.mode) + " slice " +
                                 std::to_string(block.range.start + s) + ": " +
                                 e.what(),
                             e.last_value, e.last_vector, e.last_residual,
                             e.iterations);
    }
    double* col = block.local_columns.data() + s * block.vec_len;
    for (std::size_t r = 0; r < block.vec_len; ++r) {
      col[r] = pair.value * pair.vector[r];
    }
    block.local_lambdas[s] = pair.value;
    block.local_lambda_max = std::max(block.local_lambda_max, pair.value);
  }
}

EigenMatrix assemble_v(const LocalBlock& block, Communicator& group) {
  EigenMatrix v;
  v.vec_len = block.vec_len;
  v.num_cols = block.mode_size;
  v.columns = group.allgatherv(
      {block.local_columns.data(), block.local_columns.size()});
  if (v.columns.size() != v.vec_len * v.num_cols) {
    throw CommError("assembled eigen matrix has unexpected size");
  }
  v.lambda_max = group.allreduce_max(block.local_lambda_max);
  if (v.lambda_max <= 0.0) {
    throw DegenerateInputError(
        "all slice covariances are zero; nothing to normalize");
  }
  for (auto& x : v.columns) x /= v.lambda_max;
  v.normalized = true;
  return v;
}

LocalSimilarity local_similarity(const LocalBlock& block, const EigenMatrix& v) {
  const std::size_t m = v.num_cols;
  LocalSimilarity out;
  out.rows = Matrix(block.range.count, m);
  out.d.assign(block.range.count, 0.0);
  for (std::size_t r = 0; r < block.range.count; ++r) {
    const double* ci = v.col(block.range.start + r);
    double* row = out.rows.row(r);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double c = std::abs(dot({ci, v.vec_len}, {v.col(j), v.vec_len}));
      row[j] = c;
      acc += c;
    }
    out.d[r] = acc;
  }
  return out;
}

std::optional<ModeResult> gather_and_select(const LocalBlock& block,
                                            std::span<const double> d_local,
                                            const GroupAssignment& ga,
                                            std::optional<double> eps) {
  std::vector<double> d = ga.group_comm->gatherv(d_local, 0);
  if (!ga.is_group_root) return std::nullopt;
  if (d.size() != block.mode_size) {
    throw CommError("gathered marginal vector has unexpected size");
  }
  ModeResult res;
  res.mode = block.mode;
  res.m = block.mode_size;
  res.eps = eps.value_or(default_epsilon(res.m));
  res.d = std::move(d);
  ClusterSet j0 = max_gap_init(res.d, block.mode, &res.degenerate_gap);
  RefineOutcome refined = refine(res.d, std::move(j0), res.eps);
  res.cluster = std::move(refined.cluster);
  res.iterations = refined.iterations;
  res.hypothesis_ok =
      res.cluster.indices.size() < res.m
          ? check_epsilon_hypothesis(res.eps, res.m, res.cluster.indices.size())
          : true;
  return res;
}

std::optional<double> cluster_similarity_distributed(
    const LocalBlock& block, const LocalSimilarity& ls,
    const GroupAssignment& ga, const ModeResult* at_root) {
  std::vector<double> cluster;
  if (ga.is_group_root) {
    cluster.reserve(at_root->cluster.indices.size());
    for (std::size_t idx : at_root->cluster.indices) {
      cluster.push_back(static_cast<double>(idx));
    }
  }
  cluster = broadcast_vector(*ga.group_comm, std::move(cluster), 0);

  double partial = 0.0;
  const std::size_t lo = block.range.start;
  const std::size_t hi = block.range.start + block.range.count;
  for (double gi : cluster) {
    const auto i = static_cast<std::size_t>(gi);
    if (i < lo || i >= hi) continue;
    const double* row = ls.rows.row(i - lo);
    for (double gj : cluster) partial += row[static_cast<std::size_t>(gj)];
  }
  const std::vector<double> parts = ga.group_comm->gatherv({&partial, 1}, 0);
  if (!ga.is_group_root) return std::nullopt;
  double total = 0.0;
  for (double p : parts) total += p;
  const double n = static_cast<double>(cluster.size());
  return total / (n * n);
}

std::optional<TriclusterResult> gather_result(
    Communicator& world, const GroupAssignment& ga,
    const std::optional<ModeResult>& mine) {
  std::vector<double> payload;
  if (ga.is_group_root && mine) {
    const ModeResult& r = *mine;
    payload.reserve(8 + r.cluster.indices.size() + r.d.size());
    payload.push_back(static_cast<double>(r.mode));
    payload.push_back(static_cast<double>(r.m));
    payload.push_back(r.eps);
    payload.push_back(static_cast<double>(r.iterations));
    payload.push_back(r.hypothesis_ok ? 1.0 : 0.0);
    payload.push_back(r.degenerate_gap ? 1.0 : 0.0);
    payload.push_back(r.cluster_similarity);
    payload.push_back(static_cast<double>(r.cluster.indices.size()));
    for (std::size_t idx : r.cluster.indices) {
      payload.push_back(static_cast<double>(idx));
    }
    payload.insert(payload.end(), r.d.begin(), r.d.end());
  }
  const std::vector<double> all = world.gatherv(
      {payload.data(), payload.size()}, 0);
  if (!ga.is_global_root) return std::nullopt;

  TriclusterResult out;
  bool seen[3] = {false, false, false};
  std::size_t pos = 0;
  while (pos < all.size()) {
    ModeResult r;
    r.mode = static_cast<int>(all[pos++]);
    r.m = static_cast<std::size_t>(all[pos++]);
    r.eps = all[pos++];
    r.iterations = static_cast<std::size_t>(all[pos++]);
    r.hypothesis_ok = all[pos++] != 0.0;
    r.degenerate_gap = all[pos++] != 0.0;
    r.cluster_similarity = all[pos++];
    const auto n_j = static_cast<std::size_t>(all[pos++]);
    r.cluster.mode = r.mode;
    r.cluster.indices.reserve(n_j);
    for (std::size_t i = 0; i < n_j; ++i) {
      r.cluster.indices.push_back(static_cast<std::size_t>(all[pos++]));
    }
    r.d.assign(all.begin() + static_cast<std::ptrdiff_t>(pos),
               all.begin() + static_cast<std::ptrdiff_t>(pos + r.m));
    pos += r.m;
    if (r.mode < 1 || r.mode > 3 || seen[r.mode - 1]) {
      throw CommError("malformed mode result payload");
    }
    seen[r.mode - 1] = true;
    out.modes[r.mode - 1] = std::move(r);
  }
  if (!(seen[0] && seen[1] && seen[2])) {
    throw CommError("missing mode results at the global root");
  }
  return out;
}

std::optional<ParallelOutcome> parallel_msc(Communicator& world,
                                            const ParallelConfig& config) {
  GroupAssignment ga = split_groups(world);

  LocalBlock block;
  if (config.synthetic) {
    block = distribute_synthetic(ga, *config.synthetic);
  } else if (config.tensor_file) {
    block = distribute_file(world, ga, *config.tensor_file);
  } else {
    throw std::invalid_argument("parallel_msc needs a tensor source");
  }

  world.barrier();
  PhaseTimings t;
  const auto t0 = Clock::now();

  auto mark = [&](double& slot, const auto& fn) {
    const auto start = Clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      slot = seconds_since(start);
    } else {
      auto out = fn();
      slot = seconds_since(start);
      return out;
    }
  };

  mark(t.eigen, [&] { local_eigen(block, config.power); });
  EigenMatrix v = mark(t.assemble, [&] { return assemble_v(block, *ga.group_comm); });
  LocalSimilarity ls =
      mark(t.similarity, [&] { return local_similarity(block, v); });

  auto gather_start = Clock::now();
  std::optional<ModeResult> mode_res =
      gather_and_select(block, {ls.d.data(), ls.d.size()}, ga, config.eps);
  t.gather = seconds_since(gather_start);

  auto select_start = Clock::now();
  std::optional<double> sim = cluster_similarity_distributed(
      block, ls, ga, mode_res ? &*mode_res : nullptr);
  if (mode_res) mode_res->cluster_similarity = *sim;
  t.select = seconds_since(select_start);
  t.total = seconds_since(t0);

  std::optional<TriclusterResult> tri = gather_result(world, ga, mode_res);

  const std::array<double, 7> mine = {
      static_cast<double>(ga.mode - 1), t.eigen, t.assemble, t.similarity,
      t.gather, t.select, t.total};
  const std::vector<double> all_t = world.gatherv({mine.data(), mine.size()}, 0);

  if (!ga.is_global_root) return std::nullopt;

  ParallelOutcome outcome;
  outcome.result = std::move(*tri);
  outcome.timings.resize(static_cast<std::size_t>(ga.world_size));
  for (int r = 0; r < ga.world_size; ++r) {
    const double* row = all_t.data() + static_cast<std::size_t>(r) * 7;
    RankTiming& rt = outcome.timings[static_cast<std::size_t>(r)];
    rt.rank = r;
    rt.group = static_cast<int>(row[0]);
    rt.phases = {row[1], row[2], row[3], row[4], row[5], row[6]};
  }
  return outcome;
}

void write_timings_csv(const std::string& path,
                       const std::vector<RankTiming>& timings) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << "rank,group,phase,seconds\n";
  char line[128];
  for (const auto& rt : timings) {
    const std::pair<const char*, double> phases[] = {
        {"eigen", rt.phases.eigen},         {"assemble", rt.phases.assemble},
        {"similarity", rt.phases.similarity}, {"gather", rt.phases.gather},
        {"select", rt.phases.select},       {"total", rt.phases.total}};
    for (const auto& [name, secs] : phases) {
      std::snprintf(line, sizeof(line), "%d,%d,%s,%.9f\n", rt.rank, rt.group,
                    name, secs);
      out << line;
    }
  }
}

}  // namespace msc::par
