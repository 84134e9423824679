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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "msc/errors.hpp"
#include "msc/parallel.hpp"
#include "msc/pipeline.hpp"
#include "msc/process_comm.hpp"
#include "msc/serialize.hpp"
#include "msc/synthetic.hpp"
#include "msc/thread_comm.hpp"

using namespace msc;
using namespace msc::par;

namespace {

SyntheticSpec planted_spec(std::array<std::size_t, 3> dims, std::size_t l,
                           double gamma, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.dims = dims;
  spec.l = l;
  spec.gamma = gamma;
  spec.seed = seed;
  return spec;
}

void require_clean(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("communicator primitives behave on a 4-rank world") {
  std::vector<std::vector<double>> gathered(4);
  std::vector<double> maxima(4);
  std::vector<std::vector<double>> rooted(4);
  std::vector<std::vector<double>> bcast(4, std::vector<double>(2));
  std::vector<int> sub_sizes(4), sub_ranks(4);

  auto errors = run_thread_group(4, [&](Communicator& world) {
    const int r = world.rank();
    world.barrier();

    std::vector<double> mine(static_cast<std::size_t>(r), double(r));
    gathered[r] = world.allgatherv({mine.data(), mine.size()});
    maxima[r] = world.allreduce_max(r == 2 ? 9.5 : 1.0 * r);
    rooted[r] = world.gatherv({mine.data(), mine.size()}, 2);

    bcast[r] = {double(r), double(r)};
    world.broadcast({bcast[r].data(), 2}, 1);

    auto sub = world.split(r % 2);
    sub_sizes[r] = sub->size();
    sub_ranks[r] = sub->rank();
  });
  require_clean(errors);

  // 0 entries from rank 0, one 1.0, two 2.0, three 3.0.
  const std::vector<double> expect = {1, 2, 2, 3, 3, 3};
  for (int r = 0; r < 4; ++r) {
    CHECK(gathered[r] == expect);
    CHECK(maxima[r] == 9.5);
    CHECK(bcast[r] == std::vector<double>{1.0, 1.0});
    CHECK(sub_sizes[r] == 2);
    CHECK(sub_ranks[r] == r / 2);
  }
  CHECK(rooted[2] == expect);
  CHECK(rooted[0].empty());
  CHECK(rooted[3].empty());
}

TEST_CASE("split_groups assigns contiguous thirds") {
  std::vector<int> modes(6), group_ranks(6), group_sizes(6);
  // int, not bool: vector<bool> packs bits and concurrent writes to
  // distinct indices would race on the shared words.
  std::vector<int> group_roots(6), global_roots(6);
  auto errors = run_thread_group(6, [&](Communicator& world) {
    GroupAssignment ga = split_groups(world);
    const int r = world.rank();
    modes[r] = ga.mode;
    group_ranks[r] = ga.group_rank;
    group_sizes[r] = ga.group_size;
    group_roots[r] = ga.is_group_root ? 1 : 0;
    global_roots[r] = ga.is_global_root ? 1 : 0;
  });
  require_clean(errors);

  CHECK(modes == std::vector<int>{1, 1, 2, 2, 3, 3});
  CHECK(group_ranks == std::vector<int>{0, 1, 0, 1, 0, 1});
  for (int r = 0; r < 6; ++r) CHECK(group_sizes[r] == 2);
  CHECK(group_roots == std::vector<int>{1, 0, 1, 0, 1, 0});
  CHECK(global_roots == std::vector<int>{1, 0, 0, 0, 0, 0});
}

TEST_CASE("split_groups demands a multiple of three") {
  auto errors = run_thread_group(4, [&](Communicator& world) {
    (void)split_groups(world);
  });
  int failed = 0;
  for (const auto& e : errors) {
    if (!e) continue;
    ++failed;
    try {
      std::rethrow_exception(e);
    } catch (const std::runtime_error& ex) {
      CHECK(std::string(ex.what()).find("multiple of 3") != std::string::npos);
    }
  }
  CHECK(failed == 4);
}

TEST_CASE("distribute_synthetic owns exactly the block slices") {
  // p = 9: three processes per group; mode-1 has 10 slices -> 4,3,3.
  const SyntheticSpec spec = planted_spec({10, 6, 5}, 2, 4.0, 3);
  std::vector<std::size_t> counts(9), starts(9), peaks(9), scratch(9);
  auto errors = run_thread_group(9, [&](Communicator& world) {
    GroupAssignment ga = split_groups(world);
    LocalBlock block = distribute_synthetic(ga, spec);
    const int r = world.rank();
    counts[r] = block.range.count;
    starts[r] = block.range.start;
    peaks[r] = block.peak_slice_count;
    scratch[r] = block.scratch_elems;
  });
  require_clean(errors);

  CHECK(counts[0] == 4);
  CHECK(counts[1] == 3);
  CHECK(counts[2] == 3);
  CHECK(starts == std::vector<std::size_t>{0, 4, 7, 0, 2, 4, 0, 2, 4});
  for (int r = 0; r < 9; ++r) {
    const std::size_t m = r < 3 ? 10 : (r < 6 ? 6 : 5);
    CHECK(peaks[r] <= (m + 2) / 3);  // ceil(m/3)
    CHECK(scratch[r] == 0);          // local regeneration moves no data
  }
}

TEST_CASE("shared-seed regeneration is identical across processes") {
  const SyntheticSpec spec = planted_spec({6, 6, 6}, 2, 3.0, 21);
  std::vector<std::vector<double>> copies(6);
  auto errors = run_thread_group(6, [&](Communicator& world) {
    // Two ranks in different groups produce the same slice bytes.
    if (world.rank() == 1 || world.rank() == 4) {
      copies[world.rank()] = generate_slice(spec, 2, 3).data;
    }
    world.barrier();
  });
  require_clean(errors);
  CHECK_FALSE(copies[1].empty());
  CHECK(copies[1] == copies[4]);
}

TEST_CASE("local eigen matches the sequential eigen matrix bitwise") {
  const SyntheticSpec spec = planted_spec({6, 5, 4}, 2, 8.0, 5);
  auto [tensor, truth] = generate(spec);

  std::array<EigenMatrix, 3> seq;
  for (int mode = 1; mode <= 3; ++mode) {
    seq[mode - 1] = build_eigen_matrix(tensor, mode);
  }

  auto errors = run_thread_group(6, [&](Communicator& world) {
    GroupAssignment ga = split_groups(world);
    LocalBlock block = distribute_synthetic(ga, spec);
    local_eigen(block);
    const EigenMatrix& expect = seq[static_cast<std::size_t>(block.mode - 1)];
    for (std::size_t s = 0; s < block.range.count; ++s) {
      const double* mine = block.local_columns.data() + s * block.vec_len;
      const double* ref = expect.col(block.range.start + s);
      for (std::size_t r = 0; r < block.vec_len; ++r) {
        REQUIRE(mine[r] == ref[r]);
      }
      REQUIRE(block.local_lambdas[s] == expect.lambdas[block.range.start + s]);
    }
  });
  require_clean(errors);
}

TEST_CASE("assemble_v reproduces the sequential V on every member") {
  const SyntheticSpec spec = planted_spec({10, 6, 5}, 2, 6.0, 11);
  auto [tensor, truth] = generate(spec);
  std::array<EigenMatrix, 3> seq;
  for (int mode = 1; mode <= 3; ++mode) {
    seq[mode - 1] = normalize(build_eigen_matrix(tensor, mode));
  }

  for (int p : {3, 9}) {
    auto errors = run_thread_group(p, [&](Communicator& world) {
      GroupAssignment ga = split_groups(world);
      LocalBlock block = distribute_synthetic(ga, spec);
      local_eigen(block);
      const EigenMatrix v = assemble_v(block, *ga.group_comm);
      const EigenMatrix& expect = seq[static_cast<std::size_t>(block.mode - 1)];
      REQUIRE(v.vec_len == expect.vec_len);
      REQUIRE(v.num_cols == expect.num_cols);
      REQUIRE(v.columns == expect.columns);
      REQUIRE(v.lambda_max == expect.lambda_max);
    });
    require_clean(errors);
  }
}

TEST_CASE("file distribution feeds every group the right slices") {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> dist;
  Tensor3 tensor(5, 6, 7);
  for (auto& x : tensor.values()) x = dist(gen);
  const std::string path =
      (std::filesystem::temp_directory_path() / "msc_dist.msc3").string();
  save_tensor(tensor, path);

  auto errors = run_thread_group(6, [&](Communicator& world) {
    GroupAssignment ga = split_groups(world);
    LocalBlock block = distribute_file(world, ga, path);
    for (std::size_t s = 0; s < block.range.count; ++s) {
      const Matrix expect = slice(tensor, block.mode, block.range.start + s);
      REQUIRE(block.slices[s].rows == expect.rows);
      REQUIRE(block.slices[s].cols == expect.cols);
      REQUIRE(block.slices[s].data == expect.data);
    }
    REQUIRE(block.scratch_elems == 6 * 7);  // one mode-1 slice buffer
  });
  require_clean(errors);
  std::remove(path.c_str());
}

TEST_CASE("all-zero tensor raises a coordinated degenerate error") {
  Tensor3 zero(4, 4, 4);
  const std::string path =
      (std::filesystem::temp_directory_path() / "msc_zero.msc3").string();
  save_tensor(zero, path);

  auto errors = run_thread_group(3, [&](Communicator& world) {
    GroupAssignment ga = split_groups(world);
    LocalBlock block = distribute_file(world, ga, path);
    local_eigen(block);
    (void)assemble_v(block, *ga.group_comm);
  });
  int degenerate = 0;
  for (const auto& e : errors) {
    REQUIRE(e);
    try {
      std::rethrow_exception(e);
    } catch (const DegenerateInputError&) {
      ++degenerate;
    }
  }
  CHECK(degenerate == 3);
  std::remove(path.c_str());
}

TEST_CASE("local similarity rows concatenate to the sequential C") {
  const SyntheticSpec spec = planted_spec({10, 6, 5}, 2, 6.0, 13);
  auto [tensor, truth] = generate(spec);
  const ModeResult seq1 = msc_mode(tensor, 1);

  std::vector<Matrix> rows(3);
  std::vector<std::vector<double>> d_parts(3);
  auto errors = run_thread_group(9, [&](Communicator& world) {
    GroupAssignment ga = split_groups(world);
    LocalBlock block = distribute_synthetic(ga, spec);
    local_eigen(block);
    const EigenMatrix v = assemble_v(block, *ga.group_comm);
    const LocalSimilarity ls = local_similarity(block, v);
    for (double di : ls.d) {
      REQUIRE(di >= 0.0);
      REQUIRE(di <= static_cast<double>(block.mode_size));
    }
    if (block.mode == 1) {
      rows[static_cast<std::size_t>(ga.group_rank)] = ls.rows;
      d_parts[static_cast<std::size_t>(ga.group_rank)] = ls.d;
    }
  });
  require_clean(errors);

  std::vector<double> c_concat, d_concat;
  for (int g = 0; g < 3; ++g) {
    c_concat.insert(c_concat.end(), rows[g].data.begin(), rows[g].data.end());
    d_concat.insert(d_concat.end(), d_parts[g].begin(), d_parts[g].end());
  }
  CHECK(c_concat == seq1.sim.data);
  CHECK(d_concat == seq1.d);
}

TEST_CASE("gather_and_select plus gather_result equal the sequential result") {
  const SyntheticSpec spec = planted_spec({12, 10, 8}, 2, 30.0, 17);
  auto [tensor, truth] = generate(spec);
  const TriclusterResult seq = run_msc(tensor);

  for (int p : {3, 6}) {
    std::optional<TriclusterResult> at_root;
    auto errors = run_thread_group(p, [&](Communicator& world) {
      GroupAssignment ga = split_groups(world);
      LocalBlock block = distribute_synthetic(ga, spec);
      local_eigen(block);
      const EigenMatrix v = assemble_v(block, *ga.group_comm);
      const LocalSimilarity ls = local_similarity(block, v);
      std::optional<ModeResult> mine =
          gather_and_select(block, {ls.d.data(), ls.d.size()}, ga, std::nullopt);
      std::optional<double> sim =
          cluster_similarity_distributed(block, ls, ga, mine ? &*mine : nullptr);
      if (mine) mine->cluster_similarity = *sim;
      auto tri = gather_result(world, ga, mine);
      if (tri) at_root = std::move(tri);
    });
    require_clean(errors);

    REQUIRE(at_root.has_value());
    for (int mode = 1; mode <= 3; ++mode) {
      const ModeResult& par_mode = at_root->modes[mode - 1];
      const ModeResult& seq_mode = seq.modes[mode - 1];
      CHECK(par_mode.mode == mode);
      CHECK(par_mode.cluster.indices == seq_mode.cluster.indices);
      CHECK(par_mode.d == seq_mode.d);
      CHECK(par_mode.iterations == seq_mode.iterations);
      CHECK(par_mode.eps == seq_mode.eps);
      CHECK(par_mode.cluster_similarity ==
            doctest::Approx(seq_mode.cluster_similarity).epsilon(1e-12));
    }
  }
}

TEST_CASE("parallel_msc oracle equivalence, ownership and symmetry") {
  const SyntheticSpec spec = planted_spec({12, 10, 8}, 2, 30.0, 19);
  auto [tensor, truth] = generate(spec);
  const TriclusterResult seq = run_msc(tensor);

  for (int p : {3, 6, 12}) {
    std::optional<ParallelOutcome> outcome;
    std::vector<CollectiveCounters> world_counts(p);
    std::vector<CollectiveCounters> group_counts(p);
    std::vector<int> group_of(p);
    std::vector<std::size_t> peak(p), owned_bound(p);

    ParallelConfig config;
    config.synthetic = spec;
    auto errors = run_thread_group(p, [&](Communicator& world) {
      // Re-derive the block to record the ownership bound for this rank.
      GroupAssignment ga = split_groups(world);
      LocalBlock block = distribute_synthetic(ga, spec);
      const int r = world.rank();
      group_of[r] = ga.mode - 1;
      peak[r] = block.peak_slice_count;
      owned_bound[r] =
          (block.mode_size + static_cast<std::size_t>(ga.group_size) - 1) /
          static_cast<std::size_t>(ga.group_size);
      group_counts[r] = ga.group_comm->counters();

      auto out = parallel_msc(world, config);
      if (out) outcome = std::move(out);
      world_counts[r] = world.counters();
    });
    require_clean(errors);

    REQUIRE(outcome.has_value());
    for (int mode = 1; mode <= 3; ++mode) {
      CHECK(outcome->result.modes[mode - 1].cluster.indices ==
            seq.modes[mode - 1].cluster.indices);
      REQUIRE(outcome->result.modes[mode - 1].d.size() ==
              seq.modes[mode - 1].d.size());
      for (std::size_t i = 0; i < seq.modes[mode - 1].d.size(); ++i) {
        CHECK(std::abs(outcome->result.modes[mode - 1].d[i] -
                       seq.modes[mode - 1].d[i]) <= 1e-12);
      }
    }

    // Ownership: no process holds more than its block.
    for (int r = 0; r < p; ++r) CHECK(peak[r] <= owned_bound[r]);

    // Collective-call symmetry on the world communicator.
    for (int r = 1; r < p; ++r) CHECK(world_counts[r] == world_counts[0]);

    // Timings came back for every rank, tagged with its group.
    REQUIRE(outcome->timings.size() == static_cast<std::size_t>(p));
    for (int r = 0; r < p; ++r) {
      CHECK(outcome->timings[r].rank == r);
      CHECK(outcome->timings[r].group == group_of[r]);
      CHECK(outcome->timings[r].phases.total >= 0.0);
    }
  }
}

TEST_CASE("group collective counters agree within each group") {
  const SyntheticSpec spec = planted_spec({9, 8, 7}, 2, 12.0, 23);
  const int p = 6;
  std::vector<CollectiveCounters> counts(p);
  std::vector<int> group_of(p);
  auto errors = run_thread_group(p, [&](Communicator& world) {
    GroupAssignment ga = split_groups(world);
    LocalBlock block = distribute_synthetic(ga, spec);
    local_eigen(block);
    const EigenMatrix v = assemble_v(block, *ga.group_comm);
    const LocalSimilarity ls = local_similarity(block, v);
    std::optional<ModeResult> mine =
        gather_and_select(block, {ls.d.data(), ls.d.size()}, ga, std::nullopt);
    (void)cluster_similarity_distributed(block, ls, ga, mine ? &*mine : nullptr);
    const int r = world.rank();
    counts[r] = ga.group_comm->counters();
    group_of[r] = ga.mode;
  });
  require_clean(errors);
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      if (group_of[a] == group_of[b]) CHECK(counts[a] == counts[b]);
    }
  }
}

TEST_CASE("empty blocks still participate in every collective") {
  // Mode-1 has fewer slices than its group has processes.
  const SyntheticSpec spec = planted_spec({2, 6, 6}, 1, 14.0, 29);
  auto [tensor, truth] = generate(spec);
  const TriclusterResult seq = run_msc(tensor);

  std::optional<ParallelOutcome> outcome;
  ParallelConfig config;
  config.synthetic = spec;
  auto errors = run_thread_group(9, [&](Communicator& world) {
    auto out = parallel_msc(world, config);
    if (out) outcome = std::move(out);
  });
  require_clean(errors);
  REQUIRE(outcome.has_value());
  for (int mode = 1; mode <= 3; ++mode) {
    CHECK(outcome->result.modes[mode - 1].cluster.indices ==
          seq.modes[mode - 1].cluster.indices);
  }
}

TEST_CASE("two identical runs serialize to identical JSON") {
  const SyntheticSpec spec = planted_spec({10, 9, 8}, 2, 20.0, 37);
  ParallelConfig config;
  config.synthetic = spec;

  std::array<std::string, 2> dumps;
  for (auto& dump : dumps) {
    std::optional<ParallelOutcome> outcome;
    auto errors = run_thread_group(6, [&](Communicator& world) {
      auto out = parallel_msc(world, config);
      if (out) outcome = std::move(out);
    });
    require_clean(errors);
    REQUIRE(outcome.has_value());
    dump = tricluster_to_json(outcome->result, std::nullopt).dump();
  }
  CHECK(dumps[0] == dumps[1]);
  CHECK(!dumps[0].empty());
}

TEST_CASE("forked process harness matches the sequential pipeline") {
  const SyntheticSpec spec = planted_spec({9, 8, 7}, 2, 25.0, 41);
  auto [tensor, truth] = generate(spec);
  const TriclusterResult seq = run_msc(tensor);

  const std::string out_path =
      (std::filesystem::temp_directory_path() / "msc_fork_result.json").string();
  std::remove(out_path.c_str());

  ParallelConfig config;
  config.synthetic = spec;
  const int rc = fork_workers(3, [&](Communicator& world) {
    auto outcome = parallel_msc(world, config);
    if (outcome) {
      save_json_file(tricluster_to_json(outcome->result, std::nullopt), out_path);
    }
  });
  REQUIRE(rc == 0);

  const TriclusterResult got = tricluster_from_json(load_json_file(out_path));
  for (int mode = 1; mode <= 3; ++mode) {
    CHECK(got.modes[mode - 1].cluster.indices ==
          seq.modes[mode - 1].cluster.indices);
    CHECK(got.modes[mode - 1].d == seq.modes[mode - 1].d);
  }
  std::remove(out_path.c_str());
}

TEST_CASE("a failing rank aborts the whole job") {
  const int rc = fork_workers(3, [&](Communicator& world) {
    if (world.rank() == 1) throw std::runtime_error("injected failure");
    world.barrier();  // peers block here and must be torn down
    world.barrier();
  });
  CHECK(rc != 0);
}

TEST_CASE("timings CSV carries one line per phase and rank") {
  std::vector<RankTiming> timings(2);
  timings[0] = {0, 0, {0.1, 0.2, 0.3, 0.4, 0.5, 1.5}};
  timings[1] = {1, 2, {0.2, 0.2, 0.2, 0.2, 0.2, 1.0}};
  const std::string path =
      (std::filesystem::temp_directory_path() / "msc_timings_test.csv").string();
  write_timings_csv(path, timings);

  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "rank,group,phase,seconds");
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 12);  // 5 phases + total, per rank
  CHECK(lines[0].rfind("0,0,eigen,", 0) == 0);
  CHECK(lines[5].rfind("0,0,total,", 0) == 0);
  CHECK(lines[6].rfind("1,2,eigen,", 0) == 0);
  std::remove(path.c_str());
}

TEST_CASE("result JSON carries the documented keys and round-trips") {
  const SyntheticSpec spec = planted_spec({10, 9, 8}, 2, 18.0, 51);
  auto [tensor, truth] = generate(spec);
  const TriclusterResult res = run_msc(tensor);
  const nlohmann::json j = tricluster_to_json(res, std::string("t.csv"));

  CHECK(j.at("timings_file") == "t.csv");
  for (const char* key : {"J1", "J2", "J3"}) {
    const auto& mode = j.at(key);
    for (const char* field :
         {"mode", "J", "d", "iterations", "eps", "hypothesis_ok", "sim"}) {
      CHECK(mode.contains(field));
    }
  }
  const TriclusterResult back = tricluster_from_json(j);
  for (int mode = 1; mode <= 3; ++mode) {
    CHECK(back.modes[mode - 1].cluster.indices ==
          res.modes[mode - 1].cluster.indices);
    CHECK(back.modes[mode - 1].d == res.modes[mode - 1].d);
    CHECK(back.modes[mode - 1].eps == res.modes[mode - 1].eps);
  }
}

}  // TEST_SUITE
