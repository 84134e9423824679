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
#include <optional>
#include <string>
#include <vector>

#include "msc/parallel.hpp"
#include "msc/synthetic.hpp"

namespace msc::bench {

/// One full run's bookkeeping: configuration, wall-clock seconds of the
/// clustering itself (generation excluded, per phase for SPMD runs) and
/// the quality metrics.
struct BenchRecord {
  std::array<std::size_t, 3> dims{};
  int p = 1;  // 1 means sequential
  double gamma = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  double seconds = 0.0;
  par::PhaseTimings phases;  // zero except `total` for sequential runs
  double rec = 0.0;
  double sim = 0.0;
};

std::vector<double> log_spaced(double lo, double hi, std::size_t n);

struct GammaSweepConfig {
  std::array<std::size_t, 3> dims{};
  std::size_t l = 0;  // 0 means the 10% default
  std::vector<double> gammas;
  std::size_t reps = 10;
  std::optional<double> eps;
  std::uint64_t seed = 1;
  int np = 0;  // 0 sequential, otherwise an SPMD job with np processes
};

struct GammaRow {
  double gamma = 0.0;
  double rec_mean = 0.0;
  double rec_std = 0.0;
  double sim_mean = 0.0;
  double sim_std = 0.0;
};

/// For every gamma, run `reps` noise resamples (seed incremented each
/// time) and aggregate recovery rate and similarity index. When
/// `records` is given, one BenchRecord per run is appended to it.
std::vector<GammaRow> run_experiment_gamma_sweep(
    const GammaSweepConfig& config, std::vector<BenchRecord>* records = nullptr);

void write_gamma_csv(const std::string& path, const std::vector<GammaRow>& rows);
std::vector<GammaRow> read_gamma_csv(const std::string& path);

struct ScalingConfig {
  std::vector<std::array<std::size_t, 3>> dims_list;
  std::vector<int> procs;  // multiples of 3; a sequential baseline always runs
  std::size_t reps = 3;
  double gamma = 0.0;  // 0 means per-size default: the first mode dimension
  std::size_t l = 0;
  std::optional<double> eps;
  std::uint64_t seed = 1;
};

struct ScalingRow {
  std::array<std::size_t, 3> dims{};
  int p = 1;
  double seconds_mean = 0.0;
  double seconds_std = 0.0;
  double speedup_vs_sequential = 1.0;
};

/// Sequential baseline plus one row per process count. Parallel runs go
/// through the multi-process harness; times cover the clustering
/// pipeline only, so sequential and parallel spans are comparable.
std::vector<ScalingRow> run_experiment_scaling(const ScalingConfig& config);

void write_scaling_csv(const std::string& path, const std::vector<ScalingRow>& rows);
std::vector<ScalingRow> read_scaling_csv(const std::string& path);

/// One SPMD run on forked workers. Returns the root's view: quality
/// metrics against the generator's ground truth, the slowest rank's
/// pipeline time and the per-phase maxima across ranks.
struct ParallelRunStats {
  double rec = 0.0;
  double sim = 0.0;
  double seconds = 0.0;
  par::PhaseTimings phases;
};
ParallelRunStats run_parallel_job(int np, const SyntheticSpec& spec,
                                  std::optional<double> eps);

}  // namespace msc::bench
