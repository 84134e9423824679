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

#include <cstdio>
#include <filesystem>

#include "msc/bench.hpp"

using namespace msc;
using namespace msc::bench;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("log_spaced spans the range geometrically") {
  const auto g = log_spaced(10.0, 1000.0, 10);
  REQUIRE(g.size() == 10);
  CHECK(g.front() == doctest::Approx(10.0));
  CHECK(g.back() == doctest::Approx(1000.0));
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-9));
  }
  CHECK(log_spaced(5.0, 5.0, 1).size() == 1);
  CHECK_THROWS_AS(log_spaced(0.0, 10.0, 3), std::invalid_argument);
}

TEST_CASE("gamma sweep produces bounded metrics and a lossless CSV") {
  GammaSweepConfig config;
  config.dims = {16, 16, 16};
  config.l = 2;
  config.gammas = {0.0, 60.0};
  config.reps = 2;
  config.seed = 5;

  const auto rows = run_experiment_gamma_sweep(config);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.rec_mean >= 0.0);
    CHECK(r.rec_mean <= 1.0);
    CHECK(r.sim_mean >= 0.0);
    CHECK(r.sim_mean <= 1.0 + 1e-12);
    CHECK(r.rec_std >= 0.0);
    CHECK(r.sim_std >= 0.0);
  }
  // A strong signal must recover the planted cluster here.
  CHECK(rows[1].rec_mean == 1.0);

  const std::string path = temp_path("msc_gamma.csv");
  write_gamma_csv(path, rows);
  const auto back = read_gamma_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].gamma == rows[i].gamma);
    CHECK(back[i].rec_mean == rows[i].rec_mean);
    CHECK(back[i].rec_std == rows[i].rec_std);
    CHECK(back[i].sim_mean == rows[i].sim_mean);
    CHECK(back[i].sim_std == rows[i].sim_std);
  }
  std::remove(path.c_str());
}

TEST_CASE("scaling experiment emits a sequential baseline and speedups") {
  ScalingConfig config;
  config.dims_list = {{12, 12, 12}};
  config.procs = {3};
  config.reps = 1;
  config.gamma = 20.0;
  config.l = 2;
  config.seed = 9;

  const auto rows = run_experiment_scaling(config);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].p == 1);
  CHECK(rows[0].speedup_vs_sequential == 1.0);
  CHECK(rows[1].p == 3);
  CHECK(rows[0].seconds_mean >= 0.0);
  CHECK(rows[1].seconds_mean > 0.0);
  CHECK(rows[1].speedup_vs_sequential ==
        doctest::Approx(rows[0].seconds_mean / rows[1].seconds_mean));

  const std::string path = temp_path("msc_scaling.csv");
  write_scaling_csv(path, rows);
  const auto back = read_scaling_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].dims == rows[i].dims);
    CHECK(back[i].p == rows[i].p);
    CHECK(back[i].seconds_mean == rows[i].seconds_mean);
    CHECK(back[i].seconds_std == rows[i].seconds_std);
    CHECK(back[i].speedup_vs_sequential == rows[i].speedup_vs_sequential);
  }
  std::remove(path.c_str());
}

TEST_CASE("parallel job stats are sane") {
  SyntheticSpec spec;
  spec.dims = {9, 9, 9};
  spec.l = 1;
  spec.gamma = 15.0;
  spec.seed = 3;
  const ParallelRunStats stats = run_parallel_job(3, spec, std::nullopt);
  CHECK(stats.rec >= 0.0);
  CHECK(stats.rec <= 1.0);
  CHECK(stats.sim >= 0.0);
  CHECK(stats.sim <= 1.0 + 1e-12);
  CHECK(stats.seconds >= 0.0);
}

}  // TEST_SUITE
