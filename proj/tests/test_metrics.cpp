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
#include <random>

#include "msc/metrics.hpp"

using namespace msc;

namespace {

std::array<ClusterSet, 3> sets(std::vector<std::size_t> a,
                               std::vector<std::size_t> b,
                               std::vector<std::size_t> c) {
  return {ClusterSet{1, std::move(a)}, ClusterSet{2, std::move(b)},
          ClusterSet{3, std::move(c)}};
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("recovery rate on hand examples") {
  const auto truth = sets({0, 1}, {0, 1}, {0, 1});
  CHECK(recovery_rate(truth, truth) == 1.0);

  const auto partial = sets({1, 2}, {0, 1}, {0, 1});
  CHECK(recovery_rate(truth, partial) == doctest::Approx((0.5 + 1 + 1) / 3.0));

  const auto disjoint = sets({2, 3}, {2, 3}, {2, 3});
  CHECK(recovery_rate(truth, disjoint) == 0.0);
}

TEST_CASE("recovery rate rejects empty truth") {
  auto truth = sets({0}, {0}, {0});
  truth[1].indices.clear();
  CHECK_THROWS_AS(recovery_rate(truth, sets({0}, {0}, {0})),
                  std::invalid_argument);
}

TEST_CASE("similarity index on hand examples") {
  Matrix unit(3, 3);
  for (int i = 0; i < 3; ++i) unit(i, i) = 1.0;
  const std::array<const Matrix*, 3> singleton_sims = {&unit, &unit, &unit};
  CHECK(similarity_index(singleton_sims, sets({0}, {1}, {2})) == 1.0);

  Matrix pair(2, 2, {1.0, 0.8, 0.8, 1.0});
  const std::array<const Matrix*, 3> pair_sims = {&pair, &pair, &pair};
  CHECK(similarity_index(pair_sims, sets({0, 1}, {0, 1}, {0, 1})) ==
        doctest::Approx(0.9));

  Matrix twin(2, 2, {1.0, 1.0, 1.0, 1.0});  // two identical columns
  const std::array<const Matrix*, 3> twin_sims = {&twin, &twin, &twin};
  CHECK(similarity_index(twin_sims, sets({0, 1}, {0, 1}, {0, 1})) == 1.0);

  CHECK_THROWS_AS(similarity_index(pair_sims, sets({}, {0}, {0})),
                  std::invalid_argument);
}

TEST_CASE("similarity index is invariant under joint relabeling") {
  std::mt19937_64 gen(44);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const std::size_t m = 6;
  Matrix c(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      c(i, j) = c(j, i) = dist(gen);
    }
  }
  const std::vector<std::size_t> perm = {2, 0, 5, 1, 4, 3};
  Matrix cp(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) cp(i, j) = c(perm[i], perm[j]);

  // J under the relabeling i -> position of i in perm.
  const std::vector<std::size_t> j_orig = {0, 2, 5};
  std::vector<std::size_t> j_moved;
  for (std::size_t pos = 0; pos < m; ++pos) {
    for (std::size_t v : j_orig) {
      if (perm[pos] == v) j_moved.push_back(pos);
    }
  }
  std::sort(j_moved.begin(), j_moved.end());

  const std::array<const Matrix*, 3> sims_a = {&c, &c, &c};
  const std::array<const Matrix*, 3> sims_b = {&cp, &cp, &cp};
  CHECK(similarity_index(sims_a, sets(j_orig, j_orig, j_orig)) ==
        doctest::Approx(similarity_index(sims_b, sets(j_moved, j_moved, j_moved)))
            .epsilon(1e-12));
}

TEST_CASE("tw center and scale constants") {
  const auto [mu_small, sigma_small] = tw_center_scale(2, 1);
  CHECK(mu_small == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(sigma_small == doctest::Approx(2.0 * std::cbrt(2.0)).epsilon(1e-14));

  const auto [mu, sigma] = tw_center_scale(100, 100);
  const double a = std::sqrt(99.0), b = std::sqrt(100.0);
  CHECK(mu == doctest::Approx((a + b) * (a + b)).epsilon(1e-14));
  CHECK(mu == doctest::Approx(397.9975).epsilon(1e-6));
  CHECK(sigma ==
        doctest::Approx(std::sqrt(mu) * std::cbrt(1.0 / a + 1.0 / b)).epsilon(1e-14));

  for (std::size_t m2 : {2, 10, 37, 100}) {
    for (std::size_t m3 : {1, 10, 64, 100}) {
      const auto [mm, ss] = tw_center_scale(m2, m3);
      CHECK(mm > 0.0);
      CHECK(ss > 0.0);
    }
  }
  CHECK_THROWS_AS(tw_center_scale(1, 5), std::invalid_argument);
}

TEST_CASE("wishart diagnostic smoke run") {
  const WishartSummary s = wishart_diagnostic(10, 10, 50, 7);
  CHECK(s.samples == 50);
  CHECK(std::isfinite(s.mean));
  CHECK(std::isfinite(s.median));
  CHECK(std::isfinite(s.stddev));
  CHECK(s.min <= s.median);
  CHECK(s.median <= s.max);
  CHECK_THROWS_AS(wishart_diagnostic(5, 10, 10, 1), std::invalid_argument);
}

TEST_CASE("wishart diagnostic spread stays bounded as m grows") {
  double prev_unused = 0.0;
  (void)prev_unused;
  for (std::size_t m : {20, 40, 60}) {
    const WishartSummary s = wishart_diagnostic(m, m, 60, 11);
    CHECK(s.stddev < 5.0);
    CHECK(s.mean > -3.0);
    CHECK(s.mean < 1.0);
  }
  // Rectangular shapes work too.
  const WishartSummary r = wishart_diagnostic(40, 25, 40, 3);
  CHECK(std::isfinite(r.mean));
  CHECK(r.stddev < 5.0);
}

}  // TEST_SUITE
