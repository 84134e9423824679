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

#include "msc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "msc/dense_eigen.hpp"
#include "msc/rng.hpp"

namespace msc {

double recovery_rate(const std::array<ClusterSet, 3>& truth,
                     const std::array<ClusterSet, 3>& found,
                     std::array<double, 3>* per_mode) {
  double acc = 0.0;
  for (int m = 0; m < 3; ++m) {
    const auto& t = truth[m].indices;
    const auto& f = found[m].indices;
    if (t.empty()) throw std::invalid_argument("empty ground-truth cluster");
    std::vector<std::size_t> common;
    std::set_intersection(t.begin(), t.end(), f.begin(), f.end(),
                          std::back_inserter(common));
    const double r =
        static_cast<double>(common.size()) / static_cast<double>(t.size());
    if (per_mode) (*per_mode)[m] = r;
    acc += r;
  }
  return acc / 3.0;
}

double similarity_index(const std::array<const Matrix*, 3>& sims,
                        const std::array<ClusterSet, 3>& found,
                        std::array<double, 3>* per_mode) {
  double acc = 0.0;
  for (int m = 0; m < 3; ++m) {
    const auto& f = found[m].indices;
    if (f.empty()) throw std::invalid_argument("empty found cluster");
    const double s = mean_cluster_similarity(*sims[m], f);
    if (per_mode) (*per_mode)[m] = s;
    acc += s;
  }
  return acc / 3.0;
}

QualityReport evaluate(const GroundTruth& truth, const TriclusterResult& result) {
  QualityReport q;
  const std::array<ClusterSet, 3> t = {truth.j1, truth.j2, truth.j3};
  const std::array<ClusterSet, 3> f = {result.modes[0].cluster,
                                       result.modes[1].cluster,
                                       result.modes[2].cluster};
  q.rec = recovery_rate(t, f, &q.rec_per_mode);
  const std::array<const Matrix*, 3> sims = {&result.modes[0].sim,
                                             &result.modes[1].sim,
                                             &result.modes[2].sim};
  q.sim = similarity_index(sims, f, &q.sim_per_mode);
  return q;
}

std::pair<double, double> tw_center_scale(std::size_t m2, std::size_t m3) {
  if (m2 < 2 || m3 < 1) {
    throw std::invalid_argument("tw_center_scale requires m2 >= 2, m3 >= 1");
  }
  const double a = std::sqrt(static_cast<double>(m2 - 1));
  const double b = std::sqrt(static_cast<double>(m3));
  const double mu = (a + b) * (a + b);
  const double sigma = std::sqrt(mu) * std::cbrt(1.0 / a + 1.0 / b);
  return {mu, sigma};
}

WishartSummary wishart_diagnostic(std::size_t m2, std::size_t m3,
                                  std::size_t n_samples, std::uint64_t seed) {
  if (m2 < 10 || m3 < 10) {
    throw std::invalid_argument(
        "wishart_diagnostic expects m2, m3 >= 10 (below that the "
        "centering approximation is poor)");
  }
  if (n_samples == 0) throw std::invalid_argument("need at least one sample");

  const auto [mu, sigma] = tw_center_scale(m2, m3);
  std::vector<double> std_vals(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    Matrix z(m2, m3);
    for (std::size_t i = 0; i < m2; ++i)
      for (std::size_t j = 0; j < m3; ++j)
        z(i, j) = rng::normal_at(seed + s, i, j, 0);
    const double top = jacobi_top_eigenvalue(covariance(z));
    std_vals[s] = (top - mu) / sigma;
  }

  WishartSummary out;
  out.samples = n_samples;
  double sum = 0.0;
  for (double v : std_vals) sum += v;
  out.mean = sum / static_cast<double>(n_samples);
  double ss = 0.0;
  for (double v : std_vals) ss += (v - out.mean) * (v - out.mean);
  out.stddev = n_samples > 1
                   ? std::sqrt(ss / static_cast<double>(n_samples - 1))
                   : 0.0;
  std::sort(std_vals.begin(), std_vals.end());
  out.min = std_vals.front();
  out.max = std_vals.back();
  out.median = n_samples % 2 == 1
                   ? std_vals[n_samples / 2]
                   : 0.5 * (std_vals[n_samples / 2 - 1] + std_vals[n_samples / 2]);
  return out;
}

}  // namespace msc
