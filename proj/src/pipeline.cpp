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

#include "msc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "msc/errors.hpp"

namespace msc {

double theorem_threshold(std::size_t l, double eps, std::size_t m) {
  if (l < 1 || l >= m) {
    throw std::invalid_argument("theorem_threshold requires 1 <= l < m");
  }
  if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
  return static_cast<double>(l) * eps / 2.0 +
         std::sqrt(std::log(static_cast<double>(m - l)));
}

bool check_epsilon_hypothesis(double eps, std::size_t m, std::size_t l) {
  if (l >= m) throw std::invalid_argument("check_epsilon_hypothesis requires l < m");
  return std::sqrt(eps) <= 1.0 / static_cast<double>(m - l);
}

double default_epsilon(std::size_t m) {
  const std::size_t l0 = m / 10;
  if (l0 >= m || m - l0 == 0) {
    throw std::invalid_argument("mode too small for the default eps rule");
  }
  const double inv = 1.0 / static_cast<double>(m - l0);
  return inv * inv;
}

EigenMatrix build_eigen_matrix(const Tensor3& t, int mode,
                               const PowerIterOptions& opts) {
  const std::size_t m = t.dim(mode);
  EigenMatrix em;
  em.num_cols = m;
  em.lambdas.resize(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const Matrix cov = covariance(slice(t, mode, i));
    EigenPair pair;
    try {
      pair = top_eigenpair(cov, opts);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("mode " + std::to_string(mode) + " slice " +
                                 std::to_string(i) + ": " + e.what(),
                             e.last_value, e.last_vector, e.last_residual,
                             e.iterations);
    }
    if (i == 0) {
      em.vec_len = pair.vector.size();
      em.columns.assign(em.vec_len * m, 0.0);
    }
    double* col = em.col(i);
    for (std::size_t r = 0; r < em.vec_len; ++r) col[r] = pair.value * pair.vector[r];
    em.lambdas[i] = pair.value;
    em.lambda_max = std::max(em.lambda_max, pair.value);
  }
  return em;
}

EigenMatrix normalize(EigenMatrix m) {
  if (m.lambda_max <= 0.0) {
    throw DegenerateInputError(
        "all slice covariances are zero; nothing to normalize");
  }
  for (auto& x : m.columns) x /= m.lambda_max;
  for (auto& l : m.lambdas) l /= m.lambda_max;
  m.normalized = true;
  return m;
}

Matrix similarity(const EigenMatrix& v) {
  const std::size_t m = v.num_cols;
  Matrix c(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      c(i, j) = std::abs(dot({v.col(i), v.vec_len}, {v.col(j), v.vec_len}));
    }
  }
  return c;
}

std::vector<double> marginals(const Matrix& c) {
  std::vector<double> d(c.rows, 0.0);
  for (std::size_t i = 0; i < c.rows; ++i) {
    const double* row = c.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < c.cols; ++j) acc += row[j];
    d[i] = acc;
  }
  return d;
}

ClusterSet max_gap_init(const std::vector<double>& d, int mode,
                        bool* degenerate) {
  const std::size_t m = d.size();
  if (m < 2) throw std::invalid_argument("max_gap_init requires at least 2 entries");
  if (degenerate) *degenerate = false;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });

  // Largest gap between consecutive sorted values; first one wins ties.
  std::size_t cut = 0;
  double best = -1.0;
  for (std::size_t k = 1; k < m; ++k) {
    const double gap = d[order[k - 1]] - d[order[k]];
    if (gap > best) {
      best = gap;
      cut = k;
    }
  }

  ClusterSet out;
  out.mode = mode;
  if (best <= 0.0) {
    // All entries equal: no gap exists, fall back to every index.
    if (degenerate) *degenerate = true;
    out.indices = std::move(order);
    std::sort(out.indices.begin(), out.indices.end());
    return out;
  }
  out.indices.assign(order.begin(), order.begin() + cut);
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

RefineOutcome refine(const std::vector<double>& d, ClusterSet j0, double eps) {
  const std::size_t m = d.size();
  RefineOutcome out;
  out.cluster = std::move(j0);
  auto& idx = out.cluster.indices;
  if (idx.empty()) throw std::invalid_argument("refine requires a non-empty cluster");

  while (idx.size() > 1) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    // Ties on the smallest d drop the largest index.
    std::size_t drop_pos = 0;
    for (std::size_t p = 0; p < idx.size(); ++p) {
      const double v = d[idx[p]];
      hi = std::max(hi, v);
      if (v <= lo) {
        lo = v;
        drop_pos = p;
      }
    }
    const double spread = hi - lo;
    if (spread <= 0.0) break;
    const double bound = theorem_threshold(idx.size(), eps, m);
    if (spread <= bound) break;
    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(drop_pos));
    ++out.iterations;
  }
  return out;
}

double mean_cluster_similarity(const Matrix& c,
                               const std::vector<std::size_t>& indices) {
  if (indices.empty()) {
    throw std::invalid_argument("cluster similarity over an empty set");
  }
  double acc = 0.0;
  for (std::size_t i : indices) {
    const double* row = c.row(i);
    for (std::size_t j : indices) acc += row[j];
  }
  const double n = static_cast<double>(indices.size());
  return acc / (n * n);
}

ModeResult msc_mode(const Tensor3& t, int mode, std::optional<double> eps,
                    const PowerIterOptions& opts) {
  ModeResult res;
  res.mode = mode;
  res.m = t.dim(mode);
  res.eps = eps.value_or(default_epsilon(res.m));

  EigenMatrix v = normalize(build_eigen_matrix(t, mode, opts));
  res.sim = similarity(v);
  res.d = marginals(res.sim);

  ClusterSet j0 = max_gap_init(res.d, mode, &res.degenerate_gap);
  RefineOutcome refined = refine(res.d, std::move(j0), res.eps);
  res.cluster = std::move(refined.cluster);
  res.iterations = refined.iterations;
  res.hypothesis_ok =
      res.cluster.indices.size() < res.m
          ? check_epsilon_hypothesis(res.eps, res.m, res.cluster.indices.size())
          : true;
  res.cluster_similarity = mean_cluster_similarity(res.sim, res.cluster.indices);
  return res;
}

TriclusterResult run_msc(const Tensor3& t, std::optional<double> eps,
                         const PowerIterOptions& opts) {
  TriclusterResult out;
  for (int mode = 1; mode <= 3; ++mode) {
    out.modes[mode - 1] = msc_mode(t, mode, eps, opts);
  }
  return out;
}

}  // namespace msc
