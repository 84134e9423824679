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

#include "msc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "msc/errors.hpp"
#include "msc/rng.hpp"

namespace msc {

Matrix covariance(const Matrix& s) {
  if (s.empty()) throw std::invalid_argument("covariance of empty slice");
  const std::size_t n = s.cols;
  Matrix c(n, n);
  // Upper triangle with contiguous inner loops, then mirror. The mirror
  // keeps the result exactly symmetric.
  for (std::size_t r = 0; r < s.rows; ++r) {
    const double* row = s.row(r);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = row[j];
      if (a == 0.0) continue;
      double* out = c.row(j);
      for (std::size_t k = j; k < n; ++k) out[k] += a * row[k];
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < j; ++k) c(j, k) = c(k, j);
  return c;
}

namespace {

void fix_sign(std::vector<double>& v) {
  std::size_t arg = 0;
  double best = std::abs(v[0]);
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (v[arg] < 0.0) {
    for (auto& x : v) x = -x;
  }
}

void matvec(const Matrix& c, const std::vector<double>& x,
            std::vector<double>& y) {
  const std::size_t n = c.rows;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = dot({c.row(i), n}, {x.data(), n});
  }
}

}  // namespace

EigenPair top_eigenpair(const Matrix& c, const PowerIterOptions& opts) {
  if (c.rows != c.cols || c.rows == 0) {
    throw std::invalid_argument("top_eigenpair requires a square matrix");
  }
  if (opts.tol <= 0.0) throw std::invalid_argument("tol must be positive");
  const std::size_t n = c.rows;

  const bool all_zero =
      std::all_of(c.data.begin(), c.data.end(), [](double x) { return x == 0.0; });
  if (all_zero) {
    std::vector<double> e1(n, 0.0);
    e1[0] = 1.0;
    return {0.0, std::move(e1)};
  }

  std::vector<double> x = rng::unit_start_vector(opts.seed, n);
  std::vector<double> y(n, 0.0);
  double lambda = 0.0;
  double residual = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    matvec(c, x, y);
    lambda = dot({x.data(), n}, {y.data(), n});
    double rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[i] - lambda * x[i];
      rr += d * d;
    }
    residual = std::sqrt(rr);
    if (residual <= opts.tol * std::max(lambda, 1.0)) {
      fix_sign(x);
      return {lambda, std::move(x)};
    }
    const double ny = norm2({y.data(), n});
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
  }
  throw ConvergenceError("power iteration did not converge after " +
                             std::to_string(opts.max_iter) + " iterations",
                         lambda, std::move(x), residual, opts.max_iter);
}

}  // namespace msc
