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

#include <cstdint>
#include <vector>

#include "msc/matrix.hpp"

namespace msc {

/// Dominant eigenvalue and unit eigenvector of a slice covariance.
struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
};

struct PowerIterOptions {
  double tol = 1e-10;
  // Near-degenerate top pairs of noise covariances (top-edge spacing of
  // a Wishart spectrum shrinks like m^{-2/3}) need tens of thousands of
  // iterations at this tolerance; the budget covers relative gaps down
  // to ~1e-4 at desk scale.
  int max_iter = 200000;
  // One shared start seed for every slice keeps the pipeline exactly
  // equivariant under slice permutations.
  std::uint64_t seed = 0x6d7363;

  bool operator==(const PowerIterOptions&) const = default;
};

/// Gram matrix s^T s of a slice: (cols x cols), symmetric PSD.
Matrix covariance(const Matrix& s);

/// Power iteration for the dominant eigenpair of a symmetric matrix.
/// Returns (lambda, v) with ||c v - lambda v|| <= tol * max(lambda, 1),
/// v unit, and the sign fixed so v's largest-magnitude entry is positive
/// (ties broken by lowest index). The all-zero matrix returns
/// (0, first canonical basis vector). Throws ConvergenceError after
/// max_iter unsuccessful iterations.
EigenPair top_eigenpair(const Matrix& c, const PowerIterOptions& opts = {});

}  // namespace msc
