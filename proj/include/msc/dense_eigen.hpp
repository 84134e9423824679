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

#include <vector>

#include "msc/matrix.hpp"

namespace msc {

/// Full spectrum of a symmetric matrix by cyclic Jacobi rotations,
/// sorted descending. Independent of the power-iteration path; used as
/// its correctness oracle and by the Wishart diagnostic.
std::vector<double> jacobi_eigenvalues(Matrix a, int max_sweeps = 64);

/// Convenience: largest eigenvalue of a symmetric matrix.
double jacobi_top_eigenvalue(const Matrix& a);

}  // namespace msc
