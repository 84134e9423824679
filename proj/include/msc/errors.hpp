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

#include <stdexcept>
#include <string>
#include <vector>

namespace msc {

/// Malformed, truncated or otherwise unreadable tensor file.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Power iteration exhausted its iteration budget. Carries the last
/// iterate so callers can inspect how close it got.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double value,
                   std::vector<double> vec, double residual, int iterations)
      : std::runtime_error(what),
        last_value(value),
        last_vector(std::move(vec)),
        last_residual(residual),
        iterations(iterations) {}

  double last_value;
  std::vector<double> last_vector;
  double last_residual;
  int iterations;
};

/// All slice covariances are zero: the eigen matrix cannot be normalized.
class DegenerateInputError : public std::runtime_error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A collective operation failed (peer disappeared, protocol mismatch).
class CommError : public std::runtime_error {
 public:
  explicit CommError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace msc
