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
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "msc/matrix.hpp"

namespace msc {

/// Dense 3rd-order tensor. Entry (i,j,k) lives at linear offset
/// (i*m2 + j)*m3 + k, so mode-1 slices are contiguous. Treat instances
/// as immutable once filled; concurrent reads are safe.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t m1, std::size_t m2, std::size_t m3);
  Tensor3(std::size_t m1, std::size_t m2, std::size_t m3,
          std::vector<double> values);

  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * m2_ + j) * m3_ + k];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * m2_ + j) * m3_ + k];
  }

  std::array<std::size_t, 3> dims() const { return {m1_, m2_, m3_}; }
  /// Size of the given mode, 1-based.
  std::size_t dim(int mode) const;
  std::size_t size() const { return data_.size(); }
  const std::vector<double>& values() const { return data_; }
  std::vector<double>& values() { return data_; }

 private:
  std::size_t m1_ = 0, m2_ = 0, m3_ = 0;
  std::vector<double> data_;
};

/// Contiguous block of slice indices owned by one process.
struct BlockRange {
  std::size_t start = 0;
  std::size_t count = 0;
};

/// Split [0, m) into `parts` contiguous blocks ordered by rank. The first
/// (m mod parts) ranks get one extra slice, so block sizes differ by at
/// most one. parts > m is allowed and yields empty blocks.
BlockRange block_range(std::size_t m, std::size_t parts, std::size_t rank);

/// Copy the index-th slice of the given mode out of the tensor. Shapes:
/// mode 1 -> (m2 x m3), mode 2 -> (m1 x m3), mode 3 -> (m1 x m2); the row
/// index is always the first remaining mode in (1,2,3) order.
Matrix slice(const Tensor3& t, int mode, std::size_t index);

/// Binary tensor file: magic "MSC3", three little-endian uint64 dims,
/// then m1*m2*m3 little-endian IEEE-754 doubles in layout order.
void save_tensor(const Tensor3& t, const std::string& path);
Tensor3 load_tensor(const std::string& path);

/// Streaming reader for the same format: header on construction, then
/// one mode-1 slice (m2*m3 values) per read_slice call. finish() checks
/// the payload ended exactly where the header promised.
class TensorFileReader {
 public:
  explicit TensorFileReader(const std::string& path);
  ~TensorFileReader();
  TensorFileReader(TensorFileReader&&) noexcept;
  TensorFileReader& operator=(TensorFileReader&&) noexcept;

  std::array<std::size_t, 3> dims() const { return dims_; }
  void read_slice(std::vector<double>& buf);
  void finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::array<std::size_t, 3> dims_{};
  std::size_t next_slice_ = 0;
  std::string path_;
};

}  // namespace msc
