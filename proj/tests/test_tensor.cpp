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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "msc/errors.hpp"
#include "msc/tensor.hpp"

using namespace msc;

namespace {

Tensor3 iota_tensor(std::size_t m1, std::size_t m2, std::size_t m3) {
  Tensor3 t(m1, m2, m3);
  for (std::size_t i = 0; i < t.size(); ++i) t.values()[i] = static_cast<double>(i);
  return t;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("tensor") {

TEST_CASE("slice reads the documented layout") {
  const Tensor3 t = iota_tensor(2, 2, 2);

  const Matrix s1 = slice(t, 1, 0);
  CHECK(s1.rows == 2);
  CHECK(s1.cols == 2);
  CHECK(s1(0, 0) == 0.0);
  CHECK(s1(0, 1) == 1.0);
  CHECK(s1(1, 0) == 2.0);
  CHECK(s1(1, 1) == 3.0);

  // Offsets (i*m2 + j)*m3 + 1 enumerated by hand: 1, 3, 5, 7.
  const Matrix s3 = slice(t, 3, 1);
  CHECK(s3(0, 0) == 1.0);
  CHECK(s3(0, 1) == 3.0);
  CHECK(s3(1, 0) == 5.0);
  CHECK(s3(1, 1) == 7.0);

  const Matrix s2 = slice(t, 2, 1);
  CHECK(s2.rows == 2);  // m1
  CHECK(s2.cols == 2);  // m3
  CHECK(s2(0, 0) == 2.0);
  CHECK(s2(1, 1) == 7.0);
}

TEST_CASE("slice rejects out-of-bounds indices") {
  const Tensor3 t = iota_tensor(2, 2, 2);
  CHECK_THROWS_AS(slice(t, 2, 5), std::out_of_range);
  CHECK_THROWS_AS(slice(t, 1, 2), std::out_of_range);
  CHECK_THROWS_AS(slice(t, 4, 0), std::invalid_argument);
}

TEST_CASE("slices of every mode reassemble the tensor") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> dist;
  Tensor3 t(3, 4, 5);
  for (auto& x : t.values()) x = dist(gen);

  for (int mode = 1; mode <= 3; ++mode) {
    Tensor3 rebuilt(3, 4, 5);
    for (std::size_t idx = 0; idx < t.dim(mode); ++idx) {
      const Matrix s = slice(t, mode, idx);
      for (std::size_t r = 0; r < s.rows; ++r) {
        for (std::size_t c = 0; c < s.cols; ++c) {
          if (mode == 1) rebuilt(idx, r, c) = s(r, c);
          if (mode == 2) rebuilt(r, idx, c) = s(r, c);
          if (mode == 3) rebuilt(r, c, idx) = s(r, c);
        }
      }
    }
    CHECK(rebuilt.values() == t.values());
  }
}

TEST_CASE("block_range follows the remainder-first rule") {
  CHECK(block_range(10, 3, 0).start == 0);
  CHECK(block_range(10, 3, 0).count == 4);
  CHECK(block_range(10, 3, 2).start == 7);
  CHECK(block_range(10, 3, 2).count == 3);
  CHECK(block_range(6, 6, 5).start == 5);
  CHECK(block_range(6, 6, 5).count == 1);
  // More parts than slices: trailing ranks own nothing.
  CHECK(block_range(2, 5, 4).count == 0);
}

TEST_CASE("block_range partitions exactly for all m <= 64, parts <= 16") {
  for (std::size_t m = 1; m <= 64; ++m) {
    for (std::size_t parts = 1; parts <= 16; ++parts) {
      std::size_t next = 0;
      std::size_t largest = 0, smallest = m;
      for (std::size_t rank = 0; rank < parts; ++rank) {
        const BlockRange b = block_range(m, parts, rank);
        REQUIRE(b.start == next);
        next += b.count;
        largest = std::max(largest, b.count);
        smallest = std::min(smallest, b.count);
      }
      REQUIRE(next == m);
      REQUIRE(largest - smallest <= 1);
    }
  }
}

TEST_CASE("save/load round-trip is bit-exact") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> dist;
  Tensor3 t(3, 4, 5);
  for (auto& x : t.values()) x = dist(gen);

  const std::string path = temp_path("msc_roundtrip.msc3");
  save_tensor(t, path);
  const Tensor3 back = load_tensor(path);
  CHECK(back.dims() == t.dims());
  CHECK(back.values() == t.values());
  std::remove(path.c_str());
}

TEST_CASE("load rejects wrong magic") {
  const std::string path = temp_path("msc_badmagic.msc3");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE" << std::string(100, '\0');
  }
  CHECK_THROWS_AS(load_tensor(path), FormatError);
  std::remove(path.c_str());
}

TEST_CASE("load rejects truncated payload") {
  const std::string path = temp_path("msc_trunc.msc3");
  {
    Tensor3 t(2, 2, 2);
    save_tensor(t, path);
    std::filesystem::resize_file(path, 4 + 24 + 7 * 8);  // 7 of 8 values
  }
  CHECK_THROWS_AS(load_tensor(path), FormatError);
  std::remove(path.c_str());
}

TEST_CASE("load rejects trailing bytes and absurd headers") {
  const std::string path = temp_path("msc_trailing.msc3");
  {
    Tensor3 t(2, 2, 2);
    save_tensor(t, path);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << "junk";
  }
  CHECK_THROWS_AS(load_tensor(path), FormatError);

  {
    std::ofstream out(path, std::ios::binary);
    out << "MSC3";
    for (int d = 0; d < 3; ++d) {
      const std::uint64_t huge = ~std::uint64_t{0};
      out.write(reinterpret_cast<const char*>(&huge), 8);
    }
  }
  CHECK_THROWS_AS(load_tensor(path), FormatError);
  std::remove(path.c_str());
}

}  // TEST_SUITE
