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

#include "msc/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "msc/errors.hpp"

namespace msc {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != rows * cols) {
    throw std::invalid_argument("matrix data length does not match shape");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Tensor3::Tensor3(std::size_t m1, std::size_t m2, std::size_t m3)
    : m1_(m1), m2_(m2), m3_(m3), data_(m1 * m2 * m3, 0.0) {
  if (m1 == 0 || m2 == 0 || m3 == 0) {
    throw std::invalid_argument("tensor dims must be positive");
  }
}

Tensor3::Tensor3(std::size_t m1, std::size_t m2, std::size_t m3,
                 std::vector<double> values)
    : m1_(m1), m2_(m2), m3_(m3), data_(std::move(values)) {
  if (m1 == 0 || m2 == 0 || m3 == 0) {
    throw std::invalid_argument("tensor dims must be positive");
  }
  if (data_.size() != m1 * m2 * m3) {
    throw std::invalid_argument("tensor data length does not match dims");
  }
}

std::size_t Tensor3::dim(int mode) const {
  switch (mode) {
    case 1: return m1_;
    case 2: return m2_;
    case 3: return m3_;
    default: throw std::invalid_argument("mode must be 1, 2 or 3");
  }
}

BlockRange block_range(std::size_t m, std::size_t parts, std::size_t rank) {
  if (parts == 0) throw std::invalid_argument("parts must be >= 1");
  if (rank >= parts) throw std::invalid_argument("rank must be < parts");
  const std::size_t q = m / parts;
  const std::size_t r = m % parts;
  BlockRange out;
  out.count = q + (rank < r ? 1 : 0);
  out.start = rank * q + std::min(rank, r);
  return out;
}

Matrix slice(const Tensor3& t, int mode, std::size_t index) {
  const auto [m1, m2, m3] = t.dims();
  if (index >= t.dim(mode)) {
    throw std::out_of_range("slice index out of bounds for mode " +
                            std::to_string(mode));
  }
  switch (mode) {
    case 1: {
      Matrix s(m2, m3);
      for (std::size_t j = 0; j < m2; ++j)
        for (std::size_t k = 0; k < m3; ++k) s(j, k) = t(index, j, k);
      return s;
    }
    case 2: {
      Matrix s(m1, m3);
      for (std::size_t i = 0; i < m1; ++i)
        for (std::size_t k = 0; k < m3; ++k) s(i, k) = t(i, index, k);
      return s;
    }
    default: {
      Matrix s(m1, m2);
      for (std::size_t i = 0; i < m1; ++i)
        for (std::size_t j = 0; j < m2; ++j) s(i, j) = t(i, j, index);
      return s;
    }
  }
}

namespace {

constexpr char kMagic[4] = {'M', 'S', 'C', '3'};

void put_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw FormatError("truncated tensor header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_tensor(const Tensor3& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  const auto d = t.dims();
  for (std::size_t m : d) put_u64_le(out, m);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(t.values().data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  } else {
    for (double x : t.values()) put_u64_le(out, std::bit_cast<std::uint64_t>(x));
  }
  if (!out) throw FormatError("write failed for " + path);
}

struct TensorFileReader::Impl {
  std::ifstream in;
};

TensorFileReader::TensorFileReader(const std::string& path)
    : impl_(std::make_unique<Impl>()), path_(path) {
  impl_->in.open(path, std::ios::binary);
  if (!impl_->in) throw FormatError("cannot open " + path + " for reading");
  char magic[4];
  impl_->in.read(magic, 4);
  if (!impl_->in || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("bad magic bytes in " + path);
  }
  std::uint64_t d[3];
  for (auto& m : d) m = get_u64_le(impl_->in);
  for (auto m : d) {
    if (m == 0) throw FormatError("zero dimension in " + path);
  }
  // Reject headers whose element count cannot be addressed in memory.
  constexpr std::uint64_t kMaxElems = static_cast<std::uint64_t>(1) << 40;
  if (d[0] > kMaxElems / d[1]) throw FormatError("dimension overflow in " + path);
  const std::uint64_t plane = d[0] * d[1];
  if (plane > kMaxElems / d[2]) throw FormatError("dimension overflow in " + path);
  dims_ = {static_cast<std::size_t>(d[0]), static_cast<std::size_t>(d[1]),
           static_cast<std::size_t>(d[2])};
}

TensorFileReader::~TensorFileReader() = default;
TensorFileReader::TensorFileReader(TensorFileReader&&) noexcept = default;
TensorFileReader& TensorFileReader::operator=(TensorFileReader&&) noexcept =
    default;

void TensorFileReader::read_slice(std::vector<double>& buf) {
  if (next_slice_ >= dims_[0]) {
    throw FormatError("read past the last slice of " + path_);
  }
  const std::size_t n = dims_[1] * dims_[2];
  buf.resize(n);
  if constexpr (std::endian::native == std::endian::little) {
    impl_->in.read(reinterpret_cast<char*>(buf.data()),
                   static_cast<std::streamsize>(n * sizeof(double)));
    if (static_cast<std::size_t>(impl_->in.gcount()) != n * sizeof(double)) {
      throw FormatError("truncated tensor payload in " + path_);
    }
  } else {
    for (auto& x : buf) x = std::bit_cast<double>(get_u64_le(impl_->in));
  }
  for (double x : buf) {
    if (!std::isfinite(x)) throw FormatError("non-finite value in " + path_);
  }
  ++next_slice_;
}

void TensorFileReader::finish() {
  if (next_slice_ != dims_[0]) {
    throw FormatError("not all slices of " + path_ + " were read");
  }
  impl_->in.peek();
  if (!impl_->in.eof()) {
    throw FormatError("trailing bytes after tensor payload in " + path_);
  }
}

Tensor3 load_tensor(const std::string& path) {
  TensorFileReader reader(path);
  const auto [m1, m2, m3] = reader.dims();
  Tensor3 t(m1, m2, m3);
  std::vector<double> buf;
  for (std::size_t i = 0; i < m1; ++i) {
    reader.read_slice(buf);
    std::copy(buf.begin(), buf.end(), t.values().begin() + i * m2 * m3);
  }
  reader.finish();
  return t;
}

}  // namespace msc
