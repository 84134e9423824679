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

#include "msc/rng.hpp"

#include <cmath>
#include <numbers>

namespace msc::rng {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                      std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline void round_once(std::array<std::uint32_t, 4>& ctr,
                       const std::array<std::uint32_t, 2>& key) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kPhiloxM4x32A, ctr[0], lo0, hi0);
  mul_hi_lo(kPhiloxM4x32B, ctr[2], lo1, hi1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kPhiloxW32A;
      key[1] += kPhiloxW32B;
    }
    round_once(counter, key);
  }
  return counter;
}

double u64_to_open_unit(std::uint64_t x) {
  // 53 significant bits, shifted into (0,1) so log() is always safe.
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

namespace {

inline std::array<std::uint32_t, 4> block_at(std::uint64_t seed, std::uint64_t a,
                                             std::uint64_t b, std::uint64_t c,
                                             std::uint32_t stream) {
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  // Indices stay below 2^32 at any realistic tensor size; fold the high
  // halves in anyway so nothing silently aliases.
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(a) ^ static_cast<std::uint32_t>(b >> 32),
      static_cast<std::uint32_t>(b) ^ static_cast<std::uint32_t>(c >> 32),
      static_cast<std::uint32_t>(c) ^ static_cast<std::uint32_t>(a >> 32),
      stream};
  return philox4x32(key, ctr);
}

}  // namespace

double normal_at(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                 std::uint64_t c, std::uint32_t stream) {
  const auto w = block_at(seed, a, b, c, stream);
  const std::uint64_t x0 = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
  const std::uint64_t x1 = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
  const double u1 = u64_to_open_unit(x0);
  const double u2 = u64_to_open_unit(x1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double symmetric_uniform_at(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b, std::uint64_t c,
                            std::uint32_t stream) {
  const auto w = block_at(seed, a, b, c, stream);
  const std::uint64_t x0 = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
  return 2.0 * u64_to_open_unit(x0) - 1.0;
}

std::vector<double> unit_start_vector(std::uint64_t seed, std::size_t n) {
  std::vector<double> v(n);
  double ss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    v[t] = symmetric_uniform_at(seed, t, 0, 0, kStreamStartVector);
    ss += v[t] * v[t];
  }
  const double nrm = std::sqrt(ss);
  if (nrm == 0.0) {
    if (!v.empty()) v[0] = 1.0;
    return v;
  }
  for (auto& x : v) x /= nrm;
  return v;
}

}  // namespace msc::rng
