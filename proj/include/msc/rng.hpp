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
#include <cstdint>
#include <vector>

namespace msc::rng {

// Stream tags keep independent uses of the same seed from colliding.
inline constexpr std::uint32_t kStreamNoise = 0x4e4f4953;       // tensor noise entries
inline constexpr std::uint32_t kStreamStartVector = 0x50575354; // power-iteration starts

/// Philox4x32-10 counter-based generator: a pure function from
/// (key, counter) to four 32-bit words, so any entry of a random field
/// can be produced independently on any process.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter);

/// Uniform double in the open interval (0, 1) from one 64-bit word.
double u64_to_open_unit(std::uint64_t x);

/// Standard normal draw addressed by (seed, a, b, c, stream). Uses one
/// Philox block and the Box-Muller transform; deterministic everywhere.
double normal_at(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                 std::uint64_t c, std::uint32_t stream = kStreamNoise);

/// Uniform draw in [-1, 1) addressed the same way.
double symmetric_uniform_at(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b, std::uint64_t c,
                            std::uint32_t stream);

/// Deterministic pseudo-random unit vector of length n for the given seed.
std::vector<double> unit_start_vector(std::uint64_t seed, std::size_t n);

}  // namespace msc::rng
