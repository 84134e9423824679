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

#include "msc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "msc/rng.hpp"

namespace msc {

std::vector<double> indicator_vector(std::size_t m,
                                     const std::vector<std::size_t>& j) {
  if (j.empty()) throw std::invalid_argument("indicator over an empty set");
  std::vector<double> v(m, 0.0);
  const double w = 1.0 / std::sqrt(static_cast<double>(j.size()));
  for (std::size_t idx : j) {
    if (idx >= m) throw std::invalid_argument("indicator index out of range");
    v[idx] = w;
  }
  return v;
}

std::size_t default_cluster_size(const std::array<std::size_t, 3>& dims,
                                 double frac) {
  const std::size_t m = std::min({dims[0], dims[1], dims[2]});
  const auto l = static_cast<std::size_t>(frac * static_cast<double>(m));
  return std::max<std::size_t>(1, l);
}

namespace {

void validate(const SyntheticSpec& spec) {
  for (std::size_t m : spec.dims) {
    if (m == 0) throw std::invalid_argument("dims must be positive");
  }
  const std::size_t m_min = std::min({spec.dims[0], spec.dims[1], spec.dims[2]});
  if (spec.l < 1 || spec.l > m_min) {
    throw std::invalid_argument("cluster size must satisfy 1 <= l <= min(dims)");
  }
  if (spec.gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
}

std::vector<std::size_t> planted(std::size_t l) {
  std::vector<std::size_t> j(l);
  std::iota(j.begin(), j.end(), 0);
  return j;
}

}  // namespace

GroundTruth ground_truth_of(const SyntheticSpec& spec) {
  validate(spec);
  GroundTruth gt;
  gt.j1 = {1, planted(spec.l)};
  gt.j2 = {2, planted(spec.l)};
  gt.j3 = {3, planted(spec.l)};
  gt.gamma = spec.gamma;
  gt.l = spec.l;
  gt.seed = spec.seed;
  gt.dims = spec.dims;
  return gt;
}

double signal_at(const SyntheticSpec& spec, std::size_t i, std::size_t j,
                 std::size_t k) {
  // Planted indices are {0,...,l-1} in every mode, so the indicator
  // factors reduce to a range test.
  if (i >= spec.l || j >= spec.l || k >= spec.l) return 0.0;
  const double w = 1.0 / std::sqrt(static_cast<double>(spec.l));
  return spec.gamma * w * w * w;
}

double entry_at(const SyntheticSpec& spec, std::size_t i, std::size_t j,
                std::size_t k) {
  return signal_at(spec, i, j, k) + rng::normal_at(spec.seed, i, j, k);
}

std::pair<Tensor3, GroundTruth> generate(const SyntheticSpec& spec) {
  GroundTruth gt = ground_truth_of(spec);
  Tensor3 t(spec.dims[0], spec.dims[1], spec.dims[2]);
  for (std::size_t i = 0; i < spec.dims[0]; ++i)
    for (std::size_t j = 0; j < spec.dims[1]; ++j)
      for (std::size_t k = 0; k < spec.dims[2]; ++k)
        t(i, j, k) = entry_at(spec, i, j, k);
  return {std::move(t), std::move(gt)};
}

Matrix generate_slice(const SyntheticSpec& spec, int mode, std::size_t index) {
  validate(spec);
  const auto [m1, m2, m3] = spec.dims;
  switch (mode) {
    case 1: {
      if (index >= m1) throw std::out_of_range("slice index out of bounds");
      Matrix s(m2, m3);
      for (std::size_t j = 0; j < m2; ++j)
        for (std::size_t k = 0; k < m3; ++k) s(j, k) = entry_at(spec, index, j, k);
      return s;
    }
    case 2: {
      if (index >= m2) throw std::out_of_range("slice index out of bounds");
      Matrix s(m1, m3);
      for (std::size_t i = 0; i < m1; ++i)
        for (std::size_t k = 0; k < m3; ++k) s(i, k) = entry_at(spec, i, index, k);
      return s;
    }
    case 3: {
      if (index >= m3) throw std::out_of_range("slice index out of bounds");
      Matrix s(m1, m2);
      for (std::size_t i = 0; i < m1; ++i)
        for (std::size_t j = 0; j < m2; ++j) s(i, j) = entry_at(spec, i, j, index);
      return s;
    }
    default:
      throw std::invalid_argument("mode must be 1, 2 or 3");
  }
}

}  // namespace msc
