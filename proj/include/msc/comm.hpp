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

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace msc::par {

/// Number of times each collective ran on this member. Every member of a
/// communicator must end a run with identical counters.
struct CollectiveCounters {
  std::size_t barrier = 0;
  std::size_t allreduce_max = 0;
  std::size_t allgatherv = 0;
  std::size_t gatherv = 0;
  std::size_t broadcast = 0;
  std::size_t split = 0;

  bool operator==(const CollectiveCounters&) const = default;
};

/// Abstract SPMD process-group handle. Exactly five collective
/// primitives plus split; collectives must be called by every member of
/// the group, in the same order. Implementations: an in-process thread
/// harness (testing) and a socket hub spanning real processes.
class Communicator {
 public:
  virtual ~Communicator() = default;

  virtual int rank() const = 0;
  virtual int size() const = 0;

  void barrier();
  double allreduce_max(double v);
  /// Concatenation of every member's contribution, rank order, on all
  /// members. Contributions may differ in length (including zero).
  std::vector<double> allgatherv(std::span<const double> local);
  /// Same concatenation delivered only to `root`; others get {}.
  std::vector<double> gatherv(std::span<const double> local, int root);
  /// Root's buffer copied into everyone's. All members pass equal sizes.
  void broadcast(std::span<double> buf, int root);
  /// Partition members by color. Members of the new communicator keep
  /// their relative rank order.
  std::unique_ptr<Communicator> split(int color);

  const CollectiveCounters& counters() const { return counters_; }

 protected:
  virtual void do_barrier() = 0;
  virtual double do_allreduce_max(double v) = 0;
  virtual std::vector<double> do_allgatherv(std::span<const double> local) = 0;
  virtual std::vector<double> do_gatherv(std::span<const double> local, int root) = 0;
  virtual void do_broadcast(std::span<double> buf, int root) = 0;
  virtual std::unique_ptr<Communicator> do_split(int color) = 0;

  CollectiveCounters counters_;
};

/// Variable-length broadcast built from two fixed-size broadcasts
/// (length, then payload). Root's data is returned on every member.
std::vector<double> broadcast_vector(Communicator& comm,
                                     std::vector<double> data, int root);

}  // namespace msc::par
