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

#include "msc/thread_comm.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "msc/errors.hpp"

namespace msc::par {

namespace {

enum class Op : int { kBarrier, kMax, kAllgatherv, kGatherv, kBroadcast, kSplit };

/// Rendezvous engine shared by all ranks of a thread group. One slot per
/// (communicator, per-member call sequence number); SPMD call discipline
/// guarantees matching sequence numbers line up.
class ThreadEngine {
 public:
  explicit ThreadEngine(int world_size) {
    std::vector<int> all(world_size);
    for (int i = 0; i < world_size; ++i) all[i] = i;
    comms_[0] = std::move(all);
  }

  struct MemberView {
    int comm_id;
    int size;
    int rank;
  };

  // Blocks until every member of the communicator contributed, then
  // returns this member's share of the result.
  std::vector<double> collective(int comm_id, int rank, std::uint64_t seq,
                                 Op op, int arg, std::vector<double> payload,
                                 MemberView* split_out) {
    std::unique_lock lock(mu_);
    // An abort only matters if this collective can no longer complete;
    // deposit first so completable operations (e.g. on solo groups)
    // still finish after a peer elsewhere failed.
    const auto key = std::make_pair(comm_id, seq);
    Slot& slot = slots_[key];
    const int group_size = static_cast<int>(comms_.at(comm_id).size());
    if (slot.contrib.empty()) {
      slot.op = op;
      slot.contrib.resize(group_size);
      slot.args.resize(group_size, 0);
      slot.results.resize(group_size);
    }
    if (slot.op != op) {
      abort_locked("mismatched collective operations on one communicator");
      throw CommError("thread group aborted: " + abort_reason_);
    }
    slot.contrib[rank] = std::move(payload);
    slot.args[rank] = arg;
    ++slot.arrived;
    if (slot.arrived == group_size) {
      complete(comm_id, slot);
      cv_.notify_all();
    } else {
      cv_.wait(lock, [&] { return slot.done || aborted_; });
      if (aborted_ && !slot.done) {
        throw CommError("thread group aborted: " + abort_reason_);
      }
    }
    std::vector<double> mine = std::move(slot.results[rank]);
    if (split_out) *split_out = slot.split_views[rank];
    ++slot.taken;
    if (slot.taken == group_size) slots_.erase(key);
    return mine;
  }

  void abort(const std::string& reason) {
    std::lock_guard lock(mu_);
    abort_locked(reason);
  }

 private:
  struct Slot {
    Op op = Op::kBarrier;
    int arrived = 0;
    int taken = 0;
    bool done = false;
    std::vector<std::vector<double>> contrib;
    std::vector<int> args;
    std::vector<std::vector<double>> results;
    std::vector<MemberView> split_views;
  };

  void abort_locked(const std::string& reason) {
    if (!aborted_) {
      aborted_ = true;
      abort_reason_ = reason;
    }
    cv_.notify_all();
  }

  void complete(int comm_id, Slot& slot) {
    const int n = static_cast<int>(slot.contrib.size());
    switch (slot.op) {
      case Op::kBarrier:
        break;
      case Op::kMax: {
        double m = slot.contrib[0][0];
        for (int i = 1; i < n; ++i) m = std::max(m, slot.contrib[i][0]);
        for (auto& r : slot.results) r = {m};
        break;
      }
      case Op::kAllgatherv: {
        std::vector<double> all;
        for (const auto& c : slot.contrib) all.insert(all.end(), c.begin(), c.end());
        for (auto& r : slot.results) r = all;
        break;
      }
      case Op::kGatherv: {
        std::vector<double> all;
        for (const auto& c : slot.contrib) all.insert(all.end(), c.begin(), c.end());
        slot.results[slot.args[0]] = std::move(all);
        break;
      }
      case Op::kBroadcast: {
        for (auto& r : slot.results) r = slot.contrib[slot.args[0]];
        break;
      }
      case Op::kSplit: {
        slot.split_views.resize(n);
        const auto& parent = comms_.at(comm_id);
        std::vector<int> colors(slot.args.begin(), slot.args.end());
        std::vector<int> distinct = colors;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()),
                       distinct.end());
        for (int color : distinct) {
          const int new_id = next_comm_id_++;
          std::vector<int> members;
          for (int i = 0; i < n; ++i) {
            if (colors[i] == color) {
              slot.split_views[i] = {new_id, 0,
                                     static_cast<int>(members.size())};
              members.push_back(parent[i]);
            }
          }
          for (int i = 0; i < n; ++i) {
            if (colors[i] == color) {
              slot.split_views[i].size = static_cast<int>(members.size());
            }
          }
          comms_[new_id] = std::move(members);
        }
        break;
      }
    }
    slot.done = true;
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::map<int, std::vector<int>> comms_;  // comm id -> world ranks, rank order
  std::map<std::pair<int, std::uint64_t>, Slot> slots_;
  int next_comm_id_ = 1;
  bool aborted_ = false;
  std::string abort_reason_;
};

class ThreadCommunicator : public Communicator {
 public:
  ThreadCommunicator(std::shared_ptr<ThreadEngine> engine, int comm_id,
                     int size, int rank)
      : engine_(std::move(engine)), comm_id_(comm_id), size_(size), rank_(rank) {}

  int rank() const override { return rank_; }
  int size() const override { return size_; }

 protected:
  void do_barrier() override {
    engine_->collective(comm_id_, rank_, seq_++, Op::kBarrier, 0, {}, nullptr);
  }

  double do_allreduce_max(double v) override {
    return engine_->collective(comm_id_, rank_, seq_++, Op::kMax, 0, {v},
                               nullptr)[0];
  }

  std::vector<double> do_allgatherv(std::span<const double> local) override {
    return engine_->collective(comm_id_, rank_, seq_++, Op::kAllgatherv, 0,
                               {local.begin(), local.end()}, nullptr);
  }

  std::vector<double> do_gatherv(std::span<const double> local,
                                 int root) override {
    return engine_->collective(comm_id_, rank_, seq_++, Op::kGatherv, root,
                               {local.begin(), local.end()}, nullptr);
  }

  void do_broadcast(std::span<double> buf, int root) override {
    auto out = engine_->collective(comm_id_, rank_, seq_++, Op::kBroadcast, root,
                                   rank_ == root
                                       ? std::vector<double>(buf.begin(), buf.end())
                                       : std::vector<double>(),
                                   nullptr);
    if (out.size() != buf.size()) {
      throw CommError("broadcast size mismatch between members");
    }
    std::copy(out.begin(), out.end(), buf.begin());
  }

  std::unique_ptr<Communicator> do_split(int color) override {
    ThreadEngine::MemberView view{};
    engine_->collective(comm_id_, rank_, seq_++, Op::kSplit, color, {}, &view);
    return std::make_unique<ThreadCommunicator>(engine_, view.comm_id, view.size,
                                                view.rank);
  }

 private:
  std::shared_ptr<ThreadEngine> engine_;
  int comm_id_;
  int size_;
  int rank_;
  std::uint64_t seq_ = 0;
};

}  // namespace

std::vector<std::exception_ptr> run_thread_group(
    int world_size, const std::function<void(Communicator&)>& body) {
  auto engine = std::make_shared<ThreadEngine>(world_size);
  std::vector<std::exception_ptr> errors(world_size);
  std::vector<std::thread> threads;
  threads.reserve(world_size);
  for (int r = 0; r < world_size; ++r) {
    threads.emplace_back([&, r] {
      ThreadCommunicator comm(engine, 0, world_size, r);
      try {
        body(comm);
      } catch (...) {
        errors[r] = std::current_exception();
        engine->abort("rank " + std::to_string(r) + " failed");
      }
    });
  }
  for (auto& t : threads) t.join();
  return errors;
}

}  // namespace msc::par
