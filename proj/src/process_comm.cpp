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

#include "msc/process_comm.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <map>
#include <vector>

#include "msc/errors.hpp"

namespace msc::par {

namespace {

constexpr std::uint32_t kHelloMagic = 0x4D534357;  // "MSCW"

enum class Op : std::uint32_t {
  kBarrier = 1,
  kMax,
  kAllgatherv,
  kGatherv,
  kBroadcast,
  kSplit,
};

struct MsgHeader {
  std::uint32_t op = 0;
  std::int32_t comm_id = 0;
  std::int32_t arg = 0;  // root for gatherv/broadcast, color for split
  std::uint64_t count = 0;
};

void write_exact(int fd, const void* data, std::size_t n) {
  const char* p = static_cast<const char*>(data);
  while (n > 0) {
    const ssize_t w = ::write(fd, p, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw CommError(std::string("write failed: ") + std::strerror(errno));
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

void read_exact(int fd, void* data, std::size_t n) {
  char* p = static_cast<char*>(data);
  while (n > 0) {
    const ssize_t r = ::read(fd, p, n);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw CommError(std::string("read failed: ") + std::strerror(errno));
    }
    if (r == 0) throw CommError("connection closed by peer");
    p += r;
    n -= static_cast<std::size_t>(r);
  }
}

/// Worker endpoint: one fd shared by the world communicator and every
/// communicator split off it; requests carry the communicator id.
struct Channel {
  explicit Channel(int fd) : fd(fd) {}
  ~Channel() {
    if (fd >= 0) ::close(fd);
  }
  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  std::vector<double> request(Op op, int comm_id, int arg,
                              std::span<const double> payload) {
    MsgHeader h{};
    h.op = static_cast<std::uint32_t>(op);
    h.comm_id = comm_id;
    h.arg = arg;
    h.count = payload.size();
    write_exact(fd, &h, sizeof(h));
    if (!payload.empty()) {
      write_exact(fd, payload.data(), payload.size() * sizeof(double));
    }
    std::uint64_t count = 0;
    read_exact(fd, &count, sizeof(count));
    std::vector<double> out(count);
    if (count > 0) read_exact(fd, out.data(), count * sizeof(double));
    return out;
  }

  int fd;
};

class PipeCommunicator : public Communicator {
 public:
  PipeCommunicator(std::shared_ptr<Channel> ch, int comm_id, int size, int rank)
      : channel_(std::move(ch)), comm_id_(comm_id), size_(size), rank_(rank) {}

  int rank() const override { return rank_; }
  int size() const override { return size_; }

 protected:
  void do_barrier() override {
    channel_->request(Op::kBarrier, comm_id_, 0, {});
  }

  double do_allreduce_max(double v) override {
    return channel_->request(Op::kMax, comm_id_, 0, {&v, 1})[0];
  }

  std::vector<double> do_allgatherv(std::span<const double> local) override {
    return channel_->request(Op::kAllgatherv, comm_id_, 0, local);
  }

  std::vector<double> do_gatherv(std::span<const double> local, int root) override {
    return channel_->request(Op::kGatherv, comm_id_, root, local);
  }

  void do_broadcast(std::span<double> buf, int root) override {
    const auto out = channel_->request(
        Op::kBroadcast, comm_id_, root,
        rank_ == root ? std::span<const double>(buf) : std::span<const double>());
    if (out.size() != buf.size()) {
      throw CommError("broadcast size mismatch between members");
    }
    std::copy(out.begin(), out.end(), buf.begin());
  }

  std::unique_ptr<Communicator> do_split(int color) override {
    const auto view = channel_->request(Op::kSplit, comm_id_, color, {});
    if (view.size() != 3) throw CommError("malformed split response");
    return std::make_unique<PipeCommunicator>(channel_, static_cast<int>(view[0]),
                                              static_cast<int>(view[1]),
                                              static_cast<int>(view[2]));
  }

 private:
  std::shared_ptr<Channel> channel_;
  int comm_id_;
  int size_;
  int rank_;
};

/// Star hub. Reads requests from every worker, matches them per
/// communicator, computes the combined result and answers everyone.
class Hub {
 public:
  Hub(std::vector<int> fds_by_rank) : fds_(std::move(fds_by_rank)) {
    const int n = static_cast<int>(fds_.size());
    std::vector<int> world(n);
    for (int i = 0; i < n; ++i) world[i] = i;
    comms_[0] = std::move(world);
    buffers_.resize(n);
    open_.assign(n, true);
  }

  ~Hub() {
    for (int fd : fds_) {
      if (fd >= 0) ::close(fd);
    }
  }

  // Serves until every worker closed its end. Returns 0 on clean
  // shutdown, 1 if a worker vanished mid-collective.
  int serve() {
    const int n = static_cast<int>(fds_.size());
    std::vector<pollfd> pfds(n);
    while (true) {
      int live = 0;
      for (int i = 0; i < n; ++i) {
        pfds[i] = {fds_[i], static_cast<short>(open_[i] ? POLLIN : 0), 0};
        if (open_[i]) ++live;
      }
      if (live == 0) break;
      if (::poll(pfds.data(), pfds.size(), -1) < 0) {
        if (errno == EINTR) continue;
        std::perror("msc hub: poll");
        return 1;
      }
      for (int i = 0; i < n; ++i) {
        if (!open_[i] || !(pfds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        if (!drain(i)) {
          open_[i] = false;
          if (has_pending()) {
            std::fprintf(stderr, "msc hub: rank %d disconnected mid-collective\n", i);
            return 1;
          }
        }
      }
    }
    return 0;
  }

 private:
  struct Pending {
    Op op{};
    int arrived = 0;
    std::vector<bool> present;
    std::vector<int> args;
    std::vector<std::vector<double>> contrib;
  };

  bool has_pending() const {
    for (const auto& [id, p] : pending_) {
      if (p.arrived > 0) return true;
    }
    return false;
  }

  // Reads whatever is available on worker i; false means EOF.
  bool drain(int i) {
    char tmp[65536];
    const ssize_t r = ::read(fds_[i], tmp, sizeof(tmp));
    if (r < 0) {
      if (errno == EINTR || errno == EAGAIN) return true;
      return false;
    }
    if (r == 0) return false;
    auto& buf = buffers_[i];
    buf.insert(buf.end(), tmp, tmp + r);
    while (consume(i)) {
    }
    return true;
  }

  // Parses one complete message from worker i's buffer if present.
  bool consume(int i) {
    auto& buf = buffers_[i];
    if (buf.size() < sizeof(MsgHeader)) return false;
    MsgHeader h;
    std::memcpy(&h, buf.data(), sizeof(h));
    const std::size_t need = sizeof(MsgHeader) + h.count * sizeof(double);
    if (buf.size() < need) return false;
    std::vector<double> payload(h.count);
    if (h.count > 0) {
      std::memcpy(payload.data(), buf.data() + sizeof(MsgHeader),
                  h.count * sizeof(double));
    }
    buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(need));

    const auto it = comms_.find(h.comm_id);
    if (it == comms_.end()) throw CommError("request on unknown communicator");
    const auto& members = it->second;
    const auto pos = std::find(members.begin(), members.end(), i);
    if (pos == members.end()) throw CommError("request from non-member");
    const int group_rank = static_cast<int>(pos - members.begin());

    Pending& p = pending_[h.comm_id];
    if (p.arrived == 0) {
      p.op = static_cast<Op>(h.op);
      p.present.assign(members.size(), false);
      p.args.assign(members.size(), 0);
      p.contrib.assign(members.size(), {});
    } else if (p.op != static_cast<Op>(h.op)) {
      throw CommError("mismatched collective operations on one communicator");
    }
    if (p.present[group_rank]) throw CommError("duplicate contribution");
    p.present[group_rank] = true;
    p.args[group_rank] = h.arg;
    p.contrib[group_rank] = std::move(payload);
    ++p.arrived;
    if (p.arrived == static_cast<int>(members.size())) {
      complete(members, p);
      pending_.erase(h.comm_id);
    }
    return true;
  }

  void respond(int world_rank, std::span<const double> data) {
    const std::uint64_t count = data.size();
    write_exact(fds_[world_rank], &count, sizeof(count));
    if (count > 0) write_exact(fds_[world_rank], data.data(), count * sizeof(double));
  }

  void complete(const std::vector<int>& members, Pending& p) {
    const int n = static_cast<int>(members.size());
    switch (p.op) {
      case Op::kBarrier: {
        for (int g = 0; g < n; ++g) respond(members[g], {});
        break;
      }
      case Op::kMax: {
        double m = p.contrib[0][0];
        for (int g = 1; g < n; ++g) m = std::max(m, p.contrib[g][0]);
        for (int g = 0; g < n; ++g) respond(members[g], {&m, 1});
        break;
      }
      case Op::kAllgatherv: {
        std::vector<double> all;
        for (const auto& c : p.contrib) all.insert(all.end(), c.begin(), c.end());
        for (int g = 0; g < n; ++g) respond(members[g], all);
        break;
      }
      case Op::kGatherv: {
        std::vector<double> all;
        for (const auto& c : p.contrib) all.insert(all.end(), c.begin(), c.end());
        const int root = p.args[0];
        for (int g = 0; g < n; ++g) {
          respond(members[g], g == root ? std::span<const double>(all)
                                        : std::span<const double>());
        }
        break;
      }
      case Op::kBroadcast: {
        const int root = p.args[0];
        for (int g = 0; g < n; ++g) respond(members[g], p.contrib[root]);
        break;
      }
      case Op::kSplit: {
        std::vector<int> distinct(p.args.begin(), p.args.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()),
                       distinct.end());
        std::vector<std::array<double, 3>> views(n);
        for (int color : distinct) {
          const int new_id = next_comm_id_++;
          std::vector<int> group;
          for (int g = 0; g < n; ++g) {
            if (p.args[g] == color) {
              views[g] = {static_cast<double>(new_id), 0.0,
                          static_cast<double>(group.size())};
              group.push_back(members[g]);
            }
          }
          for (int g = 0; g < n; ++g) {
            if (p.args[g] == color) views[g][1] = static_cast<double>(group.size());
          }
          comms_[new_id] = std::move(group);
        }
        for (int g = 0; g < n; ++g) respond(members[g], views[g]);
        break;
      }
    }
  }

  std::vector<int> fds_;
  std::vector<bool> open_;
  std::vector<std::vector<char>> buffers_;
  std::map<int, std::vector<int>> comms_;
  std::map<int, Pending> pending_;
  int next_comm_id_ = 1;
};

void send_hello(int fd, int rank) {
  std::uint32_t magic = kHelloMagic;
  std::int32_t r = rank;
  write_exact(fd, &magic, sizeof(magic));
  write_exact(fd, &r, sizeof(r));
}

int read_hello(int fd) {
  std::uint32_t magic = 0;
  std::int32_t r = -1;
  read_exact(fd, &magic, sizeof(magic));
  if (magic != kHelloMagic) throw CommError("bad hello from worker");
  read_exact(fd, &r, sizeof(r));
  return r;
}

}  // namespace

int fork_workers(int world_size,
                 const std::function<void(Communicator&)>& body) {
  if (world_size < 1) throw std::invalid_argument("world_size must be >= 1");
  std::fflush(nullptr);
  std::vector<int> hub_fds(world_size, -1);
  std::vector<pid_t> pids(world_size, -1);

  for (int r = 0; r < world_size; ++r) {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) != 0) {
      throw CommError(std::string("socketpair failed: ") + std::strerror(errno));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
      throw CommError(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
      // Worker process.
      ::close(sv[0]);
      for (int q = 0; q < r; ++q) {
        if (hub_fds[q] >= 0) ::close(hub_fds[q]);
      }
      int status = 0;
      try {
        send_hello(sv[1], r);
        auto channel = std::make_shared<Channel>(sv[1]);
        PipeCommunicator world(channel, 0, world_size, r);
        body(world);
      } catch (const std::exception& e) {
        std::fprintf(stderr, "msc worker rank %d: %s\n", r, e.what());
        status = 1;
      }
      std::fflush(nullptr);
      std::_Exit(status);
    }
    ::close(sv[1]);
    hub_fds[r] = sv[0];
    pids[r] = pid;
  }

  int rc = 0;
  try {
    // Hellos arrive in fd order here; they exist for the external-launch
    // path where connection order is arbitrary.
    std::vector<int> by_rank(world_size, -1);
    for (int r = 0; r < world_size; ++r) {
      const int rank = read_hello(hub_fds[r]);
      if (rank < 0 || rank >= world_size || by_rank[rank] != -1) {
        throw CommError("invalid worker rank in hello");
      }
      by_rank[rank] = hub_fds[r];
    }
    Hub hub(std::move(by_rank));
    hub_fds.assign(world_size, -1);  // ownership moved to the hub
    rc = hub.serve();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "msc hub: %s\n", e.what());
    rc = 1;
    for (int fd : hub_fds) {
      if (fd >= 0) ::close(fd);
    }
  }

  for (int r = 0; r < world_size; ++r) {
    int status = 0;
    if (::waitpid(pids[r], &status, 0) < 0) {
      rc = rc == 0 ? 1 : rc;
      continue;
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      rc = rc == 0 ? 1 : rc;
    }
  }
  return rc;
}

std::optional<WorkerEnv> discover_worker_env() {
  auto get = [](const char* name) -> const char* { return std::getenv(name); };
  const char* size_s = get("MSC_WORLD_SIZE");
  const char* rank_s = get("MSC_RANK");
  if (!size_s) size_s = get("OMPI_COMM_WORLD_SIZE");
  if (!rank_s) rank_s = get("OMPI_COMM_WORLD_RANK");
  if (!size_s) size_s = get("PMI_SIZE");
  if (!rank_s) rank_s = get("PMI_RANK");
  const char* sock = get("MSC_HUB_SOCKET");
  if (!size_s || !rank_s || !sock) return std::nullopt;
  WorkerEnv env;
  env.world_size = std::atoi(size_s);
  env.rank = std::atoi(rank_s);
  env.hub_socket = sock;
  if (env.world_size < 1 || env.rank < 0 || env.rank >= env.world_size) {
    return std::nullopt;
  }
  return env;
}

std::unique_ptr<Communicator> connect_hub(const WorkerEnv& env) {
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) throw CommError(std::string("socket failed: ") + std::strerror(errno));
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (env.hub_socket.size() >= sizeof(addr.sun_path)) {
    ::close(fd);
    throw CommError("hub socket path too long");
  }
  std::strncpy(addr.sun_path, env.hub_socket.c_str(), sizeof(addr.sun_path) - 1);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw CommError("cannot connect to hub socket " + env.hub_socket + ": " +
                    std::strerror(errno));
  }
  send_hello(fd, env.rank);
  auto channel = std::make_shared<Channel>(fd);
  return std::make_unique<PipeCommunicator>(std::move(channel), 0,
                                            env.world_size, env.rank);
}

int serve_hub(const std::string& socket_path, int world_size) {
  const int lfd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (lfd < 0) throw CommError(std::string("socket failed: ") + std::strerror(errno));
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (socket_path.size() >= sizeof(addr.sun_path)) {
    ::close(lfd);
    throw CommError("hub socket path too long");
  }
  std::strncpy(addr.sun_path, socket_path.c_str(), sizeof(addr.sun_path) - 1);
  ::unlink(socket_path.c_str());
  if (::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(lfd, world_size) != 0) {
    ::close(lfd);
    throw CommError("cannot listen on " + socket_path + ": " + std::strerror(errno));
  }

  int rc = 1;
  try {
    std::vector<int> by_rank(world_size, -1);
    for (int i = 0; i < world_size; ++i) {
      const int fd = ::accept(lfd, nullptr, nullptr);
      if (fd < 0) throw CommError(std::string("accept failed: ") + std::strerror(errno));
      const int rank = read_hello(fd);
      if (rank < 0 || rank >= world_size || by_rank[rank] != -1) {
        ::close(fd);
        throw CommError("invalid worker rank in hello");
      }
      by_rank[rank] = fd;
    }
    Hub hub(std::move(by_rank));
    rc = hub.serve();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "msc hub: %s\n", e.what());
    rc = 1;
  }
  ::close(lfd);
  ::unlink(socket_path.c_str());
  return rc;
}

}  // namespace msc::par
