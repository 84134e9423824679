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

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "msc/comm.hpp"

namespace msc::par {

/// Fork `world_size` worker processes running `body`, each talking to a
/// star hub in the calling process over a socketpair. Returns 0 when the
/// hub and every worker exited cleanly. Worker exceptions are printed to
/// stderr with their rank and abort the whole job.
int fork_workers(int world_size, const std::function<void(Communicator&)>& body);

/// Rank/size discovered from the launcher environment: MSC_RANK and
/// MSC_WORLD_SIZE, with OMPI_COMM_WORLD_* and PMI_* accepted as
/// fallbacks. MSC_HUB_SOCKET names the rendezvous Unix socket.
struct WorkerEnv {
  int world_size = 0;
  int rank = 0;
  std::string hub_socket;
};

std::optional<WorkerEnv> discover_worker_env();

/// Worker side of an externally launched job: connect to the hub socket
/// and introduce this rank.
std::unique_ptr<Communicator> connect_hub(const WorkerEnv& env);

/// Hub side of an externally launched job: listen on `socket_path`,
/// accept `world_size` workers, serve their collectives until they all
/// disconnect. Returns 0 on clean shutdown.
int serve_hub(const std::string& socket_path, int world_size);

}  // namespace msc::par
