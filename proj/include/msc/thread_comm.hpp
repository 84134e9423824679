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

#include <exception>
#include <functional>
#include <vector>

#include "msc/comm.hpp"

namespace msc::par {

/// Run `body` on world_size threads, each with its own rank of a shared
/// in-process world communicator. Returns one exception_ptr per rank
/// (null on clean exit). A rank failing aborts peers blocked in
/// collectives with CommError instead of deadlocking.
std::vector<std::exception_ptr> run_thread_group(
    int world_size, const std::function<void(Communicator&)>& body);

}  // namespace msc::par
