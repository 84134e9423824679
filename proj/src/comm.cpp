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

#include "msc/comm.hpp"

#include <stdexcept>

#include "msc/errors.hpp"

namespace msc::par {

void Communicator::barrier() {
  ++counters_.barrier;
  do_barrier();
}

double Communicator::allreduce_max(double v) {
  ++counters_.allreduce_max;
  return do_allreduce_max(v);
}

std::vector<double> Communicator::allgatherv(std::span<const double> local) {
  ++counters_.allgatherv;
  return do_allgatherv(local);
}

std::vector<double> Communicator::gatherv(std::span<const double> local,
                                          int root) {
  if (root < 0 || root >= size()) throw std::invalid_argument("bad gather root");
  ++counters_.gatherv;
  return do_gatherv(local, root);
}

void Communicator::broadcast(std::span<double> buf, int root) {
  if (root < 0 || root >= size()) throw std::invalid_argument("bad broadcast root");
  ++counters_.broadcast;
  do_broadcast(buf, root);
}

std::unique_ptr<Communicator> Communicator::split(int color) {
  ++counters_.split;
  return do_split(color);
}

std::vector<double> broadcast_vector(Communicator& comm,
                                     std::vector<double> data, int root) {
  double len = comm.rank() == root ? static_cast<double>(data.size()) : 0.0;
  comm.broadcast({&len, 1}, root);
  data.resize(static_cast<std::size_t>(len));
  if (!data.empty()) comm.broadcast({data.data(), data.size()}, root);
  return data;
}

}  // namespace msc::par
