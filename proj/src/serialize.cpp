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

#include "msc/serialize.hpp"

#include <fstream>

#include "msc/errors.hpp"

namespace msc {

nlohmann::json mode_result_to_json(const ModeResult& r) {
  nlohmann::json j;
  j["mode"] = r.mode;
  j["J"] = r.cluster.indices;
  j["d"] = r.d;
  j["iterations"] = r.iterations;
  j["eps"] = r.eps;
  j["hypothesis_ok"] = r.hypothesis_ok;
  j["sim"] = r.cluster_similarity;
  j["degenerate_gap"] = r.degenerate_gap;
  return j;
}

ModeResult mode_result_from_json(const nlohmann::json& j) {
  ModeResult r;
  r.mode = j.at("mode").get<int>();
  r.cluster.mode = r.mode;
  r.cluster.indices = j.at("J").get<std::vector<std::size_t>>();
  r.d = j.at("d").get<std::vector<double>>();
  r.m = r.d.size();
  r.iterations = j.at("iterations").get<std::size_t>();
  r.eps = j.at("eps").get<double>();
  r.hypothesis_ok = j.at("hypothesis_ok").get<bool>();
  if (j.contains("sim")) r.cluster_similarity = j.at("sim").get<double>();
  if (j.contains("degenerate_gap")) r.degenerate_gap = j.at("degenerate_gap").get<bool>();
  return r;
}

nlohmann::json tricluster_to_json(const TriclusterResult& r,
                                  const std::optional<std::string>& timings_file) {
  nlohmann::json j;
  j["J1"] = mode_result_to_json(r.modes[0]);
  j["J2"] = mode_result_to_json(r.modes[1]);
  j["J3"] = mode_result_to_json(r.modes[2]);
  if (timings_file) {
    j["timings_file"] = *timings_file;
  } else {
    j["timings_file"] = nullptr;
  }
  return j;
}

TriclusterResult tricluster_from_json(const nlohmann::json& j) {
  TriclusterResult r;
  r.modes[0] = mode_result_from_json(j.at("J1"));
  r.modes[1] = mode_result_from_json(j.at("J2"));
  r.modes[2] = mode_result_from_json(j.at("J3"));
  return r;
}

nlohmann::json ground_truth_to_json(const GroundTruth& gt) {
  nlohmann::json j;
  j["J1"] = gt.j1.indices;
  j["J2"] = gt.j2.indices;
  j["J3"] = gt.j3.indices;
  j["gamma"] = gt.gamma;
  j["l"] = gt.l;
  j["seed"] = gt.seed;
  j["dims"] = gt.dims;
  return j;
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  GroundTruth gt;
  gt.j1 = {1, j.at("J1").get<std::vector<std::size_t>>()};
  gt.j2 = {2, j.at("J2").get<std::vector<std::size_t>>()};
  gt.j3 = {3, j.at("J3").get<std::vector<std::size_t>>()};
  gt.gamma = j.at("gamma").get<double>();
  gt.l = j.at("l").get<std::size_t>();
  gt.seed = j.at("seed").get<std::uint64_t>();
  gt.dims = j.at("dims").get<std::array<std::size_t, 3>>();
  return gt;
}

nlohmann::json quality_to_json(const QualityReport& q) {
  nlohmann::json j;
  j["rec"] = q.rec;
  j["sim"] = q.sim;
  j["rec_per_mode"] = q.rec_per_mode;
  j["sim_per_mode"] = q.sim_per_mode;
  return j;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

void save_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace msc
