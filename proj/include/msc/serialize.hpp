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

#include <optional>
#include <string>

#include <json.hpp>

#include "msc/metrics.hpp"
#include "msc/pipeline.hpp"
#include "msc/synthetic.hpp"

namespace msc {

/// {"mode": k, "J": [...], "d": [...], "iterations": n, "eps": e,
///  "hypothesis_ok": bool} plus "sim" (mean in-cluster similarity) and
/// "degenerate_gap".
nlohmann::json mode_result_to_json(const ModeResult& r);
ModeResult mode_result_from_json(const nlohmann::json& j);

/// {"J1": <mode result>, "J2": ..., "J3": ..., "timings_file": path|null}
nlohmann::json tricluster_to_json(const TriclusterResult& r,
                                  const std::optional<std::string>& timings_file);
TriclusterResult tricluster_from_json(const nlohmann::json& j);

nlohmann::json ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);

nlohmann::json quality_to_json(const QualityReport& q);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const nlohmann::json& j, const std::string& path);

}  // namespace msc
