// Copyright 2026 The NST Toolkit Authors.
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

// nlohmann::json conversions for configuration and model types.

#ifndef NST_JSON_IO_H_
#define NST_JSON_IO_H_

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "nst/augment.h"
#include "nst/balancing.h"
#include "nst/filtering.h"
#include "nst/mixing.h"
#include "nst/scoring.h"

namespace nst {

void to_json(nlohmann::json& j, const FusionParams& p);
void from_json(const nlohmann::json& j, FusionParams& p);
FusionMode ParseFusionMode(const std::string& text);
const char* FusionModeName(FusionMode mode);

void to_json(nlohmann::json& j, const FilterModel& m);
void from_json(const nlohmann::json& j, FilterModel& m);

void to_json(nlohmann::json& j, const AugmentPolicy& p);
// Missing fields keep their defaults; "time_mask_ratio" alone selects the
// adaptive mode.
void from_json(const nlohmann::json& j, AugmentPolicy& p);

void to_json(nlohmann::json& j, const MixPlan& p);
// {"mode": "batchwise"|"uniform", "ratio": "4:6", "batch_size": 10,
//  "ratio_schedule": {"3": "3:7"}}
void from_json(const nlohmann::json& j, MixPlan& p);

// Cutoffs are numbers, or the string "-inf" (also null) for no filtering.
nlohmann::json CutoffToJson(double cutoff);
double CutoffFromJson(const nlohmann::json& j);

// {"mode": ..., "lm_weight": [...], "coverage_weight": [...],
//  "nonblank_reward": [...]} or an explicit array of FusionParams.
std::vector<FusionParams> FusionGridFromJson(const nlohmann::json& j);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
// Pretty-printed, newline-terminated, written atomically.
void WriteJsonFile(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace nst

#endif  // NST_JSON_IO_H_
