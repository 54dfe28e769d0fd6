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

#include "nst/json_io.h"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "nst/corpus.h"
#include "nst/errors.h"

namespace nst {

using nlohmann::json;

FusionMode ParseFusionMode(const std::string& text) {
  if (text == "attention") return FusionMode::kAttention;
  if (text == "transducer") return FusionMode::kTransducer;
  throw std::invalid_argument("unknown fusion mode '" + text +
                              "' (expected attention or transducer)");
}

const char* FusionModeName(FusionMode mode) {
  return mode == FusionMode::kAttention ? "attention" : "transducer";
}

void to_json(json& j, const FusionParams& p) {
  j = json{{"lm_weight", p.lm_weight},
           {"coverage_weight", p.coverage_weight},
           {"nonblank_reward", p.nonblank_reward},
           {"mode", FusionModeName(p.mode)}};
}

void from_json(const json& j, FusionParams& p) {
  p.lm_weight = j.value("lm_weight", 0.0);
  p.coverage_weight = j.value("coverage_weight", 0.0);
  p.nonblank_reward = j.value("nonblank_reward", 0.0);
  p.mode = ParseFusionMode(j.value("mode", std::string("attention")));
}

void to_json(json& j, const FilterModel& m) {
  j = json{{"mu", m.mu}, {"beta", m.beta}, {"sigma", m.sigma}};
}

void from_json(const json& j, FilterModel& m) {
  m.mu = j.at("mu").get<double>();
  m.beta = j.at("beta").get<double>();
  m.sigma = j.at("sigma").get<double>();
  if (!(m.sigma > 0.0)) throw std::invalid_argument("filter model: sigma must be > 0");
}

void to_json(json& j, const AugmentPolicy& p) {
  j = json{{"freq_mask_param", p.freq_mask_param},
           {"num_freq_masks", p.num_freq_masks},
           {"num_time_masks", p.num_time_masks},
           {"time_warp_param", p.time_warp_param},
           {"masked_value", p.masked_value}};
  if (p.time_mask_param) j["time_mask_param"] = *p.time_mask_param;
  if (p.time_mask_ratio) j["time_mask_ratio"] = *p.time_mask_ratio;
}

void from_json(const json& j, AugmentPolicy& p) {
  p = AugmentPolicy{};
  p.freq_mask_param = j.value("freq_mask_param", p.freq_mask_param);
  p.num_freq_masks = j.value("num_freq_masks", p.num_freq_masks);
  p.num_time_masks = j.value("num_time_masks", p.num_time_masks);
  p.time_warp_param = j.value("time_warp_param", p.time_warp_param);
  p.masked_value = j.value("masked_value", p.masked_value);
  if (j.contains("time_mask_ratio")) {
    p.time_mask_param.reset();
    p.time_mask_ratio = j.at("time_mask_ratio").get<double>();
  }
  if (j.contains("time_mask_param")) p.time_mask_param = j.at("time_mask_param").get<int>();
  p.Validate();
}

namespace {

std::string RatioText(const MixRatio& r) {
  return std::to_string(r.supervised) + ":" + std::to_string(r.semi);
}

}  // namespace

void to_json(json& j, const MixPlan& p) {
  j = json{{"mode", p.mode == MixMode::kBatchwise ? "batchwise" : "uniform"},
           {"ratio", RatioText(p.ratio)},
           {"batch_size", p.batch_size}};
  if (!p.ratio_schedule.empty()) {
    json sched = json::object();
    for (const auto& [g, r] : p.ratio_schedule) sched[std::to_string(g)] = RatioText(r);
    j["ratio_schedule"] = std::move(sched);
  }
}

void from_json(const json& j, MixPlan& p) {
  p = MixPlan{};
  const std::string mode = j.value("mode", std::string("uniform"));
  if (mode == "batchwise") {
    p.mode = MixMode::kBatchwise;
  } else if (mode == "uniform") {
    p.mode = MixMode::kUniform;
  } else {
    throw std::invalid_argument("unknown mix mode '" + mode + "'");
  }
  if (j.contains("ratio")) p.ratio = ParseMixRatio(j.at("ratio").get<std::string>());
  p.batch_size = j.value("batch_size", p.batch_size);
  if (j.contains("ratio_schedule")) {
    for (const auto& [g, r] : j.at("ratio_schedule").items()) {
      p.ratio_schedule[std::stoi(g)] = ParseMixRatio(r.get<std::string>());
    }
  }
  p.Validate();
}

json CutoffToJson(double cutoff) {
  if (cutoff == kNoCutoff) return "-inf";
  return cutoff;
}

double CutoffFromJson(const json& j) {
  if (j.is_null()) return kNoCutoff;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "-inf" || s == "-Infinity") return kNoCutoff;
    throw std::invalid_argument("cutoff: unexpected string '" + s + "'");
  }
  const double c = j.get<double>();
  if (!std::isfinite(c)) throw std::invalid_argument("cutoff must be finite or \"-inf\"");
  return c;
}

std::vector<FusionParams> FusionGridFromJson(const json& j) {
  if (j.is_array()) {
    std::vector<FusionParams> grid;
    for (const auto& item : j) grid.push_back(item.get<FusionParams>());
    if (grid.empty()) throw std::invalid_argument("fusion grid is empty");
    return grid;
  }
  const auto mode = ParseFusionMode(j.value("mode", std::string("attention")));
  auto axis = [&j](const char* key) {
    return j.contains(key) ? j.at(key).get<std::vector<double>>() : std::vector<double>{};
  };
  const auto l = axis("lm_weight");
  const auto c = axis("coverage_weight");
  const auto r = axis("nonblank_reward");
  return MakeFusionGrid(l, c, r, mode);
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError(path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const json& j, const std::filesystem::path& path) {
  AtomicWriteFile(path, j.dump(2) + "\n");
}

}  // namespace nst
