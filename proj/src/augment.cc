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

#include "nst/augment.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nst {

void AugmentPolicy::Validate() const {
  if (freq_mask_param < 0 || num_freq_masks < 0 || num_time_masks < 0 ||
      time_warp_param < 0) {
    throw std::invalid_argument("augment policy: negative parameter");
  }
  if (time_mask_param.has_value() == time_mask_ratio.has_value()) {
    throw std::invalid_argument(
        "augment policy: set exactly one of time_mask_param and "
        "time_mask_ratio");
  }
  if (time_mask_param && *time_mask_param < 0) {
    throw std::invalid_argument("augment policy: time_mask_param must be >= 0");
  }
  if (time_mask_ratio && !(*time_mask_ratio >= 0.0 && *time_mask_ratio <= 1.0)) {
    throw std::invalid_argument("augment policy: time_mask_ratio must be in [0, 1]");
  }
}

std::size_t AugmentPolicy::MaxTimeMaskWidth(std::size_t frames) const {
  std::size_t width = 0;
  if (time_mask_param) {
    width = static_cast<std::size_t>(*time_mask_param);
  } else if (time_mask_ratio) {
    // The small slack keeps products like 0.29 * 100 from flooring to 28.
    width = static_cast<std::size_t>(
        std::floor(*time_mask_ratio * static_cast<double>(frames) + 1e-9));
  }
  return std::min(width, frames);
}

AugmentPolicy FixedTimeMaskPolicy(int time_mask_param) {
  AugmentPolicy p;
  p.freq_mask_param = 27;
  p.num_freq_masks = 2;
  p.time_mask_param = time_mask_param;
  p.num_time_masks = 2;
  p.time_warp_param = 40;
  return p;
}

AugmentPolicy AdaptiveTimeMaskPolicy(double time_mask_ratio) {
  AugmentPolicy p;
  p.freq_mask_param = 27;
  p.num_freq_masks = 2;
  p.time_mask_param.reset();
  p.time_mask_ratio = time_mask_ratio;
  p.num_time_masks = 10;
  p.time_warp_param = 0;
  return p;
}

AugmentSchedule::AugmentSchedule(std::map<int, AugmentPolicy> policies)
    : policies_(std::move(policies)) {
  for (const auto& [gen, p] : policies_) p.Validate();
}

void AugmentSchedule::Set(int generation, AugmentPolicy policy) {
  policy.Validate();
  policies_[generation] = std::move(policy);
}

const AugmentPolicy& AugmentSchedule::policy(int generation) const {
  auto it = policies_.find(generation);
  if (it == policies_.end()) {
    throw std::out_of_range("augment schedule has no policy for generation " +
                            std::to_string(generation));
  }
  return it->second;
}

bool AugmentSchedule::Covers(int generations) const {
  for (int g = 0; g < generations; ++g) {
    if (!policies_.contains(g)) return false;
  }
  return true;
}

AugmentSchedule GradationalTimeMaskSchedule() {
  AugmentSchedule s;
  const int bounds[] = {40, 40, 80, 80, 100, 100};
  for (int g = 0; g < 6; ++g) s.Set(g, FixedTimeMaskPolicy(bounds[g]));
  return s;
}

FeatureMatrix FreqMask(const FeatureMatrix& features, int freq_mask_param,
                       int count, Rng& rng, float masked_value,
                       std::vector<MaskSpan>* applied) {
  const std::size_t channels = features.cols();
  if (freq_mask_param < 0 ||
      static_cast<std::size_t>(freq_mask_param) > channels) {
    throw std::invalid_argument("freq mask: F = " + std::to_string(freq_mask_param) +
                                " exceeds " + std::to_string(channels) +
                                " channels");
  }
  FeatureMatrix out = features;
  for (int m = 0; m < count; ++m) {
    const auto f = UniformInt<std::size_t>(rng, 0, freq_mask_param);
    const auto f0 = UniformInt<std::size_t>(rng, 0, channels - f);
    for (std::size_t r = 0; r < out.rows(); ++r) {
      for (std::size_t c = f0; c < f0 + f; ++c) out.at(r, c) = masked_value;
    }
    if (applied) applied->push_back({f0, f});
  }
  return out;
}

FeatureMatrix TimeMask(const FeatureMatrix& features,
                       const AugmentPolicy& policy, Rng& rng,
                       std::vector<MaskSpan>* applied) {
  policy.Validate();
  const std::size_t frames = features.rows();
  const std::size_t max_width = policy.MaxTimeMaskWidth(frames);
  FeatureMatrix out = features;
  for (int m = 0; m < policy.num_time_masks; ++m) {
    const auto t = UniformInt<std::size_t>(rng, 0, max_width);
    const auto t0 = UniformInt<std::size_t>(rng, 0, frames - t);
    for (std::size_t r = t0; r < t0 + t; ++r) {
      for (float& v : out.row(r)) v = policy.masked_value;
    }
    if (applied) applied->push_back({t0, t});
  }
  return out;
}

FeatureMatrix TimeWarpAt(const FeatureMatrix& features, std::size_t anchor,
                         long displacement) {
  const std::size_t frames = features.rows();
  const long last = static_cast<long>(frames) - 1;
  const long a = static_cast<long>(anchor);
  const long dest = a + displacement;
  if (a <= 0 || a >= last || dest <= 0 || dest >= last) {
    throw std::invalid_argument("time warp: anchor " + std::to_string(a) +
                                " -> " + std::to_string(dest) +
                                " must lie strictly inside [0, " +
                                std::to_string(last) + "]");
  }
  FeatureMatrix out(frames, features.cols());
  for (long t = 0; t <= last; ++t) {
    double src;
    if (t <= dest) {
      src = static_cast<double>(t) * static_cast<double>(a) / static_cast<double>(dest);
    } else {
      src = static_cast<double>(a) + static_cast<double>(t - dest) *
                                         static_cast<double>(last - a) /
                                         static_cast<double>(last - dest);
    }
    const auto lo = static_cast<std::size_t>(std::floor(src));
    const std::size_t hi = std::min<std::size_t>(lo + 1, frames - 1);
    const double frac = src - static_cast<double>(lo);
    auto dst = out.row(static_cast<std::size_t>(t));
    auto x0 = features.row(lo);
    auto x1 = features.row(hi);
    for (std::size_t c = 0; c < dst.size(); ++c) {
      // Written as x0 + frac * (x1 - x0) so equal neighbours stay exact.
      dst[c] = static_cast<float>(static_cast<double>(x0[c]) +
                                  frac * (static_cast<double>(x1[c]) - x0[c]));
    }
  }
  return out;
}

FeatureMatrix TimeWarp(const FeatureMatrix& features, int time_warp_param,
                       Rng& rng) {
  const long frames = static_cast<long>(features.rows());
  const long w = time_warp_param;
  if (w <= 0 || frames <= 2 * w) return features;
  const long anchor = UniformInt<long>(rng, w, frames - w - 1);
  const long displacement = UniformInt<long>(rng, -w, w);
  const long dest = std::clamp(anchor + displacement, 1L, frames - 2);
  return TimeWarpAt(features, static_cast<std::size_t>(anchor), dest - anchor);
}

FeatureMatrix ApplyPolicy(const FeatureMatrix& features,
                          const AugmentPolicy& policy, Rng& rng) {
  policy.Validate();
  FeatureMatrix out = TimeWarp(features, policy.time_warp_param, rng);
  out = FreqMask(out, policy.freq_mask_param, policy.num_freq_masks, rng,
                 policy.masked_value);
  return TimeMask(out, policy, rng);
}

Rng UtteranceRng(std::uint64_t seed, std::string_view utterance_id) {
  return Rng(DeriveSeed(seed, utterance_id));
}

Dataset AugmentDataset(const Dataset& dataset, const AugmentPolicy& policy,
                       std::uint64_t seed) {
  policy.Validate();
  Dataset out = dataset;
  for (auto& u : out.utterances) {
    Rng rng = UtteranceRng(seed, u.id);
    u.features = std::make_shared<const FeatureMatrix>(ApplyPolicy(u.feats(), policy, rng));
  }
  return out;
}

}  // namespace nst
