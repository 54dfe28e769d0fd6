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

// SpecAugment-style masking and warping on (frames x channels) matrices.

#ifndef NST_AUGMENT_H_
#define NST_AUGMENT_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "nst/corpus.h"
#include "nst/random.h"

namespace nst {

struct AugmentPolicy {
  int freq_mask_param = 0;  // F
  int num_freq_masks = 2;
  // Exactly one of the two time-mask bounds is set: a fixed width T or a
  // ratio p of the utterance length.
  std::optional<int> time_mask_param = 0;
  std::optional<double> time_mask_ratio;
  int num_time_masks = 0;
  int time_warp_param = 0;  // W
  float masked_value = 0.0f;

  // Throws std::invalid_argument.
  void Validate() const;
  // T, or floor(p * frames); clamped to `frames`.
  std::size_t MaxTimeMaskWidth(std::size_t frames) const;

  friend bool operator==(const AugmentPolicy&, const AugmentPolicy&) = default;
};

// Two frequency masks with F = 27, two time masks of width up to T, time
// warping with W = 40.
AugmentPolicy FixedTimeMaskPolicy(int time_mask_param);
// Two frequency masks with F = 27, ten time masks of width up to
// floor(0.05 * frames), no warping.
AugmentPolicy AdaptiveTimeMaskPolicy(double time_mask_ratio = 0.05);

class AugmentSchedule {
 public:
  AugmentSchedule() = default;
  explicit AugmentSchedule(std::map<int, AugmentPolicy> policies);

  void Set(int generation, AugmentPolicy policy);
  // Throws std::out_of_range for generations without a policy.
  const AugmentPolicy& policy(int generation) const;
  bool Covers(int generations) const;
  const std::map<int, AugmentPolicy>& policies() const { return policies_; }

 private:
  std::map<int, AugmentPolicy> policies_;
};

// Time-mask bound 40 for generations 0-1, 80 for 2-3, 100 for 4-5.
AugmentSchedule GradationalTimeMaskSchedule();

struct MaskSpan {
  std::size_t start = 0;
  std::size_t width = 0;
};

// Each mask: width f ~ U{0..F}, start ~ U{0..channels-f}; the columns
// [start, start+f) are overwritten. Throws std::invalid_argument if F
// exceeds the channel count.
FeatureMatrix FreqMask(const FeatureMatrix& features, int freq_mask_param,
                       int count, Rng& rng, float masked_value = 0.0f,
                       std::vector<MaskSpan>* applied = nullptr);

// Each mask: width t ~ U{0..MaxTimeMaskWidth(L)}, start ~ U{0..L-t}.
FeatureMatrix TimeMask(const FeatureMatrix& features,
                       const AugmentPolicy& policy, Rng& rng,
                       std::vector<MaskSpan>* applied = nullptr);

// Piecewise-linear time remap through (0, 0), (anchor + displacement,
// anchor), (L-1, L-1): output frame t reads the input at the mapped
// position, linearly interpolating between the bracketing frames. Needs
// 0 < anchor < L-1 and 0 < anchor + displacement < L-1.
FeatureMatrix TimeWarpAt(const FeatureMatrix& features, std::size_t anchor,
                         long displacement);

// anchor ~ U{W..L-W-1}, displacement ~ U{-W..W}, with the warped anchor
// clamped to [1, L-2]. Identity when W == 0 or L <= 2W.
FeatureMatrix TimeWarp(const FeatureMatrix& features, int time_warp_param,
                       Rng& rng);

// Warp, then frequency masks, then time masks.
FeatureMatrix ApplyPolicy(const FeatureMatrix& features,
                          const AugmentPolicy& policy, Rng& rng);

// Independent stream for one utterance, keyed on the global seed and id.
Rng UtteranceRng(std::uint64_t seed, std::string_view utterance_id);

// Augments every utterance with its own derived stream; feature matrices
// are replaced, all other fields kept.
Dataset AugmentDataset(const Dataset& dataset, const AugmentPolicy& policy,
                       std::uint64_t seed);

}  // namespace nst

#endif  // NST_AUGMENT_H_
