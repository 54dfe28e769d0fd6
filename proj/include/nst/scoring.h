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

#ifndef NST_SCORING_H_
#define NST_SCORING_H_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nst/corpus.h"

namespace nst {

struct ScoredHypothesis {
  Transcript transcript;
  double am_score = 0.0;
  double lm_score = 0.0;
  // Opaque nonnegative statistic supplied by the recognizer.
  double coverage = 0.0;
  std::optional<double> fused;
};

enum class FusionMode { kAttention, kTransducer };

struct FusionParams {
  double lm_weight = 0.0;
  double coverage_weight = 0.0;  // attention mode only
  double nonblank_reward = 0.0;  // transducer mode only
  FusionMode mode = FusionMode::kAttention;

  friend bool operator==(const FusionParams&, const FusionParams&) = default;
};

// attention:  am + lm_weight * lm + coverage_weight * coverage
// transducer: am + lm_weight * lm + nonblank_reward * length
double FuseScore(const ScoredHypothesis& hyp, const FusionParams& params);

// Index of the highest fused score; ties go to the earlier hypothesis.
std::size_t RerankBest(std::span<const ScoredHypothesis> hyps,
                       const FusionParams& params);

// Cartesian product in (lm_weight, coverage_weight, nonblank_reward) order,
// last axis fastest.
std::vector<FusionParams> MakeFusionGrid(std::span<const double> lm_weights,
                                         std::span<const double> coverage_weights,
                                         std::span<const double> nonblank_rewards,
                                         FusionMode mode);

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t reference_length = 0;

  std::size_t errors() const { return substitutions + insertions + deletions; }
  EditCounts& operator+=(const EditCounts& o) {
    substitutions += o.substitutions;
    insertions += o.insertions;
    deletions += o.deletions;
    reference_length += o.reference_length;
    return *this;
  }
};

// Levenshtein alignment with unit costs. On backtrace, matches and
// substitutions are preferred over deletions, deletions over insertions.
template <typename T>
EditCounts AlignSequences(std::span<const T> ref, std::span<const T> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [m, &d](std::size_t i, std::size_t j) -> std::size_t& {
    return d[i * (m + 1) + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({sub, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  EditCounts counts;
  counts.reference_length = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++counts.substitutions;
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++counts.deletions;
      --i;
    } else {
      ++counts.insertions;
      --j;
    }
  }
  return counts;
}

struct WerResult {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  double wer = 0.0;
};

// Throws std::invalid_argument when the reference is empty.
WerResult ComputeWer(std::span<const std::string> reference,
                     std::span<const std::string> hypothesis);
// Convenience overload on whitespace-separated text.
WerResult ComputeWer(const std::string& reference,
                     const std::string& hypothesis);
// Error rate over token ids instead of detokenized words.
WerResult TokenErrorRate(const Transcript& reference,
                         const Transcript& hypothesis);

// Word-level edit counts after detokenization.
EditCounts WordEdits(const Transcript& reference, const Transcript& hypothesis,
                     const TokenVocab& vocab);

// Reference plus n-best list for one dev utterance.
struct DevDecode {
  Transcript reference;
  std::vector<ScoredHypothesis> hypotheses;
};

// Corpus WER of the top hypotheses under `params`.
double DevWer(std::span<const DevDecode> dev, const FusionParams& params,
              const TokenVocab& vocab);

struct GridSearchResult {
  std::size_t best_index = 0;
  FusionParams best;
  std::vector<double> wers;  // one per grid point
};

// Evaluates every grid point; lowest corpus WER wins, earliest index on ties.
GridSearchResult GridSearchFusion(std::span<const FusionParams> grid,
                                  std::span<const DevDecode> dev,
                                  const TokenVocab& vocab);

}  // namespace nst

#endif  // NST_SCORING_H_
