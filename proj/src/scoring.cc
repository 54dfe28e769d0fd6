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

#include "nst/scoring.h"

#include <cmath>
#include <stdexcept>

namespace nst {

double FuseScore(const ScoredHypothesis& hyp, const FusionParams& params) {
  if (!std::isfinite(hyp.am_score) || !std::isfinite(hyp.lm_score) ||
      !std::isfinite(hyp.coverage)) {
    throw std::invalid_argument("fuse score: hypothesis scores must be finite");
  }
  double fused = hyp.am_score + params.lm_weight * hyp.lm_score;
  if (params.mode == FusionMode::kAttention) {
    fused += params.coverage_weight * hyp.coverage;
  } else {
    fused += params.nonblank_reward * static_cast<double>(hyp.transcript.length());
  }
  return fused;
}

std::size_t RerankBest(std::span<const ScoredHypothesis> hyps,
                       const FusionParams& params) {
  if (hyps.empty()) throw std::invalid_argument("rerank: empty hypothesis list");
  std::size_t best = 0;
  double best_score = FuseScore(hyps[0], params);
  for (std::size_t i = 1; i < hyps.size(); ++i) {
    const double s = FuseScore(hyps[i], params);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

std::vector<FusionParams> MakeFusionGrid(std::span<const double> lm_weights,
                                         std::span<const double> coverage_weights,
                                         std::span<const double> nonblank_rewards,
                                         FusionMode mode) {
  const std::vector<double> zero = {0.0};
  auto or_zero = [&zero](std::span<const double> v) {
    return v.empty() ? std::span<const double>(zero) : v;
  };
  std::vector<FusionParams> grid;
  for (double l : or_zero(lm_weights)) {
    for (double c : or_zero(coverage_weights)) {
      for (double r : or_zero(nonblank_rewards)) {
        grid.push_back({l, c, r, mode});
      }
    }
  }
  return grid;
}

namespace {

WerResult ToResult(const EditCounts& c) {
  if (c.reference_length == 0) {
    throw std::invalid_argument("wer: empty reference, ratio undefined");
  }
  return {c.substitutions, c.insertions, c.deletions,
          static_cast<double>(c.errors()) / static_cast<double>(c.reference_length)};
}

}  // namespace

WerResult ComputeWer(std::span<const std::string> reference,
                     std::span<const std::string> hypothesis) {
  return ToResult(AlignSequences(reference, hypothesis));
}

WerResult ComputeWer(const std::string& reference,
                     const std::string& hypothesis) {
  const auto r = SplitWords(reference);
  const auto h = SplitWords(hypothesis);
  return ComputeWer(std::span<const std::string>(r),
                    std::span<const std::string>(h));
}

WerResult TokenErrorRate(const Transcript& reference,
                         const Transcript& hypothesis) {
  return ToResult(AlignSequences(std::span<const TokenId>(reference.tokens),
                                 std::span<const TokenId>(hypothesis.tokens)));
}

EditCounts WordEdits(const Transcript& reference, const Transcript& hypothesis,
                     const TokenVocab& vocab) {
  const auto r = SplitWords(Detokenize(reference, vocab));
  const auto h = SplitWords(Detokenize(hypothesis, vocab));
  return AlignSequences(std::span<const std::string>(r),
                        std::span<const std::string>(h));
}

double DevWer(std::span<const DevDecode> dev, const FusionParams& params,
              const TokenVocab& vocab) {
  EditCounts total;
  for (const auto& item : dev) {
    const auto& best = item.hypotheses[RerankBest(item.hypotheses, params)];
    total += WordEdits(item.reference, best.transcript, vocab);
  }
  return ToResult(total).wer;
}

GridSearchResult GridSearchFusion(std::span<const FusionParams> grid,
                                  std::span<const DevDecode> dev,
                                  const TokenVocab& vocab) {
  if (grid.empty()) throw std::invalid_argument("grid search: empty grid");
  if (dev.empty()) throw std::invalid_argument("grid search: empty dev set");
  GridSearchResult result;
  result.wers.reserve(grid.size());
  for (const auto& params : grid) result.wers.push_back(DevWer(dev, params, vocab));
  // Strict comparison keeps the earliest index among equal WERs.
  for (std::size_t i = 1; i < result.wers.size(); ++i) {
    if (result.wers[i] < result.wers[result.best_index]) result.best_index = i;
  }
  result.best = grid[result.best_index];
  return result;
}

}  // namespace nst
