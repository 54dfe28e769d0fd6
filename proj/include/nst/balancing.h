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

// Greedy batched selection of pseudo-labeled sentences, with replacement up
// to a multiplicity cap, so that the unigram token distribution of the
// selection moves toward a target distribution.

#ifndef NST_BALANCING_H_
#define NST_BALANCING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "nst/corpus.h"

namespace nst {

struct SamplerConfig {
  int multiplicity_cap = 2;
  // Batch size is ceil(batch_fraction * pool size).
  double batch_fraction = 0.1;
  // Lower bound on the total number of sampled tokens.
  std::size_t min_token_total = 0;
  double smoothing_epsilon = 1e-6;

  // Throws std::invalid_argument.
  void Validate() const;
  std::size_t BatchSize(std::size_t pool_size) const;
};

// KL(p~ || q~) where x~_i = (x_i + eps) / (1 + V * eps). Throws
// std::invalid_argument when vocab sizes differ or eps <= 0.
double KlDivergence(const TokenDistribution& p, const TokenDistribution& q,
                    double epsilon);

// Same as above for the distribution of raw `counts`; all-zero counts give
// the uniform distribution after smoothing.
double KlFromCounts(std::span<const double> counts, const TokenDistribution& q,
                    double epsilon);

// [KL(counts) - KL(counts + sentence)] / length. Throws
// std::invalid_argument for an empty sentence.
double CostBenefit(std::span<const double> current_counts,
                   const Transcript& sentence, const TokenDistribution& target,
                   double epsilon);

struct SampleResult {
  // Selected pool entries in pool order; multiplicities in [1, cap].
  std::vector<WeightedSample> samples;
  // Pool exhausted before reaching min_token_total.
  bool infeasible = false;
  std::size_t batches = 0;
  std::size_t token_total = 0;
  double final_kl = 0.0;
};

// Per batch: score every sentence below the cap (and with length >= 1)
// against the counts frozen at the start of the batch, take the top
// BatchSize() by cost-benefit (ties by pool order), commit them, recompute
// KL. Stops once the token floor is met and the last batch did not lower
// KL, or when nothing is eligible. Input multiplicities are ignored.
SampleResult SubmodularSample(std::span<const WeightedSample> pool,
                              const TokenDistribution& target,
                              const SamplerConfig& config);

// Keeps the utterances selected by `result` with their multiplicities.
Dataset ApplySampling(const Dataset& pool, const SampleResult& result);

}  // namespace nst

#endif  // NST_BALANCING_H_
