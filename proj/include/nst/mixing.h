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

#ifndef NST_MIXING_H_
#define NST_MIXING_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nst/corpus.h"
#include "nst/random.h"

namespace nst {

enum class MixMode { kBatchwise, kUniform };

struct MixRatio {
  int supervised = 1;
  int semi = 1;

  friend bool operator==(const MixRatio&, const MixRatio&) = default;
};

// Parses "4:6".
MixRatio ParseMixRatio(const std::string& text);

struct MixPlan {
  MixMode mode = MixMode::kUniform;
  MixRatio ratio;
  int batch_size = 2;
  // Per-generation overrides of `ratio`.
  std::map<int, MixRatio> ratio_schedule;

  // Throws std::invalid_argument; in batchwise mode the ratio parts must be
  // positive and their sum must divide batch_size.
  void Validate() const;
  MixRatio RatioFor(int generation) const;
};

// Supervised-to-semi ratios 4:6 (generations 1-2), 3:7 (3), 2:8 (4).
std::map<int, MixRatio> GradualSemiRatioSchedule();

enum class Origin { kSupervised, kSemi };
const char* OriginName(Origin origin);

// Points at an utterance of the supervised or semi-supervised dataset.
struct MixEntry {
  Origin origin = Origin::kSupervised;
  std::size_t index = 0;

  friend bool operator==(const MixEntry&, const MixEntry&) = default;
};

// Utterance indices, each repeated by its multiplicity.
std::vector<std::size_t> MaterializeIndices(const Dataset& dataset);

// Walks a pool in shuffled epochs, reshuffling when exhausted.
class EpochSampler {
 public:
  EpochSampler(std::vector<std::size_t> pool, Rng rng);
  std::size_t Next();

 private:
  std::vector<std::size_t> pool_;
  std::size_t cursor_ = 0;
  Rng rng_;
};

// Every batch holds exactly batch*sup/(sup+semi) supervised entries followed
// by batch*semi/(sup+semi) semi-supervised ones.
class BatchwiseMixer {
 public:
  BatchwiseMixer(const Dataset& supervised, const Dataset& semi,
                 MixRatio ratio, int batch_size, Rng rng);
  std::vector<MixEntry> NextBatch();
  std::size_t supervised_per_batch() const { return sup_per_batch_; }
  std::size_t semi_per_batch() const { return semi_per_batch_; }

 private:
  std::size_t sup_per_batch_;
  std::size_t semi_per_batch_;
  std::optional<EpochSampler> sup_;
  std::optional<EpochSampler> semi_;
};

// Draws with replacement, each materialized entry of the combined pool
// equally likely.
class UniformMixer {
 public:
  UniformMixer(const Dataset& supervised, const Dataset& semi, Rng rng);
  MixEntry Next();
  std::size_t pool_size() const { return pool_.size(); }

 private:
  std::vector<MixEntry> pool_;
  Rng rng_;
};

// At least `count` entries from the plan's stream; batchwise mode rounds up
// to whole batches.
std::vector<MixEntry> DrawMixedStream(const Dataset& supervised,
                                      const Dataset& semi, const MixPlan& plan,
                                      MixRatio ratio, std::size_t count,
                                      std::uint64_t seed);

}  // namespace nst

#endif  // NST_MIXING_H_
