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

#include "nst/mixing.h"

#include <algorithm>
#include <stdexcept>

namespace nst {

MixRatio ParseMixRatio(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("mix ratio '" + text + "' is not of the form a:b");
  }
  try {
    std::size_t used = 0;
    MixRatio r;
    r.supervised = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing characters");
    const std::string rest = text.substr(colon + 1);
    r.semi = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("trailing characters");
    if (r.supervised <= 0 || r.semi <= 0) throw std::invalid_argument("nonpositive part");
    return r;
  } catch (const std::logic_error&) {
    throw std::invalid_argument("mix ratio '" + text + "' is not of the form a:b");
  }
}

void MixPlan::Validate() const {
  if (mode != MixMode::kBatchwise) return;
  auto check = [this](const MixRatio& r) {
    if (r.supervised <= 0 || r.semi <= 0) {
      throw std::invalid_argument("mix plan: ratio parts must be positive");
    }
    if (batch_size <= 0 || batch_size % (r.supervised + r.semi) != 0) {
      throw std::invalid_argument(
          "mix plan: ratio " + std::to_string(r.supervised) + ":" +
          std::to_string(r.semi) + " does not divide batch size " +
          std::to_string(batch_size));
    }
  };
  check(ratio);
  for (const auto& [gen, r] : ratio_schedule) check(r);
}

MixRatio MixPlan::RatioFor(int generation) const {
  auto it = ratio_schedule.find(generation);
  return it == ratio_schedule.end() ? ratio : it->second;
}

std::map<int, MixRatio> GradualSemiRatioSchedule() {
  return {{1, {4, 6}}, {2, {4, 6}}, {3, {3, 7}}, {4, {2, 8}}};
}

const char* OriginName(Origin origin) {
  return origin == Origin::kSupervised ? "sup" : "semi";
}

std::vector<std::size_t> MaterializeIndices(const Dataset& dataset) {
  std::vector<std::size_t> out;
  out.reserve(dataset.materialized_size());
  for (std::size_t i = 0; i < dataset.utterances.size(); ++i) {
    const int m = dataset.utterances[i].multiplicity;
    if (m < 1) throw std::invalid_argument("materialize: multiplicity < 1");
    out.insert(out.end(), static_cast<std::size_t>(m), i);
  }
  return out;
}

EpochSampler::EpochSampler(std::vector<std::size_t> pool, Rng rng)
    : pool_(std::move(pool)), rng_(rng) {
  if (pool_.empty()) throw std::invalid_argument("epoch sampler: empty pool");
  std::shuffle(pool_.begin(), pool_.end(), rng_);
}

std::size_t EpochSampler::Next() {
  if (cursor_ == pool_.size()) {
    std::shuffle(pool_.begin(), pool_.end(), rng_);
    cursor_ = 0;
  }
  return pool_[cursor_++];
}

BatchwiseMixer::BatchwiseMixer(const Dataset& supervised, const Dataset& semi,
                               MixRatio ratio, int batch_size, Rng rng) {
  MixPlan plan{MixMode::kBatchwise, ratio, batch_size, {}};
  plan.Validate();
  if (supervised.empty() || semi.empty()) {
    throw std::invalid_argument("batchwise mixing needs both datasets nonempty");
  }
  const auto parts = static_cast<std::size_t>(ratio.supervised + ratio.semi);
  const auto unit = static_cast<std::size_t>(batch_size) / parts;
  sup_per_batch_ = unit * static_cast<std::size_t>(ratio.supervised);
  semi_per_batch_ = unit * static_cast<std::size_t>(ratio.semi);
  Rng sup_rng(rng());
  Rng semi_rng(rng());
  sup_.emplace(MaterializeIndices(supervised), sup_rng);
  semi_.emplace(MaterializeIndices(semi), semi_rng);
}

std::vector<MixEntry> BatchwiseMixer::NextBatch() {
  std::vector<MixEntry> batch;
  batch.reserve(sup_per_batch_ + semi_per_batch_);
  for (std::size_t i = 0; i < sup_per_batch_; ++i) {
    batch.push_back({Origin::kSupervised, sup_->Next()});
  }
  for (std::size_t i = 0; i < semi_per_batch_; ++i) {
    batch.push_back({Origin::kSemi, semi_->Next()});
  }
  return batch;
}

UniformMixer::UniformMixer(const Dataset& supervised, const Dataset& semi,
                           Rng rng)
    : rng_(rng) {
  for (std::size_t i : MaterializeIndices(supervised)) {
    pool_.push_back({Origin::kSupervised, i});
  }
  for (std::size_t i : MaterializeIndices(semi)) {
    pool_.push_back({Origin::kSemi, i});
  }
  if (pool_.empty()) throw std::invalid_argument("uniform mixing: empty pool");
}

MixEntry UniformMixer::Next() {
  return pool_[UniformInt<std::size_t>(rng_, 0, pool_.size() - 1)];
}

std::vector<MixEntry> DrawMixedStream(const Dataset& supervised,
                                      const Dataset& semi, const MixPlan& plan,
                                      MixRatio ratio, std::size_t count,
                                      std::uint64_t seed) {
  std::vector<MixEntry> out;
  out.reserve(count);
  Rng rng(seed);
  if (plan.mode == MixMode::kBatchwise) {
    BatchwiseMixer mixer(supervised, semi, ratio, plan.batch_size, rng);
    while (out.size() < count) {
      auto batch = mixer.NextBatch();
      out.insert(out.end(), batch.begin(), batch.end());
    }
  } else {
    UniformMixer mixer(supervised, semi, rng);
    while (out.size() < count) out.push_back(mixer.Next());
  }
  return out;
}

}  // namespace nst
