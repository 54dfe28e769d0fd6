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

#include "nst/balancing.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace nst {

void SamplerConfig::Validate() const {
  if (multiplicity_cap < 1) {
    throw std::invalid_argument("sampler: multiplicity cap must be >= 1");
  }
  if (!(batch_fraction > 0.0 && batch_fraction <= 1.0)) {
    throw std::invalid_argument("sampler: batch fraction must be in (0, 1]");
  }
  if (!(smoothing_epsilon > 0.0)) {
    throw std::invalid_argument("sampler: smoothing epsilon must be > 0");
  }
}

std::size_t SamplerConfig::BatchSize(std::size_t pool_size) const {
  const auto b = static_cast<std::size_t>(
      std::ceil(batch_fraction * static_cast<double>(pool_size)));
  return std::max<std::size_t>(b, 1);
}

namespace {

// Smoothed log target, shared by every KL evaluation of one sampling run.
class SmoothedTarget {
 public:
  SmoothedTarget(const TokenDistribution& q, double epsilon)
      : epsilon_(epsilon),
        norm_(1.0 + static_cast<double>(q.vocab_size()) * epsilon),
        log_q_(q.vocab_size()) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("kl: epsilon must be > 0");
    for (std::size_t i = 0; i < log_q_.size(); ++i) {
      log_q_[i] = std::log((q.probabilities()[i] + epsilon) / norm_);
    }
  }

  std::size_t size() const { return log_q_.size(); }

  // KL of the smoothed distribution of `counts` with total `total`.
  double Kl(std::span<const double> counts, double total) const {
    double kl = 0.0;
    for (std::size_t i = 0; i < log_q_.size(); ++i) {
      const double p = total > 0.0 ? counts[i] / total : 0.0;
      const double pt = (p + epsilon_) / norm_;
      kl += pt * (std::log(pt) - log_q_[i]);
    }
    return std::max(kl, 0.0);
  }

 private:
  double epsilon_;
  double norm_;
  std::vector<double> log_q_;
};

double Total(std::span<const double> counts) {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

// Token histogram of one sentence as (id, count) pairs, ids ascending.
std::vector<std::pair<TokenId, double>> SparseCounts(const Transcript& t,
                                                     std::size_t vocab_size) {
  std::vector<TokenId> sorted = t.tokens;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<TokenId, double>> out;
  for (TokenId id : sorted) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
      throw std::out_of_range("token id " + std::to_string(id) +
                              " outside target vocab");
    }
    if (!out.empty() && out.back().first == id) {
      out.back().second += 1.0;
    } else {
      out.emplace_back(id, 1.0);
    }
  }
  return out;
}

}  // namespace

double KlDivergence(const TokenDistribution& p, const TokenDistribution& q,
                    double epsilon) {
  if (p.vocab_size() != q.vocab_size()) {
    throw std::invalid_argument("kl: vocab size mismatch (" +
                                std::to_string(p.vocab_size()) + " vs " +
                                std::to_string(q.vocab_size()) + ")");
  }
  return SmoothedTarget(q, epsilon).Kl(p.probabilities(), 1.0);
}

double KlFromCounts(std::span<const double> counts, const TokenDistribution& q,
                    double epsilon) {
  if (counts.size() != q.vocab_size()) {
    throw std::invalid_argument("kl: vocab size mismatch");
  }
  return SmoothedTarget(q, epsilon).Kl(counts, Total(counts));
}

double CostBenefit(std::span<const double> current_counts,
                   const Transcript& sentence, const TokenDistribution& target,
                   double epsilon) {
  if (sentence.length() == 0) {
    throw std::invalid_argument("cost-benefit: sentence has no tokens");
  }
  if (current_counts.size() != target.vocab_size()) {
    throw std::invalid_argument("cost-benefit: vocab size mismatch");
  }
  const SmoothedTarget q(target, epsilon);
  std::vector<double> next(current_counts.begin(), current_counts.end());
  for (const auto& [id, c] : SparseCounts(sentence, next.size())) next[id] += c;
  const double before = q.Kl(current_counts, Total(current_counts));
  const double after = q.Kl(next, Total(next));
  return (before - after) / static_cast<double>(sentence.length());
}

SampleResult SubmodularSample(std::span<const WeightedSample> pool,
                              const TokenDistribution& target,
                              const SamplerConfig& config) {
  config.Validate();
  if (pool.empty()) throw std::invalid_argument("sampler: empty pool");

  const std::size_t vocab = target.vocab_size();
  const SmoothedTarget q(target, config.smoothing_epsilon);
  const std::size_t batch = config.BatchSize(pool.size());

  std::vector<std::vector<std::pair<TokenId, double>>> sparse;
  sparse.reserve(pool.size());
  for (const auto& s : pool) sparse.push_back(SparseCounts(s.transcript, vocab));

  std::vector<int> multiplicity(pool.size(), 0);
  std::vector<double> counts(vocab, 0.0);
  double total = 0.0;
  double kl = q.Kl(counts, total);

  SampleResult result;
  std::vector<double> scratch(vocab);
  std::vector<std::pair<double, std::size_t>> scored;
  while (true) {
    scored.clear();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const std::size_t len = pool[i].transcript.length();
      if (len == 0 || multiplicity[i] >= config.multiplicity_cap) continue;
      std::copy(counts.begin(), counts.end(), scratch.begin());
      for (const auto& [id, c] : sparse[i]) scratch[id] += c;
      const double after = q.Kl(scratch, total + static_cast<double>(len));
      scored.emplace_back((kl - after) / static_cast<double>(len), i);
    }
    if (scored.empty()) break;

    const std::size_t take = std::min(batch, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;
                      });
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t i = scored[k].second;
      ++multiplicity[i];
      for (const auto& [id, c] : sparse[i]) counts[id] += c;
      total += static_cast<double>(pool[i].transcript.length());
    }
    ++result.batches;

    const double next_kl = q.Kl(counts, total);
    const bool improved = next_kl < kl;
    kl = next_kl;
    if (total >= static_cast<double>(config.min_token_total) && !improved) break;
  }

  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (multiplicity[i] == 0) continue;
    result.samples.push_back({pool[i].id, pool[i].transcript, multiplicity[i]});
  }
  result.token_total = static_cast<std::size_t>(total);
  result.infeasible = result.token_total < config.min_token_total;
  result.final_kl = kl;
  return result;
}

Dataset ApplySampling(const Dataset& pool, const SampleResult& result) {
  std::unordered_map<std::string, int> chosen;
  for (const auto& s : result.samples) chosen.emplace(s.id, s.multiplicity);
  Dataset out;
  for (const auto& u : pool.utterances) {
    auto it = chosen.find(u.id);
    if (it == chosen.end()) continue;
    Utterance copy = u;
    copy.multiplicity = it->second;
    out.utterances.push_back(std::move(copy));
  }
  return out;
}

}  // namespace nst
