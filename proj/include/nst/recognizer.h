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

// Recognizer interface used by the pipeline, and a synthetic noisy-channel
// task with a matching toy recognizer.
//
// Toy channel: every token is rendered as `frames_per_token` copies of its
// one-hot vector plus i.i.d. Gaussian noise. The toy model keeps one
// centroid per token and a bigram LM with add-one smoothing; decoding is an
// exact k-best search over bigram states, one token per frame block.

#ifndef NST_RECOGNIZER_H_
#define NST_RECOGNIZER_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nst/augment.h"
#include "nst/corpus.h"
#include "nst/random.h"
#include "nst/scoring.h"

namespace nst {

class RecognizerModel {
 public:
  virtual ~RecognizerModel() = default;
  // Up to `beam` hypotheses per utterance, best first. Must be deterministic.
  virtual std::vector<std::vector<ScoredHypothesis>> Transcribe(
      std::span<const Utterance> utterances, int beam) const = 0;
  virtual nlohmann::json ToJson() const = 0;
};

class Recognizer {
 public:
  virtual ~Recognizer() = default;
  // Each utterance counts `multiplicity` times; transcripts are labels.
  virtual std::unique_ptr<RecognizerModel> Train(const Dataset& data,
                                                 const AugmentPolicy& policy,
                                                 std::uint64_t seed) const = 0;
  virtual std::unique_ptr<RecognizerModel> LoadModel(
      const nlohmann::json& json) const = 0;
};

// Decodes `dev` and grid-searches fusion parameters on the n-best lists.
GridSearchResult GridSearchFusion(std::span<const FusionParams> grid,
                                  const Dataset& dev,
                                  const RecognizerModel& model, int beam,
                                  const TokenVocab& vocab);

struct ToyWorld {
  int vocab_size = 20;
  double noise = 1.0;
  int frames_per_token = 4;

  int dim() const { return vocab_size; }
};

// Sparse bigram sentence generator.
struct BigramSource {
  std::vector<double> initial;      // vocab_size
  std::vector<double> transitions;  // vocab_size x vocab_size, row = history
  int min_length = 4;
  int max_length = 12;

  int vocab_size() const { return static_cast<int>(initial.size()); }
  std::vector<TokenId> Sample(Rng& rng) const;
};

// Each row puts (1 - floor) of its mass on `branching` random successors
// with exponential weights and spreads `floor` uniformly.
BigramSource MakeBigramSource(int vocab_size, std::uint64_t seed,
                              int branching = 3, double floor = 0.02,
                              int min_length = 4, int max_length = 12);

// Tokens "w00", "w01", ...
TokenVocab ToyVocab(int vocab_size);

// Utterance ids are "<prefix>-000000", ...; every utterance has a reference.
Dataset SynthGenerate(const ToyWorld& world, int count,
                      const BigramSource& source, Rng& rng,
                      const std::string& id_prefix = "utt");

// Same data with transcripts dropped.
Dataset StripTranscripts(const Dataset& dataset);

struct ToyModel {
  int vocab_size = 0;
  int dim = 0;
  int frames_per_token = 1;
  // LM weight used inside the k-best search.
  double decode_lm_weight = 0.0;
  std::vector<double> centroids;  // vocab_size x dim
  // (vocab_size + 1) x vocab_size; the last history row is sentence start.
  std::vector<double> bigram_counts;

  double Centroid(TokenId token, int channel) const {
    return centroids[static_cast<std::size_t>(token) * dim + channel];
  }
  // Add-one smoothed log P(token | history); history == vocab_size is the
  // sentence start.
  double LogProb(int history, TokenId token) const;
  double LmScore(const Transcript& t) const;
  // Number of frame blocks for an utterance of `frames` frames (>= 1).
  std::size_t NumBlocks(std::size_t frames) const;
  // Sum over the block's frames of -||x - centroid||^2, per token.
  std::vector<double> BlockScores(const FeatureMatrix& features,
                                  std::size_t block, std::size_t blocks) const;
  double AmScore(const FeatureMatrix& features, const Transcript& t) const;
};

nlohmann::json ToyModelToJson(const ToyModel& model);
ToyModel ToyModelFromJson(const nlohmann::json& json);

// Centroids from frames split evenly across each transcript's tokens (after
// augmentation), bigram counts from the transcripts. Throws
// std::invalid_argument when no utterance carries a transcript.
ToyModel ToyTrain(const Dataset& data, const AugmentPolicy& policy,
                  std::uint64_t seed, int vocab_size, int frames_per_token,
                  double decode_lm_weight);

// Exact k-best under am + decode_lm_weight * lm; coverage is the number of
// frame blocks.
std::vector<ScoredHypothesis> ToyTranscribe(const ToyModel& model,
                                            const FeatureMatrix& features,
                                            int beam);

class ToyRecognizerModel final : public RecognizerModel {
 public:
  explicit ToyRecognizerModel(ToyModel model) : model_(std::move(model)) {}
  std::vector<std::vector<ScoredHypothesis>> Transcribe(
      std::span<const Utterance> utterances, int beam) const override;
  nlohmann::json ToJson() const override { return ToyModelToJson(model_); }
  const ToyModel& model() const { return model_; }

 private:
  ToyModel model_;
};

class ToyRecognizer final : public Recognizer {
 public:
  ToyRecognizer(int vocab_size, int frames_per_token, double decode_lm_weight)
      : vocab_size_(vocab_size),
        frames_per_token_(frames_per_token),
        decode_lm_weight_(decode_lm_weight) {}

  std::unique_ptr<RecognizerModel> Train(const Dataset& data,
                                         const AugmentPolicy& policy,
                                         std::uint64_t seed) const override;
  std::unique_ptr<RecognizerModel> LoadModel(
      const nlohmann::json& json) const override;

 private:
  int vocab_size_;
  int frames_per_token_;
  double decode_lm_weight_;
};

}  // namespace nst

#endif  // NST_RECOGNIZER_H_
