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

#include "nst/recognizer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace nst {

GridSearchResult GridSearchFusion(std::span<const FusionParams> grid,
                                  const Dataset& dev,
                                  const RecognizerModel& model, int beam,
                                  const TokenVocab& vocab) {
  auto nbest = model.Transcribe(dev.utterances, beam);
  std::vector<DevDecode> decodes;
  decodes.reserve(dev.size());
  for (std::size_t i = 0; i < dev.size(); ++i) {
    const auto& u = dev.utterances[i];
    if (!u.transcript) {
      throw std::invalid_argument("grid search: dev utterance '" + u.id +
                                  "' has no reference");
    }
    decodes.push_back({*u.transcript, std::move(nbest[i])});
  }
  return GridSearchFusion(grid, decodes, vocab);
}

namespace {

std::size_t SampleIndex(std::span<const double> weights, Rng& rng) {
  std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
  return dist(rng);
}

// Frames [first, second) of block `b` out of `blocks`.
std::pair<std::size_t, std::size_t> BlockRange(std::size_t b, std::size_t blocks,
                                               std::size_t frames) {
  return {b * frames / blocks, (b + 1) * frames / blocks};
}

}  // namespace

std::vector<TokenId> BigramSource::Sample(Rng& rng) const {
  const int length = UniformInt(rng, min_length, max_length);
  const auto v = static_cast<std::size_t>(vocab_size());
  std::vector<TokenId> out;
  out.reserve(static_cast<std::size_t>(length));
  out.push_back(static_cast<TokenId>(SampleIndex(initial, rng)));
  for (int i = 1; i < length; ++i) {
    const auto prev = static_cast<std::size_t>(out.back());
    std::span<const double> row(transitions.data() + prev * v, v);
    out.push_back(static_cast<TokenId>(SampleIndex(row, rng)));
  }
  return out;
}

BigramSource MakeBigramSource(int vocab_size, std::uint64_t seed, int branching,
                              double floor, int min_length, int max_length) {
  if (vocab_size < 1 || branching < 1 || branching > vocab_size ||
      floor < 0.0 || floor > 1.0 || min_length < 1 || max_length < min_length) {
    throw std::invalid_argument("bigram source: invalid parameters");
  }
  Rng rng(seed);
  const auto v = static_cast<std::size_t>(vocab_size);
  BigramSource source;
  source.min_length = min_length;
  source.max_length = max_length;
  source.initial.assign(v, 1.0 / static_cast<double>(v));
  source.transitions.assign(v * v, floor / static_cast<double>(v));
  std::exponential_distribution<double> weight(1.0);
  std::vector<std::size_t> ids(v);
  for (std::size_t h = 0; h < v; ++h) {
    for (std::size_t i = 0; i < v; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<double> w(static_cast<std::size_t>(branching));
    double total = 0.0;
    for (auto& x : w) total += (x = weight(rng));
    for (int k = 0; k < branching; ++k) {
      source.transitions[h * v + ids[k]] += (1.0 - floor) * w[k] / total;
    }
  }
  return source;
}

TokenVocab ToyVocab(int vocab_size) {
  std::vector<std::string> tokens;
  for (int i = 0; i < vocab_size; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%02d", i);
    tokens.emplace_back(buf);
  }
  return TokenVocab(std::move(tokens));
}

Dataset SynthGenerate(const ToyWorld& world, int count,
                      const BigramSource& source, Rng& rng,
                      const std::string& id_prefix) {
  if (count < 1) throw std::invalid_argument("synth: count must be >= 1");
  if (world.noise < 0.0 || world.frames_per_token < 1) {
    throw std::invalid_argument("synth: invalid world parameters");
  }
  if (source.vocab_size() != world.vocab_size) {
    throw std::invalid_argument("synth: sentence source vocab size mismatch");
  }
  std::normal_distribution<double> noise(0.0, world.noise);
  const auto dim = static_cast<std::size_t>(world.dim());
  const auto fpt = static_cast<std::size_t>(world.frames_per_token);
  Dataset out;
  out.utterances.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    Transcript t{source.Sample(rng)};
    FeatureMatrix feats(t.length() * fpt, dim);
    for (std::size_t i = 0; i < t.length(); ++i) {
      for (std::size_t f = 0; f < fpt; ++f) {
        auto row = feats.row(i * fpt + f);
        for (std::size_t c = 0; c < dim; ++c) {
          const double onehot = static_cast<std::size_t>(t.tokens[i]) == c ? 1.0 : 0.0;
          row[c] = static_cast<float>(onehot + (world.noise > 0 ? noise(rng) : 0.0));
        }
      }
    }
    char id[32];
    std::snprintf(id, sizeof(id), "-%06d", n);
    Utterance u;
    u.id = id_prefix + id;
    u.features = std::make_shared<const FeatureMatrix>(std::move(feats));
    u.transcript = std::move(t);
    out.utterances.push_back(std::move(u));
  }
  return out;
}

Dataset StripTranscripts(const Dataset& dataset) {
  Dataset out = dataset;
  for (auto& u : out.utterances) {
    u.transcript.reset();
    u.score.reset();
  }
  return out;
}

double ToyModel::LogProb(int history, TokenId token) const {
  const auto v = static_cast<std::size_t>(vocab_size);
  const double* row = bigram_counts.data() + static_cast<std::size_t>(history) * v;
  double total = 0.0;
  for (std::size_t i = 0; i < v; ++i) total += row[i];
  return std::log((row[token] + 1.0) / (total + static_cast<double>(v)));
}

double ToyModel::LmScore(const Transcript& t) const {
  double lm = 0.0;
  int history = vocab_size;
  for (TokenId w : t.tokens) {
    lm += LogProb(history, w);
    history = w;
  }
  return lm;
}

std::size_t ToyModel::NumBlocks(std::size_t frames) const {
  const auto blocks = static_cast<std::size_t>(
      std::llround(static_cast<double>(frames) / frames_per_token));
  return std::clamp<std::size_t>(blocks, 1, std::max<std::size_t>(frames, 1));
}

std::vector<double> ToyModel::BlockScores(const FeatureMatrix& features,
                                          std::size_t block,
                                          std::size_t blocks) const {
  if (features.cols() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("toy model: expected " + std::to_string(dim) +
                                " feature channels, got " +
                                std::to_string(features.cols()));
  }
  const auto [first, last] = BlockRange(block, blocks, features.rows());
  std::vector<double> scores(static_cast<std::size_t>(vocab_size), 0.0);
  for (int k = 0; k < vocab_size; ++k) {
    double s = 0.0;
    for (std::size_t f = first; f < last; ++f) {
      auto x = features.row(f);
      for (int c = 0; c < dim; ++c) {
        const double d = static_cast<double>(x[c]) - Centroid(k, c);
        s += d * d;
      }
    }
    scores[k] = -s;
  }
  return scores;
}

double ToyModel::AmScore(const FeatureMatrix& features,
                         const Transcript& t) const {
  const std::size_t blocks = t.length();
  double am = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) am += BlockScores(features, b, blocks)[t.tokens[b]];
  return am;
}

nlohmann::json ToyModelToJson(const ToyModel& model) {
  const auto v = static_cast<std::size_t>(model.vocab_size);
  const auto d = static_cast<std::size_t>(model.dim);
  nlohmann::json centroids = nlohmann::json::array();
  for (std::size_t k = 0; k < v; ++k) {
    centroids.push_back(std::vector<double>(model.centroids.begin() + k * d,
                                            model.centroids.begin() + (k + 1) * d));
  }
  nlohmann::json bigrams = nlohmann::json::array();
  for (std::size_t h = 0; h <= v; ++h) {
    bigrams.push_back(std::vector<double>(model.bigram_counts.begin() + h * v,
                                          model.bigram_counts.begin() + (h + 1) * v));
  }
  return {{"type", "toy"},
          {"vocab_size", model.vocab_size},
          {"dim", model.dim},
          {"frames_per_token", model.frames_per_token},
          {"decode_lm_weight", model.decode_lm_weight},
          {"centroids", std::move(centroids)},
          {"bigram_counts", std::move(bigrams)}};
}

ToyModel ToyModelFromJson(const nlohmann::json& json) {
  ToyModel m;
  m.vocab_size = json.at("vocab_size").get<int>();
  m.dim = json.at("dim").get<int>();
  m.frames_per_token = json.at("frames_per_token").get<int>();
  m.decode_lm_weight = json.at("decode_lm_weight").get<double>();
  const auto v = static_cast<std::size_t>(m.vocab_size);
  const auto d = static_cast<std::size_t>(m.dim);
  for (const auto& row : json.at("centroids")) {
    auto r = row.get<std::vector<double>>();
    if (r.size() != d) throw std::runtime_error("toy model: bad centroid row");
    m.centroids.insert(m.centroids.end(), r.begin(), r.end());
  }
  for (const auto& row : json.at("bigram_counts")) {
    auto r = row.get<std::vector<double>>();
    if (r.size() != v) throw std::runtime_error("toy model: bad bigram row");
    m.bigram_counts.insert(m.bigram_counts.end(), r.begin(), r.end());
  }
  if (m.centroids.size() != v * d || m.bigram_counts.size() != (v + 1) * v) {
    throw std::runtime_error("toy model: inconsistent table sizes");
  }
  return m;
}

ToyModel ToyTrain(const Dataset& data, const AugmentPolicy& policy,
                  std::uint64_t seed, int vocab_size, int frames_per_token,
                  double decode_lm_weight) {
  policy.Validate();
  if (vocab_size < 1 || frames_per_token < 1) {
    throw std::invalid_argument("toy train: invalid model shape");
  }
  const bool any_labels = std::any_of(data.utterances.begin(), data.utterances.end(),
                                      [](const Utterance& u) { return u.transcript.has_value(); });
  if (data.empty() || !any_labels) {
    throw std::invalid_argument("toy train: no labelled utterances");
  }
  ToyModel m;
  m.vocab_size = vocab_size;
  m.dim = static_cast<int>(data.utterances.front().feats().cols());
  m.frames_per_token = frames_per_token;
  m.decode_lm_weight = decode_lm_weight;
  const auto v = static_cast<std::size_t>(vocab_size);
  const auto d = static_cast<std::size_t>(m.dim);
  std::vector<double> sums(v * d, 0.0);
  std::vector<double> frames_per(v, 0.0);
  m.bigram_counts.assign((v + 1) * v, 0.0);

  for (const auto& u : data.utterances) {
    if (!u.transcript) continue;
    const auto& tokens = u.transcript->tokens;
    for (TokenId t : tokens) {
      if (t < 0 || static_cast<std::size_t>(t) >= v) {
        throw std::out_of_range("toy train: token id out of range in '" + u.id + "'");
      }
    }
    for (int k = 0; k < u.multiplicity; ++k) {
      std::size_t history = v;
      for (TokenId t : tokens) {
        m.bigram_counts[history * v + static_cast<std::size_t>(t)] += 1.0;
        history = static_cast<std::size_t>(t);
      }
      if (tokens.empty()) continue;

      Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(k), u.id));
      const FeatureMatrix x = ApplyPolicy(u.feats(), policy, rng);
      if (x.cols() != d) {
        throw std::invalid_argument("toy train: inconsistent feature width in '" +
                                    u.id + "'");
      }
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto [first, last] = BlockRange(i, tokens.size(), x.rows());
        const auto t = static_cast<std::size_t>(tokens[i]);
        for (std::size_t f = first; f < last; ++f) {
          auto row = x.row(f);
          for (std::size_t c = 0; c < d; ++c) sums[t * d + c] += row[c];
          frames_per[t] += 1.0;
        }
      }
    }
  }
  m.centroids.assign(v * d, 0.0);
  for (std::size_t t = 0; t < v; ++t) {
    if (frames_per[t] == 0.0) continue;
    for (std::size_t c = 0; c < d; ++c) m.centroids[t * d + c] = sums[t * d + c] / frames_per[t];
  }
  return m;
}

namespace {

struct Partial {
  double am = 0.0;
  double lm = 0.0;
  double score = 0.0;
  std::vector<TokenId> tokens;
};

bool Better(const Partial& a, const Partial& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.tokens < b.tokens;
}

void KeepTop(std::vector<Partial>& items, std::size_t k) {
  if (items.size() > k) {
    std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k),
                      items.end(), Better);
    items.resize(k);
  } else {
    std::sort(items.begin(), items.end(), Better);
  }
}

}  // namespace

std::vector<ScoredHypothesis> ToyTranscribe(const ToyModel& model,
                                            const FeatureMatrix& features,
                                            int beam) {
  if (beam < 1) throw std::invalid_argument("transcribe: beam must be >= 1");
  if (features.rows() == 0) throw std::invalid_argument("transcribe: no frames");
  const auto k = static_cast<std::size_t>(beam);
  const auto v = static_cast<std::size_t>(model.vocab_size);
  const double lambda = model.decode_lm_weight;
  const std::size_t blocks = model.NumBlocks(features.rows());
  std::vector<double> log_probs((v + 1) * v);
  for (std::size_t h = 0; h <= v; ++h) {
    for (std::size_t w = 0; w < v; ++w) {
      log_probs[h * v + w] = model.LogProb(static_cast<int>(h), static_cast<TokenId>(w));
    }
  }

  // Top-k partial hypotheses per last token. Extensions only depend on the
  // last token, so this yields the exact k best full sequences.
  std::vector<std::vector<Partial>> states(v);
  {
    const auto am = model.BlockScores(features, 0, blocks);
    for (std::size_t w = 0; w < v; ++w) {
      Partial p;
      p.am = am[w];
      p.lm = log_probs[v * v + w];
      p.score = p.am + lambda * p.lm;
      p.tokens = {static_cast<TokenId>(w)};
      states[w].push_back(std::move(p));
    }
  }
  for (std::size_t b = 1; b < blocks; ++b) {
    const auto am = model.BlockScores(features, b, blocks);
    std::vector<std::vector<Partial>> next(v);
    for (std::size_t w = 0; w < v; ++w) {
      auto& cands = next[w];
      cands.reserve(v * k);
      for (std::size_t h = 0; h < v; ++h) {
        const double lp = log_probs[h * v + w];
        for (const auto& p : states[h]) {
          Partial q;
          q.am = p.am + am[w];
          q.lm = p.lm + lp;
          q.score = q.am + lambda * q.lm;
          cands.push_back(std::move(q));
          cands.back().tokens.reserve(p.tokens.size() + 1);
          cands.back().tokens = p.tokens;
          cands.back().tokens.push_back(static_cast<TokenId>(w));
        }
      }
      KeepTop(cands, k);
    }
    states = std::move(next);
  }

  std::vector<Partial> finals;
  for (auto& s : states) {
    for (auto& p : s) finals.push_back(std::move(p));
  }
  KeepTop(finals, k);

  std::vector<ScoredHypothesis> out;
  out.reserve(finals.size());
  for (auto& p : finals) {
    ScoredHypothesis h;
    h.transcript.tokens = std::move(p.tokens);
    h.am_score = p.am;
    h.lm_score = p.lm;
    h.coverage = static_cast<double>(blocks);
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<std::vector<ScoredHypothesis>> ToyRecognizerModel::Transcribe(
    std::span<const Utterance> utterances, int beam) const {
  std::vector<std::vector<ScoredHypothesis>> out;
  out.reserve(utterances.size());
  for (const auto& u : utterances) out.push_back(ToyTranscribe(model_, u.feats(), beam));
  return out;
}

std::unique_ptr<RecognizerModel> ToyRecognizer::Train(
    const Dataset& data, const AugmentPolicy& policy, std::uint64_t seed) const {
  return std::make_unique<ToyRecognizerModel>(
      ToyTrain(data, policy, seed, vocab_size_, frames_per_token_, decode_lm_weight_));
}

std::unique_ptr<RecognizerModel> ToyRecognizer::LoadModel(
    const nlohmann::json& json) const {
  return std::make_unique<ToyRecognizerModel>(ToyModelFromJson(json));
}

}  // namespace nst
