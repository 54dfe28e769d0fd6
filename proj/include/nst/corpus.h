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

// Data model shared by every stage: feature matrices, transcripts, the
// token vocabulary, token statistics, and manifest persistence.

#ifndef NST_CORPUS_H_
#define NST_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nst {

using TokenId = std::int32_t;

// Row-major float32 matrix; rows are time frames, columns feature channels.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, float fill = 0.0f);
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  float& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  float at(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  std::span<float> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const float> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

struct Transcript {
  std::vector<TokenId> tokens;

  std::size_t length() const { return tokens.size(); }
  friend bool operator==(const Transcript&, const Transcript&) = default;
};

class TokenVocab {
 public:
  TokenVocab() = default;
  // Throws std::invalid_argument on duplicate or empty tokens.
  explicit TokenVocab(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  std::optional<TokenId> find(std::string_view token) const;
  // Throws UnknownTokenError.
  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend bool operator==(const TokenVocab& a, const TokenVocab& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Maps text to token ids and back.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual Transcript Encode(std::string_view text,
                            const TokenVocab& vocab) const = 0;
  virtual std::string Decode(const Transcript& transcript,
                             const TokenVocab& vocab) const = 0;
};

class WhitespaceTokenizer final : public Tokenizer {
 public:
  Transcript Encode(std::string_view text,
                    const TokenVocab& vocab) const override;
  std::string Decode(const Transcript& transcript,
                     const TokenVocab& vocab) const override;
};

// Whitespace tokenization. Throws UnknownTokenError for out-of-vocab tokens.
Transcript Tokenize(std::string_view text, const TokenVocab& vocab);
// Joins tokens with single spaces.
std::string Detokenize(const Transcript& transcript, const TokenVocab& vocab);
// Splits on runs of whitespace.
std::vector<std::string> SplitWords(std::string_view text);

// Dense probability vector indexed by token id.
class TokenDistribution {
 public:
  TokenDistribution() = default;
  // Throws std::invalid_argument unless probabilities are nonnegative and
  // sum to 1 within 1e-9.
  explicit TokenDistribution(std::vector<double> probabilities);
  // Normalizes nonnegative counts. Throws std::invalid_argument on zero total.
  static TokenDistribution FromCounts(std::span<const double> counts);

  std::size_t vocab_size() const { return probs_.size(); }
  double operator[](TokenId id) const { return probs_[id]; }
  std::span<const double> probabilities() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// Weighted token counts over `vocab_size` ids; `weights` defaults to all 1.
std::vector<double> TokenCounts(std::span<const Transcript> transcripts,
                                std::size_t vocab_size,
                                std::span<const int> weights = {});

// Throws std::invalid_argument when the weighted token total is zero.
TokenDistribution ComputeTokenDistribution(
    std::span<const Transcript> transcripts, std::size_t vocab_size,
    std::span<const int> weights = {});

// A pseudo-labeled sentence with its sampling multiplicity.
struct WeightedSample {
  std::string id;
  Transcript transcript;
  int multiplicity = 1;

  friend bool operator==(const WeightedSample&,
                         const WeightedSample&) = default;
};

struct Utterance {
  std::string id;
  std::shared_ptr<const FeatureMatrix> features;
  // Reference for supervised and dev data, pseudo-label for generated data.
  std::optional<Transcript> transcript;
  // Fusion score of the generating hypothesis.
  std::optional<double> score;
  int multiplicity = 1;

  const FeatureMatrix& feats() const { return *features; }
  friend bool operator==(const Utterance& a, const Utterance& b);
};

struct Dataset {
  std::vector<Utterance> utterances;

  std::size_t size() const { return utterances.size(); }
  bool empty() const { return utterances.empty(); }
  // Sum of multiplicities.
  std::size_t materialized_size() const;
  // Token total of transcripts weighted by multiplicity.
  std::size_t token_total() const;
  // Throws std::invalid_argument on duplicate ids, empty feature matrices,
  // inconsistent column counts, or multiplicity < 1.
  void Validate() const;
  std::vector<Transcript> transcripts() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Binary feature file: "NSTF", u32 rows, u32 cols, rows*cols float32, all
// little-endian, row-major.
void WriteFeatureFile(const FeatureMatrix& matrix,
                      const std::filesystem::path& path);
FeatureMatrix ReadFeatureFile(const std::filesystem::path& path);

// One token per line; line index is the token id.
TokenVocab LoadVocab(const std::filesystem::path& path);
void SaveVocab(const TokenVocab& vocab, const std::filesystem::path& path);

// JSON Lines manifest; feature paths are relative to the manifest directory.
// Throws ParseError (with line number) or MissingFileError.
Dataset LoadManifest(const std::filesystem::path& path,
                     const TokenVocab& vocab);
// Writes feature sidecars into "<stem>.feats/" next to the manifest.
void SaveManifest(const Dataset& dataset, const std::filesystem::path& path,
                  const TokenVocab& vocab);

// Writes `contents` to a temporary sibling and renames it over `path`.
void AtomicWriteFile(const std::filesystem::path& path,
                     std::string_view contents);

}  // namespace nst

#endif  // NST_CORPUS_H_
