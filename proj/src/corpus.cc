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

#include "nst/corpus.h"

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"
#include "nst/errors.h"

namespace nst {
namespace fs = std::filesystem;

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, float fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols,
                             std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("feature matrix: expected " +
                                std::to_string(rows * cols) + " values, got " +
                                std::to_string(values_.size()));
  }
}

TokenVocab::TokenVocab(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const auto& t = tokens_[i];
    if (t.empty()) {
      throw std::invalid_argument("vocab: empty token at id " +
                                  std::to_string(i));
    }
    if (!index_.emplace(t, static_cast<TokenId>(i)).second) {
      throw std::invalid_argument("vocab: duplicate token '" + t + "'");
    }
  }
}

std::optional<TokenId> TokenVocab::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId TokenVocab::id(std::string_view token) const {
  auto found = find(token);
  if (!found) throw UnknownTokenError(std::string(token));
  return *found;
}

const std::string& TokenVocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw std::out_of_range("vocab: token id " + std::to_string(id) +
                            " out of range");
  }
  return tokens_[id];
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    std::size_t start = i;
    while (i < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

Transcript WhitespaceTokenizer::Encode(std::string_view text,
                                       const TokenVocab& vocab) const {
  Transcript out;
  for (const auto& word : SplitWords(text)) out.tokens.push_back(vocab.id(word));
  return out;
}

std::string WhitespaceTokenizer::Decode(const Transcript& transcript,
                                        const TokenVocab& vocab) const {
  std::string out;
  for (std::size_t i = 0; i < transcript.tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += vocab.token(transcript.tokens[i]);
  }
  return out;
}

Transcript Tokenize(std::string_view text, const TokenVocab& vocab) {
  return WhitespaceTokenizer().Encode(text, vocab);
}

std::string Detokenize(const Transcript& transcript, const TokenVocab& vocab) {
  return WhitespaceTokenizer().Decode(transcript, vocab);
}

TokenDistribution::TokenDistribution(std::vector<double> probabilities)
    : probs_(std::move(probabilities)) {
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("token distribution: negative or non-finite "
                                  "probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("token distribution: probabilities sum to " +
                                std::to_string(total));
  }
}

TokenDistribution TokenDistribution::FromCounts(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw std::invalid_argument("token counts must be >= 0");
    total += c;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("token distribution: no tokens in input");
  }
  std::vector<double> probs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) probs[i] = counts[i] / total;
  return TokenDistribution(std::move(probs));
}

std::vector<double> TokenCounts(std::span<const Transcript> transcripts,
                                std::size_t vocab_size,
                                std::span<const int> weights) {
  if (!weights.empty() && weights.size() != transcripts.size()) {
    throw std::invalid_argument("token counts: weights/transcripts size mismatch");
  }
  std::vector<double> counts(vocab_size, 0.0);
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    const double w = weights.empty() ? 1.0 : static_cast<double>(weights[i]);
    if (w < 0) throw std::invalid_argument("token counts: negative weight");
    for (TokenId t : transcripts[i].tokens) {
      if (t < 0 || static_cast<std::size_t>(t) >= vocab_size) {
        throw std::out_of_range("token id " + std::to_string(t) +
                                " outside vocab of size " +
                                std::to_string(vocab_size));
      }
      counts[t] += w;
    }
  }
  return counts;
}

TokenDistribution ComputeTokenDistribution(
    std::span<const Transcript> transcripts, std::size_t vocab_size,
    std::span<const int> weights) {
  auto counts = TokenCounts(transcripts, vocab_size, weights);
  return TokenDistribution::FromCounts(counts);
}

bool operator==(const Utterance& a, const Utterance& b) {
  if (a.id != b.id || a.transcript != b.transcript || a.score != b.score ||
      a.multiplicity != b.multiplicity) {
    return false;
  }
  if (a.features == b.features) return true;
  if (!a.features || !b.features) return false;
  return *a.features == *b.features;
}

std::size_t Dataset::materialized_size() const {
  std::size_t n = 0;
  for (const auto& u : utterances) n += static_cast<std::size_t>(u.multiplicity);
  return n;
}

std::size_t Dataset::token_total() const {
  std::size_t n = 0;
  for (const auto& u : utterances) {
    if (u.transcript) n += u.transcript->length() * u.multiplicity;
  }
  return n;
}

void Dataset::Validate() const {
  std::unordered_set<std::string> seen;
  std::optional<std::size_t> cols;
  for (const auto& u : utterances) {
    if (!seen.insert(u.id).second) {
      throw std::invalid_argument("dataset: duplicate utterance id '" + u.id +
                                  "'");
    }
    if (!u.features || u.features->rows() == 0) {
      throw std::invalid_argument("dataset: utterance '" + u.id +
                                  "' has no feature frames");
    }
    if (cols && *cols != u.features->cols()) {
      throw std::invalid_argument("dataset: utterance '" + u.id + "' has " +
                                  std::to_string(u.features->cols()) +
                                  " feature columns, expected " +
                                  std::to_string(*cols));
    }
    cols = u.features->cols();
    if (u.multiplicity < 1) {
      throw std::invalid_argument("dataset: utterance '" + u.id +
                                  "' has multiplicity < 1");
    }
  }
}

std::vector<Transcript> Dataset::transcripts() const {
  std::vector<Transcript> out;
  out.reserve(utterances.size());
  for (const auto& u : utterances) out.push_back(u.transcript.value_or(Transcript{}));
  return out;
}

namespace {

constexpr std::array<char, 4> kFeatureMagic = {'N', 'S', 'T', 'F'};

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string ReadAll(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void WriteFeatureFile(const FeatureMatrix& matrix, const fs::path& path) {
  std::string buf;
  buf.reserve(12 + matrix.values().size() * 4);
  buf.append(kFeatureMagic.data(), kFeatureMagic.size());
  PutU32(buf, static_cast<std::uint32_t>(matrix.rows()));
  PutU32(buf, static_cast<std::uint32_t>(matrix.cols()));
  for (float v : matrix.values()) PutU32(buf, std::bit_cast<std::uint32_t>(v));
  AtomicWriteFile(path, buf);
}

FeatureMatrix ReadFeatureFile(const fs::path& path) {
  const std::string buf = ReadAll(path);
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  if (buf.size() < 12 ||
      !std::equal(kFeatureMagic.begin(), kFeatureMagic.end(), buf.begin())) {
    throw std::runtime_error(path.string() + ": not an NSTF feature file");
  }
  const std::uint32_t rows = GetU32(p + 4);
  const std::uint32_t cols = GetU32(p + 8);
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  if (buf.size() != 12 + 4 * n) {
    throw std::runtime_error(path.string() + ": feature file size mismatch");
  }
  std::vector<float> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = std::bit_cast<float>(GetU32(p + 12 + 4 * i));
  }
  return FeatureMatrix(rows, cols, std::move(values));
}

TokenVocab LoadVocab(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError(path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return TokenVocab(std::move(tokens));
}

void SaveVocab(const TokenVocab& vocab, const fs::path& path) {
  std::string out;
  for (const auto& t : vocab.tokens()) {
    out += t;
    out.push_back('\n');
  }
  AtomicWriteFile(path, out);
}

Dataset LoadManifest(const fs::path& path, const TokenVocab& vocab) {
  std::ifstream in(path);
  if (!in) throw MissingFileError(path.string());
  const fs::path base = path.parent_path();
  const std::string source = path.string();

  Dataset dataset;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, lineno, "malformed JSON");
    }
    if (!obj.is_object()) throw ParseError(source, lineno, "expected an object");
    if (!obj.contains("id") || !obj["id"].is_string()) {
      throw ParseError(source, lineno, "missing string field 'id'");
    }
    if (!obj.contains("features") || !obj["features"].is_string()) {
      throw ParseError(source, lineno, "missing string field 'features'");
    }

    Utterance u;
    u.id = obj["id"].get<std::string>();
    if (auto it = obj.find("transcript"); it != obj.end() && !it->is_null()) {
      if (!it->is_array()) throw ParseError(source, lineno, "'transcript' must be an array");
      Transcript t;
      for (const auto& tok : *it) {
        if (!tok.is_string()) {
          throw ParseError(source, lineno, "transcript tokens must be strings");
        }
        auto id = vocab.find(tok.get<std::string>());
        if (!id) {
          throw ParseError(source, lineno,
                           "unknown token '" + tok.get<std::string>() + "'");
        }
        t.tokens.push_back(*id);
      }
      u.transcript = std::move(t);
    }
    if (auto it = obj.find("score"); it != obj.end() && !it->is_null()) {
      if (!it->is_number()) throw ParseError(source, lineno, "'score' must be a number");
      u.score = it->get<double>();
    }
    if (auto it = obj.find("multiplicity"); it != obj.end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<long long>() < 1) {
        throw ParseError(source, lineno, "'multiplicity' must be an integer >= 1");
      }
      u.multiplicity = it->get<int>();
    }
    const fs::path feature_path = base / obj["features"].get<std::string>();
    if (!fs::exists(feature_path)) throw MissingFileError(feature_path.string());
    u.features = std::make_shared<const FeatureMatrix>(ReadFeatureFile(feature_path));
    dataset.utterances.push_back(std::move(u));
  }
  try {
    dataset.Validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(source + ": " + e.what());
  }
  return dataset;
}

void SaveManifest(const Dataset& dataset, const fs::path& path,
                  const TokenVocab& vocab) {
  const fs::path dir = path.parent_path();
  const std::string feat_dir_name = path.stem().string() + ".feats";
  if (!dir.empty()) fs::create_directories(dir);
  fs::create_directories(dir / feat_dir_name);

  std::string out;
  for (std::size_t i = 0; i < dataset.utterances.size(); ++i) {
    const auto& u = dataset.utterances[i];
    if (!u.features) {
      throw std::invalid_argument("save manifest: utterance '" + u.id +
                                  "' has no features");
    }
    std::ostringstream name;
    name << std::setw(6) << std::setfill('0') << i << ".nstf";
    const std::string rel = feat_dir_name + "/" + name.str();
    WriteFeatureFile(*u.features, dir / rel);

    nlohmann::ordered_json obj;
    obj["id"] = u.id;
    obj["features"] = rel;
    if (u.transcript) {
      auto arr = nlohmann::ordered_json::array();
      for (TokenId t : u.transcript->tokens) arr.push_back(vocab.token(t));
      obj["transcript"] = std::move(arr);
    }
    if (u.score) {
      if (!std::isfinite(*u.score)) {
        throw std::invalid_argument("save manifest: non-finite score for '" +
                                    u.id + "'");
      }
      obj["score"] = *u.score;
    }
    if (u.multiplicity != 1) obj["multiplicity"] = u.multiplicity;
    out += obj.dump();
    out.push_back('\n');
  }
  AtomicWriteFile(path, out);
}

void AtomicWriteFile(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace nst
