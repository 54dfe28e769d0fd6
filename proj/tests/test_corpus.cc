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


#include <cmath>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "nst/corpus.h"
#include "nst/errors.h"
#include "test_util.h"

using namespace nst;

namespace {

TokenVocab AbcVocab() { return TokenVocab({"a", "b", "c"}); }

}  // namespace

TEST_CASE("vocab lookups") {
  const auto vocab = AbcVocab();
  CHECK(vocab.size() == 3);
  CHECK(vocab.id("b") == 1);
  CHECK(vocab.token(2) == "c");
  CHECK_FALSE(vocab.find("z").has_value());
  CHECK_THROWS_AS(vocab.id("z"), UnknownTokenError);
  CHECK_THROWS_AS(TokenVocab({"a", "a"}), std::invalid_argument);
  CHECK_THROWS_AS(TokenVocab({"a", ""}), std::invalid_argument);
}

TEST_CASE("tokenize round trip") {
  const auto vocab = AbcVocab();
  const auto t = Tokenize("  a  c b\tb ", vocab);
  CHECK(t.tokens == std::vector<TokenId>{0, 2, 1, 1});
  CHECK(Detokenize(t, vocab) == "a c b b");
  CHECK(Tokenize("", vocab).length() == 0);
  CHECK_THROWS_AS(Tokenize("a q", vocab), UnknownTokenError);
  CHECK(SplitWords(" x  y ") == std::vector<std::string>{"x", "y"});
}

TEST_CASE("token distribution") {
  const std::vector<Transcript> ts = {{{0, 0, 1}}, {{2}}};
  const auto d = ComputeTokenDistribution(ts, 3);
  CHECK(d[0] == doctest::Approx(0.5));
  CHECK(d[1] == doctest::Approx(0.25));
  CHECK(d[2] == doctest::Approx(0.25));

  const std::vector<int> weights = {1, 2};
  const auto counts = TokenCounts(ts, 3, weights);
  CHECK(counts == std::vector<double>{2, 1, 2});

  CHECK_THROWS_AS(TokenDistribution({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(TokenDistribution({1.5, -0.5}), std::invalid_argument);
  const std::vector<double> zeros = {0, 0};
  CHECK_THROWS_AS(TokenDistribution::FromCounts(zeros), std::invalid_argument);
}

TEST_CASE("dataset totals and validation") {
  Dataset d;
  auto feats = std::make_shared<const FeatureMatrix>(2, 3, 1.0f);
  d.utterances.push_back({"u1", feats, Transcript{{0, 1}}, std::nullopt, 2});
  d.utterances.push_back({"u2", feats, Transcript{{2}}, std::nullopt, 1});
  CHECK(d.materialized_size() == 3);
  CHECK(d.token_total() == 5);
  CHECK_NOTHROW(d.Validate());

  Dataset dup = d;
  dup.utterances[1].id = "u1";
  CHECK_THROWS_AS(dup.Validate(), std::invalid_argument);

  Dataset bad_mult = d;
  bad_mult.utterances[0].multiplicity = 0;
  CHECK_THROWS_AS(bad_mult.Validate(), std::invalid_argument);

  Dataset bad_cols = d;
  bad_cols.utterances[1].features = std::make_shared<const FeatureMatrix>(2, 4, 0.0f);
  CHECK_THROWS_AS(bad_cols.Validate(), std::invalid_argument);
}

TEST_CASE("feature file round trip") {
  testing::TempDir dir("feat");
  FeatureMatrix m(3, 2, std::vector<float>{1.5f, -2.0f, 0.0f, 3.25f,
                                            std::numeric_limits<float>::min(), 7.0f});
  WriteFeatureFile(m, dir.path() / "m.nstf");
  CHECK(ReadFeatureFile(dir.path() / "m.nstf") == m);
  CHECK_THROWS_AS(ReadFeatureFile(dir.path() / "missing.nstf"), MissingFileError);

  std::ofstream(dir.path() / "junk.nstf") << "not a feature file";
  CHECK_THROWS(ReadFeatureFile(dir.path() / "junk.nstf"));
}

TEST_CASE("manifest round trip preserves everything") {
  testing::TempDir dir("manifest");
  const auto vocab = AbcVocab();
  Dataset d;
  d.utterances.push_back({"u1", std::make_shared<const FeatureMatrix>(2, 3, 0.5f),
                          Transcript{{0, 1}}, -3.5, 2});
  d.utterances.push_back({"u2", std::make_shared<const FeatureMatrix>(1, 3, -1.0f),
                          std::nullopt, std::nullopt, 1});
  d.utterances.push_back({"u3", std::make_shared<const FeatureMatrix>(4, 3, 2.0f),
                          Transcript{}, 0.25, 1});
  SaveVocab(vocab, dir.path() / "vocab.txt");
  CHECK(LoadVocab(dir.path() / "vocab.txt") == vocab);
  SaveManifest(d, dir.path() / "m.jsonl", vocab);
  const auto loaded = LoadManifest(dir.path() / "m.jsonl", vocab);
  CHECK(loaded == d);

  // Writing the loaded copy again yields identical bytes.
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  SaveManifest(loaded, dir.path() / "m2.jsonl", vocab);
  std::string a = slurp(dir.path() / "m.jsonl");
  std::string b = slurp(dir.path() / "m2.jsonl");
  // Sidecar directories differ by name only.
  for (auto* s : {&a, &b}) {
    for (auto pos = s->find("m2.feats"); pos != std::string::npos; pos = s->find("m2.feats")) {
      s->replace(pos, 8, "m.feats");
    }
  }
  CHECK(a == b);
}

TEST_CASE("manifest errors carry line numbers") {
  testing::TempDir dir("manifest_err");
  const auto vocab = AbcVocab();
  Dataset d;
  d.utterances.push_back({"u1", std::make_shared<const FeatureMatrix>(2, 3, 0.5f),
                          Transcript{{0}}, std::nullopt, 1});
  SaveManifest(d, dir.path() / "m.jsonl", vocab);
  std::string good;
  {
    std::ifstream in(dir.path() / "m.jsonl");
    std::getline(in, good);
  }

  std::ofstream(dir.path() / "bad.jsonl") << good << "\n\n{not json\n";
  try {
    LoadManifest(dir.path() / "bad.jsonl", vocab);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }

  std::string unknown = good;
  unknown.replace(unknown.find("\"a\""), 3, "\"zz\"");
  std::ofstream(dir.path() / "unk.jsonl") << unknown << "\n";
  try {
    LoadManifest(dir.path() / "unk.jsonl", vocab);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }

  CHECK_THROWS_AS(LoadManifest(dir.path() / "nope.jsonl", vocab), MissingFileError);

  std::filesystem::remove_all(dir.path() / "m.feats");
  CHECK_THROWS_AS(LoadManifest(dir.path() / "m.jsonl", vocab), MissingFileError);
}

TEST_CASE("non-finite scores are not written") {
  testing::TempDir dir("nonfinite");
  const auto vocab = AbcVocab();
  Dataset d;
  d.utterances.push_back({"u1", std::make_shared<const FeatureMatrix>(1, 3, 0.0f),
                          Transcript{{0}}, std::numeric_limits<double>::infinity(), 1});
  CHECK_THROWS_AS(SaveManifest(d, dir.path() / "m.jsonl", vocab), std::invalid_argument);
}
