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
#include <string>
#include <vector>

#include "doctest.h"
#include "nst/random.h"
#include "nst/scoring.h"
#include "test_util.h"

using namespace nst;

namespace {

ScoredHypothesis Hyp(std::vector<TokenId> tokens, double am, double lm, double coverage = 0) {
  return {Transcript{std::move(tokens)}, am, lm, coverage, std::nullopt};
}

}  // namespace

TEST_CASE("fuse score examples") {
  FusionParams off;
  CHECK(FuseScore(Hyp({0}, -5, -2, 3), off) == -5.0);
  FusionParams att{0.5, 0.1, 0.0, FusionMode::kAttention};
  CHECK(FuseScore(Hyp({0}, -5, -2, 3), att) == doctest::Approx(-5.7).epsilon(1e-12));
  FusionParams rnnt{0.5, 0.0, 0.25, FusionMode::kTransducer};
  CHECK(FuseScore(Hyp({0, 1, 2, 0}, -5, -2, 3), rnnt) == doctest::Approx(-5.0).epsilon(1e-12));

  // rho is ignored in attention mode, c in transducer mode.
  FusionParams att_rho{0.5, 0.1, 9.0, FusionMode::kAttention};
  CHECK(FuseScore(Hyp({0}, -5, -2, 3), att_rho) == FuseScore(Hyp({0}, -5, -2, 3), att));
  FusionParams rnnt_c{0.5, 9.0, 0.25, FusionMode::kTransducer};
  CHECK(FuseScore(Hyp({0, 1, 2, 0}, -5, -2, 3), rnnt_c) ==
        FuseScore(Hyp({0, 1, 2, 0}, -5, -2, 3), rnnt));
}

TEST_CASE("fuse score is affine in each parameter") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = Hyp({0, 1, 2}, u(rng), u(rng), std::abs(u(rng)));
    for (auto mode : {FusionMode::kAttention, FusionMode::kTransducer}) {
      FusionParams p{u(rng), u(rng), u(rng), mode};
      for (int axis = 0; axis < 3; ++axis) {
        auto at = [&](double x) {
          FusionParams q = p;
          (axis == 0 ? q.lm_weight : axis == 1 ? q.coverage_weight : q.nonblank_reward) = x;
          return FuseScore(h, q);
        };
        // f(x) at three points lies on a line.
        const double f0 = at(0), f1 = at(1), f2 = at(2);
        CHECK(f2 - f1 == doctest::Approx(f1 - f0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("rerank picks max fused score, earliest on ties") {
  std::vector<ScoredHypothesis> hyps = {Hyp({0}, -3, -1), Hyp({1}, -2, -5), Hyp({2}, -2, -1)};
  FusionParams off;
  CHECK(RerankBest(hyps, off) == 1);
  FusionParams lm{1.0, 0, 0, FusionMode::kAttention};
  CHECK(RerankBest(hyps, lm) == 2);
  std::vector<ScoredHypothesis> tied = {Hyp({0}, -1, 0), Hyp({1}, -1, 0)};
  CHECK(RerankBest(tied, off) == 0);
  CHECK_THROWS(RerankBest(std::vector<ScoredHypothesis>{}, off));
}

TEST_CASE("fusion grid enumeration") {
  const std::vector<double> l = {0, 1}, c = {0.5, 1.5, 2.5}, r = {};
  const auto grid = MakeFusionGrid(l, c, r, FusionMode::kAttention);
  REQUIRE(grid.size() == 6);
  CHECK(grid[0] == FusionParams{0, 0.5, 0, FusionMode::kAttention});
  CHECK(grid[5] == FusionParams{1, 2.5, 0, FusionMode::kAttention});
}

TEST_CASE("wer examples") {
  CHECK(ComputeWer("a b c", "a b c").wer == 0.0);
  const auto sub = ComputeWer("a b c", "a x c");
  CHECK(sub.wer == doctest::Approx(1.0 / 3.0));
  CHECK(sub.substitutions == 1);
  const auto del = ComputeWer("a b c", "");
  CHECK(del.wer == 1.0);
  CHECK(del.deletions == 3);
  const auto ins = ComputeWer("a", "a b b");
  CHECK(ins.insertions == 2);
  CHECK(ins.wer == 2.0);
  CHECK_THROWS_AS(ComputeWer("", "a"), std::invalid_argument);
}

TEST_CASE("wer matches the exhaustive alignment oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> ref, hyp;
    const int n = UniformInt(rng, 1, 7), m = UniformInt(rng, 0, 7);
    for (int i = 0; i < n; ++i) ref.push_back(std::string(1, static_cast<char>('a' + UniformInt(rng, 0, 2))));
    for (int i = 0; i < m; ++i) hyp.push_back(std::string(1, static_cast<char>('a' + UniformInt(rng, 0, 2))));
    const auto w = ComputeWer(ref, hyp);
    const auto d = testing::ExhaustiveEditDistance<std::string>(ref, hyp);
    CHECK(w.substitutions + w.insertions + w.deletions == d);
    CHECK(w.wer == static_cast<double>(d) / static_cast<double>(n));
    // Length bookkeeping: m = n - D + I.
    CHECK(static_cast<long>(m) == static_cast<long>(n) - static_cast<long>(w.deletions) +
                                      static_cast<long>(w.insertions));
  }
}

TEST_CASE("wer swap symmetry") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> a, b;
    const int n = UniformInt(rng, 1, 8), m = UniformInt(rng, 1, 8);
    for (int i = 0; i < n; ++i) a.push_back(std::to_string(UniformInt(rng, 0, 2)));
    for (int i = 0; i < m; ++i) b.push_back(std::to_string(UniformInt(rng, 0, 2)));
    const auto ab = ComputeWer(a, b), ba = ComputeWer(b, a);
    CHECK(ab.substitutions + ab.insertions + ab.deletions ==
          ba.substitutions + ba.insertions + ba.deletions);
    CHECK((ab.wer == 0.0) == (a == b));
  }
}

TEST_CASE("token error rate and word edits") {
  const TokenVocab vocab({"a", "b"});
  const auto r = TokenErrorRate(Transcript{{0, 1}}, Transcript{{0, 0}});
  CHECK(r.wer == 0.5);
  const auto e = WordEdits(Transcript{{0, 1, 1}}, Transcript{{1}}, vocab);
  CHECK(e.reference_length == 3);
  CHECK(e.errors() == 2);
}

TEST_CASE("grid search returns earliest argmin") {
  const TokenVocab vocab({"a", "b", "c"});
  // Utterance 1: am prefers the wrong "b", lm prefers the right "a".
  // Utterance 2: both agree on "c".
  std::vector<DevDecode> dev = {
      {Transcript{{0}}, {Hyp({1}, -1.0, -4.0), Hyp({0}, -2.0, -1.0)}},
      {Transcript{{2}}, {Hyp({2}, -1.0, -1.0), Hyp({0}, -3.0, -3.0)}},
  };
  const FusionParams none{0, 0, 0, FusionMode::kAttention};
  const FusionParams lm1{1, 0, 0, FusionMode::kAttention};
  const FusionParams lm2{2, 0, 0, FusionMode::kAttention};

  SUBCASE("singleton grid") {
    const std::vector<FusionParams> grid = {none};
    const auto r = GridSearchFusion(grid, dev, vocab);
    CHECK(r.best_index == 0);
    CHECK(r.best == none);
  }
  SUBCASE("strictly better point wins") {
    const std::vector<FusionParams> grid = {none, lm1};
    const auto r = GridSearchFusion(grid, dev, vocab);
    CHECK(r.wers[0] == doctest::Approx(0.5));
    CHECK(r.wers[1] == 0.0);
    CHECK(r.best_index == 1);
  }
  SUBCASE("ties go to the earliest index, exhaustively") {
    // Every arrangement of {none, lm1, lm2}: lm1 and lm2 tie at WER 0.
    std::vector<FusionParams> grid = {none, lm1, lm2};
    std::sort(grid.begin(), grid.end(), [](auto& a, auto& b) { return a.lm_weight < b.lm_weight; });
    do {
      const auto r = GridSearchFusion(grid, dev, vocab);
      std::size_t first_zero = 0;
      while (grid[first_zero] == none) ++first_zero;
      CHECK(r.best_index == first_zero);
      CHECK(r.best == grid[first_zero]);
    } while (std::next_permutation(grid.begin(), grid.end(), [](auto& a, auto& b) {
      return a.lm_weight < b.lm_weight;
    }));
  }
  SUBCASE("all tied") {
    const std::vector<FusionParams> grid = {lm2, lm1, lm2};
    CHECK(GridSearchFusion(grid, dev, vocab).best_index == 0);
  }
  CHECK_THROWS(GridSearchFusion(std::vector<FusionParams>{}, dev, vocab));
}
