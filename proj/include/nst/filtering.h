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

// Length-normalized confidence score for pseudo-labels:
//
//   s(S, l) = (S - mu * l - beta) / (sigma * sqrt(l))
//
// where S is the fusion score of a hypothesis and l its token count. mu and
// beta come from a least-squares fit of S on l over dev hypotheses, sigma is
// the spread of the length-normalized residuals on the same set.

#ifndef NST_FILTERING_H_
#define NST_FILTERING_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "nst/corpus.h"

namespace nst {

inline constexpr double kSigmaFloor = 1e-12;
inline constexpr double kNoCutoff = -std::numeric_limits<double>::infinity();

struct FilterModel {
  double mu = 0.0;
  double beta = 0.0;
  double sigma = 1.0;

  friend bool operator==(const FilterModel&, const FilterModel&) = default;
};

struct LengthScore {
  std::size_t length = 0;
  double score = 0.0;
};

// Ordinary least squares of score on length, then sigma as the population
// standard deviation of (score - mu*l - beta)/sqrt(l), floored at
// kSigmaFloor. Needs >= 3 pairs, all lengths >= 1, two distinct lengths.
// Throws std::invalid_argument, or DegenerateFitError for a single length.
FilterModel FitFilter(std::span<const LengthScore> pairs);

// -inf for blank transcripts (length 0).
double FilterScore(const FilterModel& model, double fused_score,
                   std::size_t length);

// True when `score` survives `cutoff`. The -inf cutoff keeps everything,
// -inf scores included.
inline bool PassesCutoff(double score, double cutoff) {
  return cutoff == kNoCutoff || score > cutoff;
}

// Keeps utterances whose filter score passes the cutoff, in order. Every
// utterance needs a score and a transcript; throws std::invalid_argument
// naming the first one without.
Dataset ApplyFilter(const Dataset& dataset, const FilterModel& model,
                    double cutoff);

// Cutoffs per generation, -inf meaning no filtering.
class FilterSchedule {
 public:
  explicit FilterSchedule(std::vector<double> cutoffs);
  double cutoff(std::size_t generation) const;
  std::size_t size() const { return cutoffs_.size(); }
  const std::vector<double>& cutoffs() const { return cutoffs_; }

 private:
  std::vector<double> cutoffs_;
};

// One dev utterance as seen by the score analysis.
struct CurveItem {
  Transcript reference;
  Transcript hypothesis;
  double fused_score = 0.0;
};

struct CurveRow {
  double threshold = 0.0;
  double utterance_fraction = 0.0;
  // Share of hypothesis tokens above the threshold.
  double token_fraction = 0.0;
  // Corpus WER of utterances above the threshold; empty when none are.
  std::optional<double> wer;
};

// `count` evenly spaced thresholds from lo to hi inclusive, count =
// round((hi - lo) / step) + 1.
std::vector<double> ThresholdGrid(double lo, double hi, double step);

std::vector<CurveRow> ScoreCurves(std::span<const CurveItem> items,
                                  const FilterModel& model,
                                  std::span<const double> thresholds,
                                  const TokenVocab& vocab);

// Columns: threshold, utt_frac, tok_frac, wer ("nan" when undefined).
void WriteCurveTsv(std::span<const CurveRow> rows, std::ostream& out);

// Standard normal survival function P(Z > x).
double NormalSurvival(double x);

// Kolmogorov-Smirnov distance between the empirical survival function of
// `scores` and the standard normal survival function.
double SurvivalKsDistance(std::span<const double> scores);

}  // namespace nst

#endif  // NST_FILTERING_H_
