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

#include "nst/filtering.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

#include "nst/errors.h"
#include "nst/scoring.h"

namespace nst {

FilterModel FitFilter(std::span<const LengthScore> pairs) {
  if (pairs.size() < 3) {
    throw std::invalid_argument("fit filter: need at least 3 (length, score) "
                                "pairs, got " + std::to_string(pairs.size()));
  }
  const double n = static_cast<double>(pairs.size());
  double mean_l = 0.0, mean_s = 0.0;
  for (const auto& p : pairs) {
    if (p.length < 1) {
      throw std::invalid_argument("fit filter: token lengths must be >= 1");
    }
    if (!std::isfinite(p.score)) {
      throw std::invalid_argument("fit filter: scores must be finite");
    }
    mean_l += static_cast<double>(p.length);
    mean_s += p.score;
  }
  mean_l /= n;
  mean_s /= n;

  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : pairs) {
    const double dl = static_cast<double>(p.length) - mean_l;
    sxx += dl * dl;
    sxy += dl * (p.score - mean_s);
  }
  const bool single_length = std::all_of(pairs.begin(), pairs.end(), [&](const auto& p) {
    return p.length == pairs.front().length;
  });
  if (single_length) {
    throw DegenerateFitError("fit filter: all token lengths are equal (" +
                             std::to_string(pairs.front().length) + ")");
  }

  FilterModel model;
  model.mu = sxy / sxx;
  model.beta = mean_s - model.mu * mean_l;

  std::vector<double> z;
  z.reserve(pairs.size());
  double mean_z = 0.0;
  for (const auto& p : pairs) {
    const double l = static_cast<double>(p.length);
    z.push_back((p.score - model.mu * l - model.beta) / std::sqrt(l));
    mean_z += z.back();
  }
  mean_z /= n;
  double var = 0.0;
  for (double v : z) var += (v - mean_z) * (v - mean_z);
  model.sigma = std::max(std::sqrt(var / n), kSigmaFloor);
  return model;
}

double FilterScore(const FilterModel& model, double fused_score,
                   std::size_t length) {
  if (length == 0) return -std::numeric_limits<double>::infinity();
  const double l = static_cast<double>(length);
  return (fused_score - model.mu * l - model.beta) / (model.sigma * std::sqrt(l));
}

Dataset ApplyFilter(const Dataset& dataset, const FilterModel& model,
                    double cutoff) {
  Dataset kept;
  for (const auto& u : dataset.utterances) {
    if (!u.score) {
      throw std::invalid_argument("filter: utterance '" + u.id +
                                  "' has no fusion score");
    }
    if (!u.transcript) {
      throw std::invalid_argument("filter: utterance '" + u.id +
                                  "' has no transcript");
    }
    if (PassesCutoff(FilterScore(model, *u.score, u.transcript->length()), cutoff)) {
      kept.utterances.push_back(u);
    }
  }
  return kept;
}

FilterSchedule::FilterSchedule(std::vector<double> cutoffs)
    : cutoffs_(std::move(cutoffs)) {
  if (cutoffs_.empty()) throw std::invalid_argument("filter schedule is empty");
  for (double c : cutoffs_) {
    if (std::isnan(c) || c == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("filter schedule: cutoffs must be real or -inf");
    }
  }
}

double FilterSchedule::cutoff(std::size_t generation) const {
  if (generation >= cutoffs_.size()) {
    throw std::out_of_range("filter schedule has no entry for generation " +
                            std::to_string(generation));
  }
  return cutoffs_[generation];
}

std::vector<double> ThresholdGrid(double lo, double hi, double step) {
  if (!(step > 0) || hi < lo) {
    throw std::invalid_argument("threshold grid: need step > 0 and hi >= lo");
  }
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

std::vector<CurveRow> ScoreCurves(std::span<const CurveItem> items,
                                  const FilterModel& model,
                                  std::span<const double> thresholds,
                                  const TokenVocab& vocab) {
  std::vector<double> scores;
  std::vector<EditCounts> edits;
  double total_tokens = 0.0;
  scores.reserve(items.size());
  for (const auto& item : items) {
    scores.push_back(FilterScore(model, item.fused_score, item.hypothesis.length()));
    edits.push_back(WordEdits(item.reference, item.hypothesis, vocab));
    total_tokens += static_cast<double>(item.hypothesis.length());
  }

  std::vector<CurveRow> rows;
  rows.reserve(thresholds.size());
  for (double t : thresholds) {
    CurveRow row;
    row.threshold = t;
    std::size_t kept = 0;
    double tokens = 0.0;
    EditCounts sum;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!PassesCutoff(scores[i], t)) continue;
      ++kept;
      tokens += static_cast<double>(items[i].hypothesis.length());
      sum += edits[i];
    }
    const double n = static_cast<double>(items.size());
    row.utterance_fraction = items.empty() ? 0.0 : kept / n;
    row.token_fraction = total_tokens > 0 ? tokens / total_tokens : 0.0;
    if (sum.reference_length > 0) {
      row.wer = static_cast<double>(sum.errors()) /
                static_cast<double>(sum.reference_length);
    }
    rows.push_back(row);
  }
  return rows;
}

void WriteCurveTsv(std::span<const CurveRow> rows, std::ostream& out) {
  out << "threshold\tutt_frac\ttok_frac\twer\n";
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.threshold << '\t' << r.utterance_fraction << '\t'
        << r.token_fraction << '\t';
    if (r.wer) {
      out << *r.wer;
    } else {
      out << "nan";
    }
    out << '\n';
  }
}

double NormalSurvival(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double SurvivalKsDistance(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("ks distance: no scores");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  // Empirical CDF steps from i/n to (i+1)/n at sorted[i]; the survival
  // distance equals the CDF distance.
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = 1.0 - NormalSurvival(sorted[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - cdf),
                  std::abs(static_cast<double>(i) / n - cdf)});
  }
  return d;
}

}  // namespace nst
