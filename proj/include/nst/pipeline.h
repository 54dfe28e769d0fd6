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

// Generation loop of noisy student training.
//
// Generation 0 trains on the supervised set alone. Every later generation
// uses the previous model as teacher: it transcribes the unlabeled set with
// the teacher's tuned fusion parameters, filters the pseudo-labels by
// normalized score, optionally balances them toward the supervised token
// distribution, mixes them with the supervised set, and trains a student
// under the generation's augmentation policy. Each generation ends by
// tuning fusion parameters on dev, recording the fused dev WER, and fitting
// the filter model the next generation will use.
//
// Layout of a work directory:
//   state.json                  progress, metrics, current model/filters
//   gen_NN/model.json           model trained in generation NN
//   gen_NN/semi.jsonl           semi-supervised set used by generation NN
//   gen_NN/dev_<subset>.jsonl   fused dev decodes of the generation's model
//   reports/*.tsv               written by EmitReports

#ifndef NST_PIPELINE_H_
#define NST_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nst/augment.h"
#include "nst/balancing.h"
#include "nst/corpus.h"
#include "nst/filtering.h"
#include "nst/mixing.h"
#include "nst/recognizer.h"
#include "nst/scoring.h"

namespace nst {

struct GenerationConfig {
  int generation = 0;
  double cutoff = kNoCutoff;
  bool filtering = true;
  bool balancing = false;
  AugmentPolicy augment;
  MixPlan mix;
  // Length of the mixed training stream in epochs: passes over the combined
  // pool (uniform) or over the side needing more batches (batchwise).
  int stream_epochs = 1;
  // Falls back to PipelineConfig::fusion_grid when empty.
  std::vector<FusionParams> fusion_grid;
};

// A dev set and the unlabeled set whose pseudo-labels are filtered with the
// filter model fitted on it.
struct DataSubset {
  std::string name = "default";
  std::filesystem::path dev;
  std::filesystem::path unlabeled;
};

struct PipelineConfig {
  std::filesystem::path vocab;
  std::filesystem::path supervised;
  std::vector<DataSubset> subsets;

  int frames_per_token = 4;
  double decode_lm_weight = 1.0;
  int beam = 8;

  std::vector<FusionParams> fusion_grid;
  SamplerConfig sampler;
  // min_token_total comes from the supervised set unless given.
  bool min_tokens_from_supervised = true;

  double report_lo = -3.0;
  double report_hi = 3.0;
  double report_step = 0.1;

  std::vector<GenerationConfig> generations;

  // Throws std::invalid_argument.
  void Validate() const;
};

// Relative paths are resolved against `base_dir`.
PipelineConfig ParsePipelineConfig(const nlohmann::json& json,
                                   const std::filesystem::path& base_dir);
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);

struct GenerationMetrics {
  int generation = 0;
  double dev_wer = 0.0;
  // Materialized size (sum of multiplicities) of the semi-supervised set.
  std::size_t semi_size = 0;
  std::size_t semi_tokens = 0;
  // Pseudo-labels before filtering and balancing.
  std::size_t pseudo_labeled = 0;
  double cutoff = kNoCutoff;
  FusionParams fusion;
  // Fitted on this generation's dev decodes, per subset.
  std::map<std::string, FilterModel> filter_models;
};

struct PipelineState {
  // Number of completed generations; also the next generation to run.
  int generation = 0;
  std::uint64_t seed = 0;
  // Relative to the work directory; empty before generation 0.
  std::string model_path;
  FusionParams fusion;
  std::map<std::string, FilterModel> filter_models;
  std::vector<GenerationMetrics> metrics;
};

nlohmann::json StateToJson(const PipelineState& state);
PipelineState StateFromJson(const nlohmann::json& json);
PipelineState LoadState(const std::filesystem::path& workdir);
// Atomic rename over workdir/state.json.
void SaveState(const PipelineState& state, const std::filesystem::path& workdir);

// Per-stage seed: DeriveSeed(master, generation, stage).
std::uint64_t StageSeed(std::uint64_t master, int generation,
                        const std::string& stage);

class Pipeline {
 public:
  Pipeline(PipelineConfig config, const Recognizer& recognizer,
           std::filesystem::path workdir);

  // Existing workdir/state.json, or a fresh state with `seed`.
  PipelineState Resume(std::uint64_t seed) const;

  // Runs generation state.generation and persists the new state. Stage
  // failures throw StageError and leave state.json untouched.
  PipelineState RunGeneration(const PipelineState& state);

  // Runs up to `max_generations` further generations (all remaining ones
  // by default).
  PipelineState Run(PipelineState state,
                    std::optional<int> max_generations = std::nullopt);

  const PipelineConfig& config() const { return config_; }
  const std::filesystem::path& workdir() const { return workdir_; }

 private:
  void LoadData();

  PipelineConfig config_;
  const Recognizer& recognizer_;
  std::filesystem::path workdir_;
  bool loaded_ = false;
  TokenVocab vocab_;
  Dataset supervised_;
  std::vector<Dataset> dev_;
  std::vector<Dataset> unlabeled_;
};

// Synthetic toy task: vocab.txt, supervised.jsonl, dev.jsonl,
// unlabeled.jsonl (no transcripts), unlabeled_reference.jsonl and a
// three-generation config.json with cutoffs 1, 0, -inf, balancing and 4:6
// batchwise mixing.
struct ToyTaskOptions {
  int vocab_size = 20;
  double noise = 1.1;
  int frames_per_token = 4;
  int supervised = 200;
  int unlabeled = 2000;
  int dev = 300;
  std::uint64_t seed = 1;
};

// Returns the path of the written config.
std::filesystem::path WriteToyTask(const ToyTaskOptions& options,
                                   const std::filesystem::path& out_dir);

// Writes fig1_wer_by_generation.tsv, fig5_wer_vs_semi_size.tsv and one
// fig2_fig3_score_curves_gen_<NN>_<subset>.tsv per generation and subset into
// workdir/reports. Returns the written paths. Throws std::runtime_error
// ("no generations completed") when the state has no metrics.
std::vector<std::filesystem::path> EmitReports(
    const std::filesystem::path& workdir, const PipelineConfig& config);

// Metrics table: generation, dev_wer, semi_size, semi_tokens, cutoff.
void WriteMetricsTsv(std::span<const GenerationMetrics> metrics,
                     std::ostream& out);

// Pairs every generation of `a` with the generation of `b` closest in
// semi-supervised size. Columns: label_a, gen_a, semi_size_a, dev_wer_a,
// label_b, gen_b, semi_size_b, dev_wer_b.
void WriteSizeComparison(std::span<const GenerationMetrics> a,
                         const std::string& label_a,
                         std::span<const GenerationMetrics> b,
                         const std::string& label_b, std::ostream& out);

}  // namespace nst

#endif  // NST_PIPELINE_H_
