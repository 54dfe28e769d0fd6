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

#include "nst/pipeline.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "nst/errors.h"
#include "nst/json_io.h"
#include "nst/random.h"

namespace nst {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string GenDir(int generation) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "gen_%02d", generation);
  return buf;
}

GenerationConfig ParseGeneration(const json& j, int index) {
  GenerationConfig g;
  g.generation = index;
  g.cutoff = j.contains("cutoff") ? CutoffFromJson(j.at("cutoff")) : kNoCutoff;
  g.filtering = j.value("filtering", true);
  g.balancing = j.value("balancing", false);
  if (j.contains("augment")) g.augment = j.at("augment").get<AugmentPolicy>();
  if (j.contains("mix")) g.mix = j.at("mix").get<MixPlan>();
  g.stream_epochs = j.value("stream_epochs", g.stream_epochs);
  if (j.contains("fusion_grid")) g.fusion_grid = FusionGridFromJson(j.at("fusion_grid"));
  return g;
}

}  // namespace

void PipelineConfig::Validate() const {
  if (subsets.empty()) throw std::invalid_argument("pipeline config: no dev/unlabeled subsets");
  if (generations.empty()) throw std::invalid_argument("pipeline config: no generations");
  if (beam < 1) throw std::invalid_argument("pipeline config: beam must be >= 1");
  if (frames_per_token < 1) {
    throw std::invalid_argument("pipeline config: frames_per_token must be >= 1");
  }
  sampler.Validate();
  for (const auto& g : generations) {
    g.augment.Validate();
    g.mix.Validate();
    if (g.stream_epochs < 1) {
      throw std::invalid_argument("pipeline config: stream_epochs must be >= 1");
    }
    if (g.fusion_grid.empty() && fusion_grid.empty()) {
      throw std::invalid_argument("pipeline config: generation " +
                                  std::to_string(g.generation) +
                                  " has no fusion grid");
    }
  }
}

PipelineConfig ParsePipelineConfig(const json& j, const fs::path& base_dir) {
  PipelineConfig c;
  c.vocab = Resolve(base_dir, j.at("vocab").get<std::string>());
  c.supervised = Resolve(base_dir, j.at("supervised").get<std::string>());
  if (j.contains("subsets")) {
    for (const auto& s : j.at("subsets")) {
      DataSubset subset;
      subset.name = s.value("name", std::string("default"));
      subset.dev = Resolve(base_dir, s.at("dev").get<std::string>());
      subset.unlabeled = Resolve(base_dir, s.at("unlabeled").get<std::string>());
      c.subsets.push_back(std::move(subset));
    }
  } else {
    DataSubset subset;
    subset.dev = Resolve(base_dir, j.at("dev").get<std::string>());
    subset.unlabeled = Resolve(base_dir, j.at("unlabeled").get<std::string>());
    c.subsets.push_back(std::move(subset));
  }
  if (j.contains("recognizer")) {
    const auto& r = j.at("recognizer");
    c.frames_per_token = r.value("frames_per_token", c.frames_per_token);
    c.decode_lm_weight = r.value("decode_lm_weight", c.decode_lm_weight);
    c.beam = r.value("beam", c.beam);
  }
  if (j.contains("fusion_grid")) c.fusion_grid = FusionGridFromJson(j.at("fusion_grid"));
  if (j.contains("balancing")) {
    const auto& b = j.at("balancing");
    c.sampler.multiplicity_cap = b.value("multiplicity_cap", c.sampler.multiplicity_cap);
    c.sampler.batch_fraction = b.value("batch_fraction", c.sampler.batch_fraction);
    c.sampler.smoothing_epsilon = b.value("smoothing_epsilon", c.sampler.smoothing_epsilon);
    if (b.contains("min_tokens") && !b.at("min_tokens").is_string()) {
      c.min_tokens_from_supervised = false;
      c.sampler.min_token_total = b.at("min_tokens").get<std::size_t>();
    }
  }
  if (j.contains("report")) {
    const auto& r = j.at("report");
    c.report_lo = r.value("lo", c.report_lo);
    c.report_hi = r.value("hi", c.report_hi);
    c.report_step = r.value("step", c.report_step);
  }
  int index = 0;
  for (const auto& g : j.at("generations")) c.generations.push_back(ParseGeneration(g, index++));
  c.Validate();
  return c;
}

PipelineConfig LoadPipelineConfig(const fs::path& path) {
  return ParsePipelineConfig(ReadJsonFile(path), path.parent_path());
}

namespace {

json MetricsToJson(const GenerationMetrics& m) {
  json filters = json::object();
  for (const auto& [name, fm] : m.filter_models) filters[name] = fm;
  return {{"generation", m.generation},
          {"dev_wer", m.dev_wer},
          {"semi_size", m.semi_size},
          {"semi_tokens", m.semi_tokens},
          {"pseudo_labeled", m.pseudo_labeled},
          {"cutoff", CutoffToJson(m.cutoff)},
          {"fusion", m.fusion},
          {"filter_models", std::move(filters)}};
}

GenerationMetrics MetricsFromJson(const json& j) {
  GenerationMetrics m;
  m.generation = j.at("generation").get<int>();
  m.dev_wer = j.at("dev_wer").get<double>();
  m.semi_size = j.at("semi_size").get<std::size_t>();
  m.semi_tokens = j.value("semi_tokens", std::size_t{0});
  m.pseudo_labeled = j.value("pseudo_labeled", std::size_t{0});
  m.cutoff = CutoffFromJson(j.at("cutoff"));
  m.fusion = j.at("fusion").get<FusionParams>();
  if (j.contains("filter_models")) {
    for (const auto& [name, fm] : j.at("filter_models").items()) {
      m.filter_models[name] = fm.get<FilterModel>();
    }
  }
  return m;
}

}  // namespace

json StateToJson(const PipelineState& state) {
  json filters = json::object();
  for (const auto& [name, fm] : state.filter_models) filters[name] = fm;
  json metrics = json::array();
  for (const auto& m : state.metrics) metrics.push_back(MetricsToJson(m));
  // The seed goes out as a string: JSON readers commonly lose 64-bit ints.
  return {{"generation", state.generation},
          {"seed", std::to_string(state.seed)},
          {"model", state.model_path},
          {"fusion", state.fusion},
          {"filter_models", std::move(filters)},
          {"metrics", std::move(metrics)}};
}

PipelineState StateFromJson(const json& j) {
  PipelineState s;
  s.generation = j.at("generation").get<int>();
  s.seed = std::stoull(j.at("seed").get<std::string>());
  s.model_path = j.at("model").get<std::string>();
  s.fusion = j.at("fusion").get<FusionParams>();
  for (const auto& [name, fm] : j.at("filter_models").items()) {
    s.filter_models[name] = fm.get<FilterModel>();
  }
  for (const auto& m : j.at("metrics")) s.metrics.push_back(MetricsFromJson(m));
  if (s.metrics.size() != static_cast<std::size_t>(s.generation)) {
    throw std::runtime_error("state: metrics history does not match generation count");
  }
  return s;
}

PipelineState LoadState(const fs::path& workdir) {
  return StateFromJson(ReadJsonFile(workdir / "state.json"));
}

void SaveState(const PipelineState& state, const fs::path& workdir) {
  WriteJsonFile(StateToJson(state), workdir / "state.json");
}

std::uint64_t StageSeed(std::uint64_t master, int generation,
                        const std::string& stage) {
  return DeriveSeed(master, static_cast<std::uint64_t>(generation), stage);
}

Pipeline::Pipeline(PipelineConfig config, const Recognizer& recognizer,
                   fs::path workdir)
    : config_(std::move(config)),
      recognizer_(recognizer),
      workdir_(std::move(workdir)) {
  config_.Validate();
}

PipelineState Pipeline::Resume(std::uint64_t seed) const {
  if (fs::exists(workdir_ / "state.json")) return LoadState(workdir_);
  PipelineState s;
  s.seed = seed;
  return s;
}

void Pipeline::LoadData() {
  if (loaded_) return;
  vocab_ = LoadVocab(config_.vocab);
  supervised_ = LoadManifest(config_.supervised, vocab_);
  for (const auto& subset : config_.subsets) {
    dev_.push_back(LoadManifest(subset.dev, vocab_));
    unlabeled_.push_back(LoadManifest(subset.unlabeled, vocab_));
  }
  for (const auto& u : supervised_.utterances) {
    if (!u.transcript) {
      throw std::invalid_argument("supervised utterance '" + u.id +
                                  "' has no transcript");
    }
  }
  loaded_ = true;
}

namespace {

template <typename Fn>
auto RunStage(int generation, const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(generation, stage, e.what());
  }
}

// Training set from a mixed stream: one utterance per distinct entry, with
// its number of occurrences as multiplicity, in order of first appearance.
Dataset CollectStream(std::span<const MixEntry> stream, const Dataset& supervised,
                      const Dataset& semi) {
  std::map<std::pair<int, std::size_t>, std::size_t> position;
  Dataset out;
  for (const auto& e : stream) {
    const auto key = std::make_pair(static_cast<int>(e.origin), e.index);
    auto [it, inserted] = position.emplace(key, out.utterances.size());
    if (inserted) {
      const Dataset& src = e.origin == Origin::kSupervised ? supervised : semi;
      Utterance u = src.utterances[e.index];
      u.multiplicity = 1;
      out.utterances.push_back(std::move(u));
    } else {
      ++out.utterances[it->second].multiplicity;
    }
  }
  return out;
}

// Stream length covering a full epoch of whichever side needs more draws.
std::size_t StreamLength(const MixPlan& plan, MixRatio ratio,
                         std::size_t supervised, std::size_t semi) {
  if (plan.mode == MixMode::kUniform) return supervised + semi;
  const auto batch = static_cast<std::size_t>(plan.batch_size);
  const auto parts = static_cast<std::size_t>(ratio.supervised + ratio.semi);
  const std::size_t sup_per = batch / parts * static_cast<std::size_t>(ratio.supervised);
  const std::size_t semi_per = batch / parts * static_cast<std::size_t>(ratio.semi);
  const std::size_t batches = std::max((supervised + sup_per - 1) / sup_per,
                                       (semi + semi_per - 1) / semi_per);
  return batches * batch;
}

void WriteDevDecodes(const fs::path& path, const Dataset& dev,
                     std::span<const DevDecode> decodes,
                     const FusionParams& fusion, const TokenVocab& vocab) {
  std::string out;
  for (std::size_t i = 0; i < decodes.size(); ++i) {
    const auto& d = decodes[i];
    const auto& best = d.hypotheses[RerankBest(d.hypotheses, fusion)];
    auto tokens = [&vocab](const Transcript& t) {
      std::vector<std::string> s;
      for (TokenId id : t.tokens) s.push_back(vocab.token(id));
      return s;
    };
    nlohmann::ordered_json line;
    line["id"] = dev.utterances[i].id;
    line["reference"] = tokens(d.reference);
    line["hypothesis"] = tokens(best.transcript);
    line["fused"] = FuseScore(best, fusion);
    line["am"] = best.am_score;
    line["lm"] = best.lm_score;
    line["coverage"] = best.coverage;
    out += line.dump();
    out.push_back('\n');
  }
  AtomicWriteFile(path, out);
}

std::vector<CurveItem> ReadDevDecodes(const fs::path& path, const TokenVocab& vocab) {
  std::ifstream in(path);
  if (!in) throw MissingFileError(path.string());
  std::vector<CurveItem> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      CurveItem item;
      for (const auto& t : j.at("reference")) item.reference.tokens.push_back(vocab.id(t.get<std::string>()));
      for (const auto& t : j.at("hypothesis")) item.hypothesis.tokens.push_back(vocab.id(t.get<std::string>()));
      item.fused_score = j.at("fused").get<double>();
      items.push_back(std::move(item));
    } catch (const std::exception& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  return items;
}

}  // namespace

PipelineState Pipeline::RunGeneration(const PipelineState& state) {
  const int g = state.generation;
  if (g < 0 || static_cast<std::size_t>(g) >= config_.generations.size()) {
    throw std::out_of_range("no configuration for generation " + std::to_string(g));
  }
  RunStage(g, "load", [this] {
    LoadData();
    return 0;
  });
  const GenerationConfig& gen = config_.generations[g];
  const auto& grid = gen.fusion_grid.empty() ? config_.fusion_grid : gen.fusion_grid;
  const fs::path gen_dir = workdir_ / GenDir(g);
  fs::create_directories(gen_dir);

  GenerationMetrics metrics;
  metrics.generation = g;
  metrics.cutoff = (g > 0 && gen.filtering) ? gen.cutoff : kNoCutoff;

  Dataset training = supervised_;
  if (g > 0) {
    auto teacher = RunStage(g, "teacher", [&] {
      return recognizer_.LoadModel(ReadJsonFile(workdir_ / state.model_path));
    });

    // Pseudo-label and filter each subset with its own filter model.
    Dataset semi;
    for (std::size_t s = 0; s < config_.subsets.size(); ++s) {
      const auto& name = config_.subsets[s].name;
      Dataset pseudo = RunStage(g, "transcribe", [&] {
        const auto& unlabeled = unlabeled_[s];
        auto nbest = teacher->Transcribe(unlabeled.utterances, config_.beam);
        Dataset out;
        for (std::size_t i = 0; i < unlabeled.size(); ++i) {
          const auto& hyps = nbest[i];
          const auto& best = hyps[RerankBest(hyps, state.fusion)];
          Utterance u = unlabeled.utterances[i];
          u.transcript = best.transcript;
          u.score = FuseScore(best, state.fusion);
          u.multiplicity = 1;
          out.utterances.push_back(std::move(u));
        }
        return out;
      });
      metrics.pseudo_labeled += pseudo.size();
      if (gen.filtering) {
        pseudo = RunStage(g, "filter", [&] {
          auto it = state.filter_models.find(name);
          if (it == state.filter_models.end()) {
            throw std::runtime_error("no filter model for subset '" + name + "'");
          }
          return ApplyFilter(pseudo, it->second, gen.cutoff);
        });
      }
      for (auto& u : pseudo.utterances) semi.utterances.push_back(std::move(u));
    }

    if (gen.balancing && !semi.empty()) {
      semi = RunStage(g, "balance", [&] {
        const auto sup_transcripts = supervised_.transcripts();
        const auto target = ComputeTokenDistribution(sup_transcripts, vocab_.size());
        SamplerConfig sampler = config_.sampler;
        if (config_.min_tokens_from_supervised) {
          sampler.min_token_total = supervised_.token_total();
        }
        std::vector<WeightedSample> pool;
        pool.reserve(semi.size());
        for (const auto& u : semi.utterances) pool.push_back({u.id, *u.transcript, 1});
        return ApplySampling(semi, SubmodularSample(pool, target, sampler));
      });
    }
    metrics.semi_size = semi.materialized_size();
    metrics.semi_tokens = semi.token_total();
    RunStage(g, "save-semi", [&] {
      SaveManifest(semi, gen_dir / "semi.jsonl", vocab_);
      return 0;
    });

    if (!semi.empty()) {
      training = RunStage(g, "mix", [&] {
        const MixRatio ratio = gen.mix.RatioFor(g);
        const std::size_t count =
            StreamLength(gen.mix, ratio, supervised_.materialized_size(),
                         semi.materialized_size()) *
            static_cast<std::size_t>(gen.stream_epochs);
        const auto stream = DrawMixedStream(supervised_, semi, gen.mix, ratio, count,
                                            StageSeed(state.seed, g, "mix"));
        return CollectStream(stream, supervised_, semi);
      });
    }
  }

  auto model = RunStage(g, "train", [&] {
    return recognizer_.Train(training, gen.augment, StageSeed(state.seed, g, "train"));
  });

  // Fusion tuning on all dev subsets together; filter fit per subset.
  std::vector<std::vector<DevDecode>> decodes(config_.subsets.size());
  GridSearchResult tuned = RunStage(g, "tune-fusion", [&] {
    std::vector<DevDecode> all;
    for (std::size_t s = 0; s < config_.subsets.size(); ++s) {
      const auto& dev = dev_[s];
      auto nbest = model->Transcribe(dev.utterances, config_.beam);
      for (std::size_t i = 0; i < dev.size(); ++i) {
        if (!dev.utterances[i].transcript) {
          throw std::invalid_argument("dev utterance '" + dev.utterances[i].id +
                                      "' has no reference");
        }
        decodes[s].push_back({*dev.utterances[i].transcript, std::move(nbest[i])});
      }
      all.insert(all.end(), decodes[s].begin(), decodes[s].end());
    }
    return GridSearchFusion(grid, all, vocab_);
  });
  metrics.dev_wer = tuned.wers[tuned.best_index];
  metrics.fusion = tuned.best;

  RunStage(g, "fit-filter", [&] {
    for (std::size_t s = 0; s < config_.subsets.size(); ++s) {
      std::vector<LengthScore> pairs;
      for (const auto& d : decodes[s]) {
        const auto& best = d.hypotheses[RerankBest(d.hypotheses, tuned.best)];
        // Blank hypotheses carry no length information for the fit.
        if (best.transcript.length() == 0) continue;
        pairs.push_back({best.transcript.length(), FuseScore(best, tuned.best)});
      }
      metrics.filter_models[config_.subsets[s].name] = FitFilter(pairs);
      WriteDevDecodes(gen_dir / ("dev_" + config_.subsets[s].name + ".jsonl"), dev_[s],
                      decodes[s], tuned.best, vocab_);
    }
    return 0;
  });

  PipelineState next = state;
  next.model_path = GenDir(g) + "/model.json";
  RunStage(g, "save", [&] {
    WriteJsonFile(model->ToJson(), workdir_ / next.model_path);
    return 0;
  });
  next.generation = g + 1;
  next.fusion = tuned.best;
  next.filter_models = metrics.filter_models;
  next.metrics.push_back(std::move(metrics));
  SaveState(next, workdir_);
  return next;
}

PipelineState Pipeline::Run(PipelineState state, std::optional<int> max_generations) {
  int ran = 0;
  while (static_cast<std::size_t>(state.generation) < config_.generations.size()) {
    if (max_generations && ran >= *max_generations) break;
    state = RunGeneration(state);
    ++ran;
  }
  return state;
}

void WriteMetricsTsv(std::span<const GenerationMetrics> metrics, std::ostream& out) {
  out << "generation\tdev_wer\tsemi_size\tsemi_tokens\tcutoff\n";
  out << std::setprecision(10);
  for (const auto& m : metrics) {
    out << m.generation << '\t' << m.dev_wer << '\t' << m.semi_size << '\t'
        << m.semi_tokens << '\t';
    if (m.cutoff == kNoCutoff) {
      out << "-inf";
    } else {
      out << m.cutoff;
    }
    out << '\n';
  }
}

void WriteSizeComparison(std::span<const GenerationMetrics> a,
                         const std::string& label_a,
                         std::span<const GenerationMetrics> b,
                         const std::string& label_b, std::ostream& out) {
  out << "label_a\tgen_a\tsemi_size_a\tdev_wer_a\tlabel_b\tgen_b\tsemi_size_b\tdev_wer_b\n";
  out << std::setprecision(10);
  for (const auto& ma : a) {
    const GenerationMetrics* closest = nullptr;
    for (const auto& mb : b) {
      const auto gap = [&](const GenerationMetrics& m) {
        return std::abs(static_cast<double>(m.semi_size) - static_cast<double>(ma.semi_size));
      };
      if (!closest || gap(mb) < gap(*closest)) closest = &mb;
    }
    out << label_a << '\t' << ma.generation << '\t' << ma.semi_size << '\t' << ma.dev_wer;
    if (closest) {
      out << '\t' << label_b << '\t' << closest->generation << '\t' << closest->semi_size
          << '\t' << closest->dev_wer;
    }
    out << '\n';
  }
}

fs::path WriteToyTask(const ToyTaskOptions& options, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const ToyWorld world{options.vocab_size, options.noise, options.frames_per_token};
  const auto source = MakeBigramSource(options.vocab_size, DeriveSeed(options.seed, "lm"));
  const auto vocab = ToyVocab(options.vocab_size);
  SaveVocab(vocab, out_dir / "vocab.txt");
  auto make = [&](const std::string& name, int count) {
    Rng rng(DeriveSeed(options.seed, name));
    return SynthGenerate(world, count, source, rng, name);
  };
  SaveManifest(make("supervised", options.supervised), out_dir / "supervised.jsonl", vocab);
  SaveManifest(make("dev", options.dev), out_dir / "dev.jsonl", vocab);
  const Dataset unlabeled = make("unlabeled", options.unlabeled);
  SaveManifest(StripTranscripts(unlabeled), out_dir / "unlabeled.jsonl", vocab);
  SaveManifest(unlabeled, out_dir / "unlabeled_reference.jsonl", vocab);

  AugmentPolicy augment;
  augment.num_freq_masks = 0;
  augment.time_mask_param.reset();
  augment.time_mask_ratio = 0.05;
  augment.num_time_masks = 2;
  MixPlan mix;
  mix.mode = MixMode::kBatchwise;
  mix.ratio = {4, 6};
  mix.batch_size = 10;
  json generations = json::array();
  for (const json& cutoff : {json(1.0), json(0.0), json("-inf")}) {
    generations.push_back({{"cutoff", cutoff},
                           {"balancing", true},
                           {"augment", augment},
                           {"mix", mix},
                           {"stream_epochs", 2}});
  }
  const json config = {
      {"vocab", "vocab.txt"},
      {"supervised", "supervised.jsonl"},
      {"dev", "dev.jsonl"},
      {"unlabeled", "unlabeled.jsonl"},
      {"recognizer",
       {{"frames_per_token", options.frames_per_token}, {"decode_lm_weight", 1.0}, {"beam", 8}}},
      {"fusion_grid",
       {{"mode", "attention"}, {"lm_weight", {0.0, 0.5, 1.0, 2.0, 4.0}}, {"coverage_weight", {0.0}}}},
      // Token floor near three quarters of the unlabeled tokens (mean
      // sentence length 8).
      {"balancing",
       {{"multiplicity_cap", 2},
        {"batch_fraction", 0.1},
        {"min_tokens", 6 * options.unlabeled}}},
      {"generations", std::move(generations)}};
  const fs::path path = out_dir / "config.json";
  WriteJsonFile(config, path);
  return path;
}

std::vector<fs::path> EmitReports(const fs::path& workdir, const PipelineConfig& config) {
  if (!fs::exists(workdir / "state.json")) {
    throw std::runtime_error("no generations completed");
  }
  const PipelineState state = LoadState(workdir);
  if (state.metrics.empty()) throw std::runtime_error("no generations completed");
  const TokenVocab vocab = LoadVocab(config.vocab);
  const fs::path dir = workdir / "reports";
  fs::create_directories(dir);
  std::vector<fs::path> written;

  {
    std::ostringstream ss;
    ss << "# dev WER of the fused model trained in each generation\n";
    WriteMetricsTsv(state.metrics, ss);
    AtomicWriteFile(dir / "fig1_wer_by_generation.tsv", ss.str());
    written.push_back(dir / "fig1_wer_by_generation.tsv");
  }
  {
    std::ostringstream ss;
    ss << "# semi_size: materialized semi-supervised utterances used for training\n";
    ss << "semi_size\tdev_wer\tgeneration\n" << std::setprecision(10);
    for (const auto& m : state.metrics) {
      ss << m.semi_size << '\t' << m.dev_wer << '\t' << m.generation << '\n';
    }
    AtomicWriteFile(dir / "fig5_wer_vs_semi_size.tsv", ss.str());
    written.push_back(dir / "fig5_wer_vs_semi_size.tsv");
  }

  const auto thresholds = ThresholdGrid(config.report_lo, config.report_hi, config.report_step);
  for (const auto& m : state.metrics) {
    for (const auto& subset : config.subsets) {
      auto it = m.filter_models.find(subset.name);
      if (it == m.filter_models.end()) continue;
      const auto items = ReadDevDecodes(
          workdir / GenDir(m.generation) / ("dev_" + subset.name + ".jsonl"), vocab);
      const auto rows = ScoreCurves(items, it->second, thresholds, vocab);
      std::ostringstream ss;
      WriteCurveTsv(rows, ss);
      const auto path = dir / ("fig2_fig3_score_curves_" + GenDir(m.generation) + "_" + subset.name + ".tsv");
      AtomicWriteFile(path, ss.str());
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace nst
