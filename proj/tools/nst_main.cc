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

// nst: command-line front end of the toolkit.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nst/augment.h"
#include "nst/balancing.h"
#include "nst/corpus.h"
#include "nst/errors.h"
#include "nst/filtering.h"
#include "nst/json_io.h"
#include "nst/mixing.h"
#include "nst/pipeline.h"
#include "nst/random.h"
#include "nst/recognizer.h"
#include "nst/scoring.h"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<json> ReadJsonLines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw nst::MissingFileError(path.string());
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw nst::ParseError(path.string(), lineno, e.what());
    }
  }
  return rows;
}

template <typename Row>
void WriteJsonLines(const std::vector<Row>& rows, const fs::path& path) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out.push_back('\n');
  }
  nst::AtomicWriteFile(path, out);
}

std::vector<std::string> TokenStrings(const nst::Transcript& t, const nst::TokenVocab& vocab) {
  std::vector<std::string> out;
  for (nst::TokenId id : t.tokens) out.push_back(vocab.token(id));
  return out;
}

nst::Transcript TokensFromJson(const json& j, const nst::TokenVocab& vocab) {
  nst::Transcript t;
  for (const auto& s : j) t.tokens.push_back(vocab.id(s.get<std::string>()));
  return t;
}

nst::FusionParams ParseParams(const std::string& text, const std::string& mode) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) v.push_back(std::stod(part));
  if (v.empty() || v.size() > 3) {
    throw std::invalid_argument("--params expects lambda[,c[,rho]]");
  }
  v.resize(3, 0.0);
  return {v[0], v[1], v[2], nst::ParseFusionMode(mode)};
}

// Best-ranked hypothesis per id of a hypotheses JSONL, in order of first id
// appearance. Lines carry "fused" or it is computed from `params`.
struct IdBest {
  std::string id;
  json row;
  double fused;
};

std::vector<IdBest> BestPerId(const std::vector<json>& rows,
                              const std::optional<nst::FusionParams>& params) {
  std::vector<IdBest> out;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    double fused;
    if (params) {
      nst::ScoredHypothesis h;
      h.am_score = r.at("am").get<double>();
      h.lm_score = r.at("lm").get<double>();
      h.coverage = r.value("coverage", 0.0);
      h.transcript.tokens.resize(r.at("tokens").size());
      fused = nst::FuseScore(h, *params);
    } else {
      fused = r.at("fused").get<double>();
    }
    const auto id = r.at("id").get<std::string>();
    auto [it, inserted] = index.emplace(id, out.size());
    if (inserted) {
      out.push_back({id, r, fused});
    } else if (fused > out[it->second].fused) {
      out[it->second] = {id, r, fused};
    }
  }
  return out;
}

// Config written next to a pipeline run so `report` can find its inputs.
constexpr const char* kRunConfig = "config.json";

int CmdSynth(const fs::path& out_dir, const nst::ToyTaskOptions& options) {
  std::cout << "wrote " << nst::WriteToyTask(options, out_dir).string() << "\n";
  return 0;
}

int CmdToyTrain(const fs::path& manifest, const fs::path& vocab_path,
                const std::string& policy_path, std::uint64_t seed, int fpt,
                double lm_weight, const fs::path& out) {
  const auto vocab = nst::LoadVocab(vocab_path);
  const auto data = nst::LoadManifest(manifest, vocab);
  nst::AugmentPolicy policy;
  if (!policy_path.empty()) policy = nst::ReadJsonFile(policy_path).get<nst::AugmentPolicy>();
  const auto model = nst::ToyTrain(data, policy, seed, static_cast<int>(vocab.size()), fpt,
                                   lm_weight);
  nst::WriteJsonFile(nst::ToyModelToJson(model), out);
  return 0;
}

int CmdToyTranscribe(const fs::path& model_path, const fs::path& manifest,
                     const fs::path& vocab_path, int beam, const fs::path& out) {
  const auto vocab = nst::LoadVocab(vocab_path);
  const auto data = nst::LoadManifest(manifest, vocab);
  const nst::ToyRecognizerModel model(nst::ToyModelFromJson(nst::ReadJsonFile(model_path)));
  const auto nbest = model.Transcribe(data.utterances, beam);
  std::vector<ordered_json> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t r = 0; r < nbest[i].size(); ++r) {
      const auto& h = nbest[i][r];
      ordered_json row;
      row["id"] = data.utterances[i].id;
      row["rank"] = r;
      row["tokens"] = TokenStrings(h.transcript, vocab);
      row["am"] = h.am_score;
      row["lm"] = h.lm_score;
      row["coverage"] = h.coverage;
      if (data.utterances[i].transcript) {
        row["reference"] = TokenStrings(*data.utterances[i].transcript, vocab);
      }
      rows.push_back(std::move(row));
    }
  }
  WriteJsonLines(rows, out);
  return 0;
}

int CmdScore(const fs::path& in, const fs::path& out, const std::string& params,
             const std::string& mode) {
  const auto p = ParseParams(params, mode);
  auto rows = ReadJsonLines(in);
  for (auto& r : rows) {
    nst::ScoredHypothesis h;
    h.am_score = r.at("am").get<double>();
    h.lm_score = r.at("lm").get<double>();
    h.coverage = r.value("coverage", 0.0);
    h.transcript.tokens.resize(r.at("tokens").size());
    r["fused"] = nst::FuseScore(h, p);
  }
  WriteJsonLines(rows, out);
  return 0;
}

int CmdFitFilter(const fs::path& in, const std::string& params, const std::string& mode,
                 const fs::path& out) {
  std::optional<nst::FusionParams> p;
  if (!params.empty()) p = ParseParams(params, mode);
  std::vector<nst::LengthScore> pairs;
  for (const auto& b : BestPerId(ReadJsonLines(in), p)) {
    const auto length = b.row.at("tokens").size();
    if (length == 0) continue;
    pairs.push_back({length, b.fused});
  }
  const auto model = nst::FitFilter(pairs);
  nst::WriteJsonFile(json(model), out);
  std::cout << json(model).dump() << "\n";
  return 0;
}

// Builds a scored manifest from the best hypotheses of an n-best file.
int CmdPseudoLabel(const fs::path& hyps, const fs::path& manifest,
                   const fs::path& vocab_path, const fs::path& out) {
  const auto vocab = nst::LoadVocab(vocab_path);
  auto data = nst::LoadManifest(manifest, vocab);
  std::map<std::string, const IdBest*> by_id;
  const auto best = BestPerId(ReadJsonLines(hyps), std::nullopt);
  for (const auto& b : best) by_id[b.id] = &b;
  for (auto& u : data.utterances) {
    auto it = by_id.find(u.id);
    if (it == by_id.end()) throw std::invalid_argument("no hypothesis for '" + u.id + "'");
    u.transcript = TokensFromJson(it->second->row.at("tokens"), vocab);
    u.score = it->second->fused;
  }
  nst::SaveManifest(data, out, vocab);
  return 0;
}

int CmdFilter(const fs::path& manifest, const fs::path& vocab_path, const fs::path& model_path,
              const std::string& cutoff, const fs::path& out) {
  const auto vocab = nst::LoadVocab(vocab_path);
  const auto data = nst::LoadManifest(manifest, vocab);
  const auto model = nst::ReadJsonFile(model_path).get<nst::FilterModel>();
  const double c = (cutoff == "-inf") ? nst::kNoCutoff : std::stod(cutoff);
  const auto kept = nst::ApplyFilter(data, model, c);
  nst::SaveManifest(kept, out, vocab);
  std::cout << "kept " << kept.size() << " of " << data.size() << "\n";
  return 0;
}

int CmdBalance(const fs::path& in, const fs::path& target, const fs::path& vocab_path, int cap,
               double batch_frac, const std::string& min_tokens, double epsilon,
               const fs::path& out) {
  const auto vocab = nst::LoadVocab(vocab_path);
  const auto pool = nst::LoadManifest(in, vocab);
  const auto target_data = nst::LoadManifest(target, vocab);
  nst::SamplerConfig config;
  config.multiplicity_cap = cap;
  config.batch_fraction = batch_frac;
  config.smoothing_epsilon = epsilon;
  config.min_token_total = min_tokens == "auto" ? target_data.token_total()
                                                : std::stoull(min_tokens);
  std::vector<nst::WeightedSample> samples;
  for (const auto& u : pool.utterances) {
    if (!u.transcript) throw std::invalid_argument("utterance '" + u.id + "' has no transcript");
    samples.push_back({u.id, *u.transcript, 1});
  }
  const auto dist = nst::ComputeTokenDistribution(target_data.transcripts(), vocab.size());
  const auto result = nst::SubmodularSample(samples, dist, config);
  nst::SaveManifest(nst::ApplySampling(pool, result), out, vocab);
  std::cout << "selected " << result.samples.size() << " sentences, " << result.token_total
            << " tokens, kl " << result.final_kl
            << (result.infeasible ? " (token floor not reached)" : "") << "\n";
  return 0;
}

int CmdAugment(const fs::path& manifest, const fs::path& vocab_path, const fs::path& policy_path,
               std::uint64_t seed, const fs::path& out) {
  const auto vocab = nst::LoadVocab(vocab_path);
  const auto data = nst::LoadManifest(manifest, vocab);
  const auto policy = nst::ReadJsonFile(policy_path).get<nst::AugmentPolicy>();
  nst::SaveManifest(nst::AugmentDataset(data, policy, seed), out, vocab);
  return 0;
}

int CmdMix(const fs::path& sup_path, const fs::path& semi_path, const fs::path& vocab_path,
           const std::string& mode, const std::string& ratio, int batch, std::uint64_t seed,
           std::size_t count, const fs::path& out) {
  const auto vocab = nst::LoadVocab(vocab_path);
  const auto sup = nst::LoadManifest(sup_path, vocab);
  const auto semi = nst::LoadManifest(semi_path, vocab);
  nst::MixPlan plan;
  plan.mode = mode == "batchwise" ? nst::MixMode::kBatchwise : nst::MixMode::kUniform;
  if (mode != "batchwise" && mode != "uniform") {
    throw std::invalid_argument("--mode must be batchwise or uniform");
  }
  plan.ratio = nst::ParseMixRatio(ratio);
  plan.batch_size = batch;
  plan.Validate();
  if (count == 0) count = sup.materialized_size() + semi.materialized_size();
  const auto stream = nst::DrawMixedStream(sup, semi, plan, plan.ratio, count, seed);
  std::vector<ordered_json> rows;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& e = stream[i];
    const auto& src = e.origin == nst::Origin::kSupervised ? sup : semi;
    ordered_json row;
    row["batch"] = i / static_cast<std::size_t>(batch);
    row["id"] = src.utterances[e.index].id;
    row["origin"] = nst::OriginName(e.origin);
    rows.push_back(std::move(row));
  }
  WriteJsonLines(rows, out);
  return 0;
}

json RunConfigJson(const fs::path& config_path) {
  json j = nst::ReadJsonFile(config_path);
  j["base_dir"] = fs::absolute(config_path).parent_path().string();
  return j;
}

nst::PipelineConfig ConfigFromRunJson(const json& j) {
  return nst::ParsePipelineConfig(j, j.at("base_dir").get<std::string>());
}

int CmdRun(const fs::path& config_path, const fs::path& workdir, std::uint64_t seed,
           std::optional<int> generations) {
  const json run_cfg = RunConfigJson(config_path);
  const auto config = ConfigFromRunJson(run_cfg);
  fs::create_directories(workdir);
  nst::WriteJsonFile(run_cfg, workdir / kRunConfig);
  const nst::ToyRecognizer recognizer(static_cast<int>(nst::LoadVocab(config.vocab).size()),
                                      config.frames_per_token, config.decode_lm_weight);
  nst::Pipeline pipeline(config, recognizer, workdir);
  auto state = pipeline.Resume(seed);
  while (static_cast<std::size_t>(state.generation) < config.generations.size()) {
    if (generations && *generations <= 0) break;
    state = pipeline.RunGeneration(state);
    const auto& m = state.metrics.back();
    std::cout << "generation " << m.generation << ": dev_wer " << m.dev_wer << ", semi_size "
              << m.semi_size << "\n";
    if (generations) --*generations;
  }
  nst::WriteMetricsTsv(state.metrics, std::cout);
  return 0;
}

int CmdReport(const fs::path& workdir, const std::string& config_path) {
  const json run_cfg = config_path.empty() ? nst::ReadJsonFile(workdir / kRunConfig)
                                           : RunConfigJson(config_path);
  for (const auto& p : nst::EmitReports(workdir, ConfigFromRunJson(run_cfg))) {
    std::cout << p.string() << "\n";
  }
  return 0;
}

int CmdCompare(const fs::path& a, const std::string& label_a, const fs::path& b,
               const std::string& label_b) {
  const auto sa = nst::LoadState(a);
  const auto sb = nst::LoadState(b);
  nst::WriteSizeComparison(sa.metrics, label_a, sb.metrics, label_b, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy student training data pipeline"};
  app.require_subcommand(1);

  std::string vocab, manifest, out, in, model, policy, params, mode = "attention";
  std::uint64_t seed = 0;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic toy task");
  std::string out_dir;
  nst::ToyTaskOptions task;
  synth->add_option("--out-dir", out_dir, "Output directory")->required();
  synth->add_option("--vocab-size", task.vocab_size, "Vocabulary size");
  synth->add_option("--noise", task.noise, "Channel noise std");
  synth->add_option("--frames-per-token", task.frames_per_token, "Frames per token");
  synth->add_option("--supervised", task.supervised, "Supervised utterances");
  synth->add_option("--unlabeled", task.unlabeled, "Unlabeled utterances");
  synth->add_option("--dev", task.dev, "Dev utterances");
  synth->add_option("--seed", task.seed, "Seed");

  // toy-train
  auto* train = app.add_subcommand("toy-train", "Train the toy recognizer");
  int fpt = 4;
  double lm_weight = 1.0;
  train->add_option("--manifest", manifest)->required();
  train->add_option("--vocab", vocab)->required();
  train->add_option("--policy", policy, "Augment policy JSON");
  train->add_option("--seed", seed);
  train->add_option("--frames-per-token", fpt);
  train->add_option("--decode-lm-weight", lm_weight);
  train->add_option("--out", out)->required();

  // toy-transcribe
  auto* transcribe = app.add_subcommand("toy-transcribe", "Decode with a toy model");
  int beam = 8;
  transcribe->add_option("--model", model)->required();
  transcribe->add_option("--manifest", manifest)->required();
  transcribe->add_option("--vocab", vocab)->required();
  transcribe->add_option("--beam", beam);
  transcribe->add_option("--out", out)->required();

  // score
  auto* score = app.add_subcommand("score", "Add fused scores to a hypotheses file");
  score->add_option("--in", in)->required();
  score->add_option("--out", out)->required();
  score->add_option("--params", params, "lambda,c,rho")->required();
  score->add_option("--mode", mode)->check(CLI::IsMember({"attention", "transducer"}));

  // fit-filter
  auto* fit = app.add_subcommand("fit-filter", "Fit the length-normalized score model");
  fit->add_option("--in", in, "Dev hypotheses JSONL")->required();
  fit->add_option("--params", params, "Fuse with lambda,c,rho instead of \"fused\"");
  fit->add_option("--mode", mode)->check(CLI::IsMember({"attention", "transducer"}));
  fit->add_option("--out", out)->required();

  // pseudo-label
  auto* pseudo = app.add_subcommand("pseudo-label", "Attach best hypotheses to a manifest");
  std::string hyps;
  pseudo->add_option("--hyps", hyps, "Scored hypotheses JSONL")->required();
  pseudo->add_option("--manifest", manifest)->required();
  pseudo->add_option("--vocab", vocab)->required();
  pseudo->add_option("--out", out)->required();

  // filter
  auto* filter = app.add_subcommand("filter", "Drop pseudo-labels at or below a cutoff");
  std::string cutoff = "-inf", filter_model;
  filter->add_option("--manifest", manifest)->required();
  filter->add_option("--vocab", vocab)->required();
  filter->add_option("--filter-model", filter_model)->required();
  filter->add_option("--cutoff", cutoff, "Number or -inf");
  filter->add_option("--out", out)->required();

  // balance
  auto* balance = app.add_subcommand("balance", "Submodular token balancing");
  std::string target, min_tokens = "auto";
  int cap = 2;
  double batch_frac = 0.1, epsilon = 1e-6;
  balance->add_option("--in", in)->required();
  balance->add_option("--target", target, "Manifest defining the target distribution")
      ->required();
  balance->add_option("--vocab", vocab)->required();
  balance->add_option("--cap", cap);
  balance->add_option("--batch-frac", batch_frac);
  balance->add_option("--min-tokens", min_tokens, "auto or a count");
  balance->add_option("--epsilon", epsilon);
  balance->add_option("--out", out)->required();

  // augment
  auto* augment = app.add_subcommand("augment", "Apply an augment policy to features");
  augment->add_option("--manifest", manifest)->required();
  augment->add_option("--vocab", vocab)->required();
  augment->add_option("--policy", policy)->required();
  augment->add_option("--seed", seed);
  augment->add_option("--out", out)->required();

  // mix
  auto* mix = app.add_subcommand("mix", "Draw a mixed training stream");
  std::string semi, ratio = "1:1", mix_mode = "batchwise";
  int batch = 10;
  std::size_t count = 0;
  mix->add_option("--supervised", manifest)->required();
  mix->add_option("--semi", semi)->required();
  mix->add_option("--vocab", vocab)->required();
  mix->add_option("--mode", mix_mode)->check(CLI::IsMember({"batchwise", "uniform"}));
  mix->add_option("--ratio", ratio);
  mix->add_option("--batch", batch);
  mix->add_option("--seed", seed);
  mix->add_option("--count", count, "Entries to draw (default: both sets once)");
  mix->add_option("--out", out)->required();

  // run
  auto* run = app.add_subcommand("run", "Run or resume the generation loop");
  std::string config, workdir;
  std::optional<int> generations;
  run->add_option("--config", config)->required();
  run->add_option("--workdir", workdir)->required();
  run->add_option("--seed", seed);
  run->add_option("--generations", generations, "Stop after this many generations");

  // report
  auto* report = app.add_subcommand("report", "Write report tables for a workdir");
  report->add_option("--workdir", workdir)->required();
  report->add_option("--config", config, "Config (default: the one stored by run)");

  // compare
  auto* compare = app.add_subcommand("compare", "Compare two runs at matched semi sizes");
  std::string workdir_b, label_a = "a", label_b = "b";
  compare->add_option("--workdir", workdir)->required();
  compare->add_option("--other", workdir_b)->required();
  compare->add_option("--label", label_a);
  compare->add_option("--other-label", label_b);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return CmdSynth(out_dir, task);
    if (*train) return CmdToyTrain(manifest, vocab, policy, seed, fpt, lm_weight, out);
    if (*transcribe) return CmdToyTranscribe(model, manifest, vocab, beam, out);
    if (*score) return CmdScore(in, out, params, mode);
    if (*fit) return CmdFitFilter(in, params, mode, out);
    if (*pseudo) return CmdPseudoLabel(hyps, manifest, vocab, out);
    if (*filter) return CmdFilter(manifest, vocab, filter_model, cutoff, out);
    if (*balance) {
      return CmdBalance(in, target, vocab, cap, batch_frac, min_tokens, epsilon, out);
    }
    if (*augment) return CmdAugment(manifest, vocab, policy, seed, out);
    if (*mix) {
      return CmdMix(manifest, semi, vocab, mix_mode, ratio, batch, seed, count, out);
    }
    if (*run) return CmdRun(config, workdir, seed, generations);
    if (*report) return CmdReport(workdir, config);
    if (*compare) return CmdCompare(workdir, label_a, workdir_b, label_b);
  } catch (const std::exception& e) {
    std::cerr << "nst: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
