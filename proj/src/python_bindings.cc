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


// Python bindings for the core operations. Feature matrices cross the
// boundary as 2-D float32 numpy arrays, transcripts as lists of token ids.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <limits>

#include "nst/augment.h"
#include "nst/balancing.h"
#include "nst/errors.h"
#include "nst/filtering.h"
#include "nst/mixing.h"
#include "nst/pipeline.h"
#include "nst/recognizer.h"
#include "nst/scoring.h"

namespace py = pybind11;
using namespace nst;

namespace {

using Array = py::array_t<float, py::array::c_style | py::array::forcecast>;

FeatureMatrix ToMatrix(const Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("features must be a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return FeatureMatrix(rows, cols, std::vector<float>(a.data(), a.data() + rows * cols));
}

Array ToArray(const FeatureMatrix& m) {
  Array out({m.rows(), m.cols()});
  if (!m.values().empty()) {
    std::memcpy(out.mutable_data(), m.values().data(), m.values().size() * sizeof(float));
  }
  return out;
}

Transcript ToTranscript(const std::vector<TokenId>& tokens) { return Transcript{tokens}; }

Dataset CountsDataset(std::size_t n, const std::vector<int>& multiplicities, const char* prefix) {
  Dataset d;
  auto f = std::make_shared<const FeatureMatrix>(1, 1, 0.0f);
  for (std::size_t i = 0; i < n; ++i) {
    const int m = multiplicities.empty() ? 1 : multiplicities.at(i);
    d.utterances.push_back({prefix + std::to_string(i), f, std::nullopt, std::nullopt, m});
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Noisy student training data-pipeline toolkit";
  m.attr("NO_CUTOFF") = kNoCutoff;

  py::register_exception<DegenerateFitError>(m, "DegenerateFitError", PyExc_ValueError);
  py::register_exception<StageError>(m, "StageError", PyExc_RuntimeError);

  py::enum_<FusionMode>(m, "FusionMode")
      .value("ATTENTION", FusionMode::kAttention)
      .value("TRANSDUCER", FusionMode::kTransducer);

  py::class_<FusionParams>(m, "FusionParams")
      .def(py::init([](double lm, double cov, double reward, FusionMode mode) {
             return FusionParams{lm, cov, reward, mode};
           }),
           py::arg("lm_weight") = 0.0, py::arg("coverage_weight") = 0.0,
           py::arg("nonblank_reward") = 0.0, py::arg("mode") = FusionMode::kAttention)
      .def_readwrite("lm_weight", &FusionParams::lm_weight)
      .def_readwrite("coverage_weight", &FusionParams::coverage_weight)
      .def_readwrite("nonblank_reward", &FusionParams::nonblank_reward)
      .def_readwrite("mode", &FusionParams::mode)
      .def("__eq__", [](const FusionParams& a, const FusionParams& b) { return a == b; });

  py::class_<ScoredHypothesis>(m, "Hypothesis")
      .def(py::init([](std::vector<TokenId> tokens, double am, double lm, double coverage) {
             return ScoredHypothesis{ToTranscript(tokens), am, lm, coverage, std::nullopt};
           }),
           py::arg("tokens"), py::arg("am"), py::arg("lm") = 0.0, py::arg("coverage") = 0.0)
      .def_property_readonly("tokens",
                             [](const ScoredHypothesis& h) { return h.transcript.tokens; })
      .def_readonly("am", &ScoredHypothesis::am_score)
      .def_readonly("lm", &ScoredHypothesis::lm_score)
      .def_readonly("coverage", &ScoredHypothesis::coverage);

  m.def("fuse_score", &FuseScore, py::arg("hypothesis"), py::arg("params"));
  m.def(
      "rerank_best",
      [](const std::vector<ScoredHypothesis>& hyps, const FusionParams& p) {
        return RerankBest(hyps, p);
      },
      py::arg("hypotheses"), py::arg("params"));
  m.def(
      "wer",
      [](const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
        const auto r = ComputeWer(ref, hyp);
        return py::dict(py::arg("wer") = r.wer, py::arg("substitutions") = r.substitutions,
                        py::arg("insertions") = r.insertions, py::arg("deletions") = r.deletions);
      },
      py::arg("reference"), py::arg("hypothesis"));

  py::class_<FilterModel>(m, "FilterModel")
      .def(py::init([](double mu, double beta, double sigma) {
             return FilterModel{mu, beta, sigma};
           }),
           py::arg("mu"), py::arg("beta"), py::arg("sigma"))
      .def_readonly("mu", &FilterModel::mu)
      .def_readonly("beta", &FilterModel::beta)
      .def_readonly("sigma", &FilterModel::sigma)
      .def("score", [](const FilterModel& f, double s, std::size_t l) { return FilterScore(f, s, l); },
           py::arg("fused_score"), py::arg("length"))
      .def("__repr__", [](const FilterModel& f) {
        return "FilterModel(mu=" + std::to_string(f.mu) + ", beta=" + std::to_string(f.beta) +
               ", sigma=" + std::to_string(f.sigma) + ")";
      });

  m.def(
      "fit_filter",
      [](const std::vector<std::size_t>& lengths, const std::vector<double>& scores) {
        if (lengths.size() != scores.size()) {
          throw std::invalid_argument("lengths and scores differ in size");
        }
        std::vector<LengthScore> pairs;
        for (std::size_t i = 0; i < lengths.size(); ++i) pairs.push_back({lengths[i], scores[i]});
        return FitFilter(pairs);
      },
      py::arg("lengths"), py::arg("scores"));
  m.def(
      "filter_mask",
      [](const FilterModel& f, const std::vector<double>& scores,
         const std::vector<std::size_t>& lengths, double cutoff) {
        if (lengths.size() != scores.size()) {
          throw std::invalid_argument("lengths and scores differ in size");
        }
        std::vector<bool> keep;
        for (std::size_t i = 0; i < scores.size(); ++i) {
          keep.push_back(PassesCutoff(FilterScore(f, scores[i], lengths[i]), cutoff));
        }
        return keep;
      },
      py::arg("model"), py::arg("scores"), py::arg("lengths"), py::arg("cutoff"));

  m.def(
      "kl_divergence",
      [](const std::vector<double>& p, const std::vector<double>& q, double eps) {
        return KlDivergence(TokenDistribution(p), TokenDistribution(q), eps);
      },
      py::arg("p"), py::arg("q"), py::arg("epsilon") = 1e-6);
  m.def(
      "balance",
      [](const std::vector<std::vector<TokenId>>& pool, const std::vector<double>& target,
         int cap, double batch_fraction, std::size_t min_tokens, double eps) {
        std::vector<WeightedSample> samples;
        for (std::size_t i = 0; i < pool.size(); ++i) {
          samples.push_back({std::to_string(i), ToTranscript(pool[i]), 1});
        }
        SamplerConfig c{cap, batch_fraction, min_tokens, eps};
        const auto r = SubmodularSample(samples, TokenDistribution::FromCounts(target), c);
        std::vector<int> mult(pool.size(), 0);
        for (const auto& s : r.samples) mult[std::stoul(s.id)] = s.multiplicity;
        return py::dict(py::arg("multiplicities") = mult, py::arg("infeasible") = r.infeasible,
                        py::arg("batches") = r.batches, py::arg("token_total") = r.token_total,
                        py::arg("kl") = r.final_kl);
      },
      py::arg("pool"), py::arg("target"), py::arg("cap") = 2, py::arg("batch_fraction") = 0.1,
      py::arg("min_tokens") = 0, py::arg("epsilon") = 1e-6);

  m.def(
      "spec_augment",
      [](const Array& x, std::uint64_t seed, int freq_mask_param, int num_freq_masks,
         std::optional<int> time_mask_param, std::optional<double> time_mask_ratio,
         int num_time_masks, int time_warp_param, float masked_value) {
        AugmentPolicy p;
        p.freq_mask_param = freq_mask_param;
        p.num_freq_masks = num_freq_masks;
        p.time_mask_param = time_mask_ratio ? std::nullopt : time_mask_param;
        p.time_mask_ratio = time_mask_ratio;
        p.num_time_masks = num_time_masks;
        p.time_warp_param = time_warp_param;
        p.masked_value = masked_value;
        p.Validate();
        Rng rng(seed);
        return ToArray(ApplyPolicy(ToMatrix(x), p, rng));
      },
      py::arg("features"), py::arg("seed"), py::arg("freq_mask_param") = 0,
      py::arg("num_freq_masks") = 2, py::arg("time_mask_param") = 0,
      py::arg("time_mask_ratio") = std::nullopt, py::arg("num_time_masks") = 0,
      py::arg("time_warp_param") = 0, py::arg("masked_value") = 0.0f);
  m.def(
      "time_warp_at",
      [](const Array& x, std::size_t anchor, long displacement) {
        return ToArray(TimeWarpAt(ToMatrix(x), anchor, displacement));
      },
      py::arg("features"), py::arg("anchor"), py::arg("displacement"));

  m.def(
      "batchwise_mix",
      [](std::size_t n_sup, std::size_t n_semi, const std::string& ratio, int batch_size,
         int batches, std::uint64_t seed, const std::vector<int>& semi_multiplicities) {
        BatchwiseMixer mixer(CountsDataset(n_sup, {}, "s"),
                             CountsDataset(n_semi, semi_multiplicities, "u"),
                             ParseMixRatio(ratio), batch_size, Rng(seed));
        std::vector<std::vector<std::pair<std::string, std::size_t>>> out;
        for (int b = 0; b < batches; ++b) {
          auto& batch = out.emplace_back();
          for (const auto& e : mixer.NextBatch()) batch.emplace_back(OriginName(e.origin), e.index);
        }
        return out;
      },
      py::arg("num_supervised"), py::arg("num_semi"), py::arg("ratio"), py::arg("batch_size"),
      py::arg("batches"), py::arg("seed") = 0,
      py::arg("semi_multiplicities") = std::vector<int>{});

  m.def(
      "write_toy_task",
      [](const std::filesystem::path& out_dir, int vocab_size, double noise, int frames_per_token,
         int supervised, int unlabeled, int dev, std::uint64_t seed) {
        return WriteToyTask({vocab_size, noise, frames_per_token, supervised, unlabeled, dev, seed},
                            out_dir);
      },
      py::arg("out_dir"), py::arg("vocab_size") = 20, py::arg("noise") = 1.1,
      py::arg("frames_per_token") = 4, py::arg("supervised") = 200, py::arg("unlabeled") = 2000,
      py::arg("dev") = 300, py::arg("seed") = 1);

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& config_path, const std::filesystem::path& workdir,
         std::uint64_t seed, std::optional<int> generations) {
        const auto config = LoadPipelineConfig(config_path);
        const ToyRecognizer recognizer(static_cast<int>(LoadVocab(config.vocab).size()),
                                       config.frames_per_token, config.decode_lm_weight);
        Pipeline pipeline(config, recognizer, workdir);
        PipelineState state;
        {
          py::gil_scoped_release release;
          state = pipeline.Run(pipeline.Resume(seed), generations);
        }
        py::list rows;
        for (const auto& g : state.metrics) {
          rows.append(py::dict(py::arg("generation") = g.generation,
                               py::arg("dev_wer") = g.dev_wer, py::arg("semi_size") = g.semi_size,
                               py::arg("semi_tokens") = g.semi_tokens,
                               py::arg("pseudo_labeled") = g.pseudo_labeled,
                               py::arg("cutoff") = g.cutoff));
        }
        return rows;
      },
      py::arg("config"), py::arg("workdir"), py::arg("seed") = 0,
      py::arg("generations") = std::nullopt);
  m.def(
      "emit_reports",
      [](const std::filesystem::path& workdir, const std::filesystem::path& config_path) {
        return EmitReports(workdir, LoadPipelineConfig(config_path));
      },
      py::arg("workdir"), py::arg("config"));
}
