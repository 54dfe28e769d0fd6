# Copyright 2026 The NST Toolkit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Noisy student training data-pipeline toolkit."""

from ._core import (
    NO_CUTOFF,
    DegenerateFitError,
    FilterModel,
    FusionMode,
    FusionParams,
    Hypothesis,
    StageError,
    balance,
    batchwise_mix,
    emit_reports,
    filter_mask,
    fit_filter,
    fuse_score,
    kl_divergence,
    rerank_best,
    run_pipeline,
    spec_augment,
    time_warp_at,
    wer,
    write_toy_task,
)

__all__ = [
    "NO_CUTOFF",
    "DegenerateFitError",
    "FilterModel",
    "FusionMode",
    "FusionParams",
    "Hypothesis",
    "StageError",
    "balance",
    "batchwise_mix",
    "emit_reports",
    "filter_mask",
    "fit_filter",
    "fuse_score",
    "kl_divergence",
    "rerank_best",
    "run_pipeline",
    "spec_augment",
    "time_warp_at",
    "wer",
    "write_toy_task",
]
