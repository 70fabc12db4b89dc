# Copyright 2026 The trkit Authors.
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

"""Temporal retrieval evaluation toolkit."""

import json

from trkit._trkit import (
    InvalidArgumentError,
    InvalidRangeError,
    IoError,
    NumericError,
    ParseError,
    SampleScores,
    SchemaError,
    TrkitError,
    alpha_weights,
    auc,
    bucket,
    classify_format,
    curve,
    frames_to_time,
    intersect,
    log_sum_exp,
    measure,
    normalize,
    parse_frame_ranges,
    parse_timestamps,
    run_cli,
    score,
    unite,
)
from trkit import _trkit

__all__ = [
    "InvalidArgumentError",
    "InvalidRangeError",
    "IoError",
    "NumericError",
    "ParseError",
    "SampleScores",
    "SchemaError",
    "TrkitError",
    "alpha_weights",
    "auc",
    "bucket",
    "classify_format",
    "curve",
    "evaluate",
    "frames_to_time",
    "intersect",
    "log_sum_exp",
    "measure",
    "normalize",
    "parse_frame_ranges",
    "parse_timestamps",
    "postprocess",
    "run_cli",
    "score",
    "synthesize",
    "unite",
]


def _jsonl(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def evaluate(ground_truth, predictions, grid_n=1001):
    """Score JSONL predictions against JSONL ground truth; returns the report dict."""
    return json.loads(_trkit.evaluate_jsonl(ground_truth, predictions, grid_n))


def postprocess(candidates, merge_gap=0.5, min_confidence=0.9, max_ranges=10, blocklist=None):
    """Filter JSONL candidate queries; returns (kept, dropped) record lists."""
    kept, dropped = _trkit.postprocess_jsonl(
        candidates, merge_gap, min_confidence, max_ranges, blocklist)
    return _jsonl(kept), _jsonl(dropped)


def synthesize(corpus, modality="visual", seed=0, fps=1.0):
    """Build a synthetic manifest from a JSONL corpus; returns (manifest, tasks)."""
    manifest, tasks = _trkit.synth_jsonl(corpus, modality, seed, fps)
    return json.loads(manifest), _jsonl(tasks)
