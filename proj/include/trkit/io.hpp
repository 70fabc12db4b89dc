// Copyright 2026 The trkit Authors.
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

// JSON-lines ingestion and artifact serialization for the command-line tool.
// Every loader reports failures as "<source>:<line>: <reason>".

#ifndef TRKIT_IO_HPP_
#define TRKIT_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trkit/intervals.hpp"
#include "trkit/metrics.hpp"
#include "trkit/postproc.hpp"
#include "trkit/synthgen.hpp"

namespace trkit::io {

// Throws IoError.
std::string read_file(const std::filesystem::path& path);
// Creates missing parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);

// Ground truth: {"query_id","video_id","query","format","modality",
// "duration_s","gt_ranges":[[s,e],...]}. Throws SchemaError.
std::vector<QueryRecord> parse_ground_truth(std::string_view jsonl,
                                            std::string_view source);

struct PredictionRecord {
  std::string query_id;
  std::optional<std::vector<TimeRange>> ranges;
  std::optional<std::string> raw_text;
  std::size_t line = 0;
};

// {"query_id","ranges":[[s,e],...]} or {"query_id","raw_text":"..."}.
// Duplicate ids are a SchemaError.
std::vector<PredictionRecord> parse_predictions(std::string_view jsonl,
                                                std::string_view source);

struct ResolvedPredictions {
  std::map<std::string, RangeSet> ranges;
  std::vector<std::string> warnings;
};

// raw_text entries go through parse_timestamps, clamped to the matching
// ground-truth duration; unparseable text becomes an empty prediction.
ResolvedPredictions resolve_predictions(
    std::span<const PredictionRecord> preds,
    std::span<const QueryRecord> ground_truth);

std::string report_json(const Report& report,
                        std::span<const EvaluatedQuery> evaluated);

// threshold,precision_acc,recall_acc,iou_acc
std::string curves_csv(std::span<const SampleScores> scores,
                       std::size_t grid_n);

// One canonical prediction line, as read back by parse_predictions.
std::string prediction_line(std::string_view query_id, const RangeSet& ranges,
                            std::span<const std::string> warnings);

std::string manifest_json(const synth::SyntheticManifest& manifest);
std::string examples_jsonl(std::span<const synth::TrainingExample> examples);

// Caption corpora for the synthetic planner.
// visual: {"id","caption"[,"width","height","duration_s"]}
// audio:  {"id","caption","length_s"}
std::vector<synth::VisualItem> parse_visual_corpus(std::string_view jsonl,
                                                   std::string_view source);
std::vector<synth::AudioClip> parse_audio_corpus(std::string_view jsonl,
                                                 std::string_view source);

// {"query","ranges","confidence"[,"source"]}
std::vector<postproc::CandidateQuery> parse_candidates(
    std::string_view jsonl, std::string_view source);
std::string candidates_jsonl(std::span<const postproc::CandidateQuery> kept);
std::string dropped_jsonl(std::span<const postproc::DroppedQuery> dropped);

// One pattern per line; blank lines and lines starting with '#' skipped.
std::vector<std::string> parse_blocklist(std::string_view text);

}  // namespace trkit::io

#endif  // TRKIT_IO_HPP_
