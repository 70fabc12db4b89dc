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

// Dataset-level evaluation: per-query scoring, accuracy-threshold curves,
// area-under-curve aggregation and attribute-sliced reports.

#ifndef TRKIT_METRICS_HPP_
#define TRKIT_METRICS_HPP_

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trkit/intervals.hpp"

namespace trkit {

enum class QueryFormat { kKeyword, kPhrase, kSentence };
enum class QueryModality { kVision, kAudio, kVisionAudio };

std::string_view to_string(QueryFormat f);
std::string_view to_string(QueryModality m);
// Throw SchemaError on unknown names.
QueryFormat parse_query_format(std::string_view name);
QueryModality parse_query_modality(std::string_view name);

struct QueryRecord {
  std::string query_id;
  std::string video_id;
  std::string query_text;
  QueryFormat format = QueryFormat::kKeyword;
  QueryModality modality = QueryModality::kVision;
  double video_duration_s = 0.0;
  RangeSet gt;
};

// Throws SchemaError if gt is empty or leaves [0, video_duration_s].
void validate(const QueryRecord& q);

enum class BucketName { kUltraShort, kShort, kMedium, kLong, kUltraLong };

std::string_view to_string(BucketName b);

struct DurationBucket {
  BucketName name = BucketName::kUltraShort;
  double lower_s = 0.0;  // inclusive
  double upper_s = std::numeric_limits<double>::infinity();  // exclusive
};

// Half-open partition [0,60) [60,600) [600,1800) [1800,3600) [3600,inf).
// Throws InvalidArgumentError for non-positive or non-finite durations.
DurationBucket bucket(double duration_s);

struct EvaluatedQuery {
  QueryRecord query;
  SampleScores scores;
  bool missing_prediction = false;
};

// Scores every query against its prediction; queries without a prediction
// are scored as an empty prediction and flagged. Output is sorted by
// query_id. Duplicate query ids throw SchemaError.
std::vector<EvaluatedQuery> evaluate(
    std::span<const QueryRecord> queries,
    const std::map<std::string, RangeSet>& preds);

enum class Metric { kPrecision, kRecall, kIou };

std::string_view to_string(Metric m);
double metric_value(const SampleScores& s, Metric m);

struct CurvePoint {
  double threshold = 0.0;
  double accuracy = 0.0;
};

inline constexpr std::size_t kDefaultGridN = 1001;

// Fraction of samples whose metric is >= each threshold k/(grid_n-1).
std::vector<CurvePoint> curve(std::span<const SampleScores> scores,
                              Metric metric,
                              std::size_t grid_n = kDefaultGridN);

// Trapezoidal area under a curve produced by curve(). Rejects grids that
// are not the uniform k/(n-1) grid on [0,1].
double auc(std::span<const CurvePoint> points);

struct ReportRow {
  std::string axis;   // "overall", "duration", "format" or "modality"
  std::string slice;  // bucket / format / modality name, or "overall"
  double precision_auc = 0.0;
  double recall_auc = 0.0;
  double iou_auc = 0.0;
  std::size_t n_queries = 0;
};

struct Report {
  std::size_t grid_n = kDefaultGridN;
  // Fixed order: overall, then the duration, format and modality axes in
  // enum order. Slices with no queries are absent.
  std::vector<ReportRow> rows;

  const ReportRow* find(std::string_view axis, std::string_view slice) const;
};

Report report(std::span<const EvaluatedQuery> evaluated,
              std::size_t grid_n = kDefaultGridN);

std::string report_markdown(const Report& r);

}  // namespace trkit

#endif  // TRKIT_METRICS_HPP_
