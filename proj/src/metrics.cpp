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

#include "trkit/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "trkit/error.hpp"

namespace trkit {

std::string_view to_string(QueryFormat f) {
  switch (f) {
    case QueryFormat::kKeyword: return "keyword";
    case QueryFormat::kPhrase: return "phrase";
    case QueryFormat::kSentence: return "sentence";
  }
  return "unknown";
}

std::string_view to_string(QueryModality m) {
  switch (m) {
    case QueryModality::kVision: return "vision";
    case QueryModality::kAudio: return "audio";
    case QueryModality::kVisionAudio: return "vision_audio";
  }
  return "unknown";
}

QueryFormat parse_query_format(std::string_view name) {
  for (auto f : {QueryFormat::kKeyword, QueryFormat::kPhrase,
                 QueryFormat::kSentence}) {
    if (name == to_string(f)) return f;
  }
  throw SchemaError(fmt::format("unknown query format '{}'", name));
}

QueryModality parse_query_modality(std::string_view name) {
  for (auto m : {QueryModality::kVision, QueryModality::kAudio,
                 QueryModality::kVisionAudio}) {
    if (name == to_string(m)) return m;
  }
  // Accept the spelling used in annotation guidelines.
  if (name == "vision+audio") return QueryModality::kVisionAudio;
  throw SchemaError(fmt::format("unknown query modality '{}'", name));
}

void validate(const QueryRecord& q) {
  if (q.gt.empty()) {
    throw SchemaError(
        fmt::format("query '{}' has no ground-truth ranges", q.query_id));
  }
  if (!(q.video_duration_s > 0.0) || !std::isfinite(q.video_duration_s)) {
    throw SchemaError(fmt::format("query '{}' has invalid duration {}",
                                  q.query_id, q.video_duration_s));
  }
  // Canonical sets are sorted, so only the last end can exceed the video.
  if (q.gt.ranges().back().end_s > q.video_duration_s) {
    throw SchemaError(fmt::format(
        "query '{}': ground truth ends at {} beyond video duration {}",
        q.query_id, q.gt.ranges().back().end_s, q.video_duration_s));
  }
}

std::string_view to_string(BucketName b) {
  switch (b) {
    case BucketName::kUltraShort: return "ultra_short";
    case BucketName::kShort: return "short";
    case BucketName::kMedium: return "medium";
    case BucketName::kLong: return "long";
    case BucketName::kUltraLong: return "ultra_long";
  }
  return "unknown";
}

namespace {

constexpr std::array<double, 4> kBucketEdges = {60.0, 600.0, 1800.0, 3600.0};
constexpr std::array<BucketName, 5> kBuckets = {
    BucketName::kUltraShort, BucketName::kShort, BucketName::kMedium,
    BucketName::kLong, BucketName::kUltraLong};

}  // namespace

DurationBucket bucket(double duration_s) {
  if (!(duration_s > 0.0) || std::isnan(duration_s)) {
    throw InvalidArgumentError(
        fmt::format("duration must be positive, got {}", duration_s));
  }
  std::size_t k = 0;
  while (k < kBucketEdges.size() && duration_s >= kBucketEdges[k]) ++k;
  DurationBucket b;
  b.name = kBuckets[k];
  b.lower_s = k == 0 ? 0.0 : kBucketEdges[k - 1];
  b.upper_s = k == kBucketEdges.size()
                  ? std::numeric_limits<double>::infinity()
                  : kBucketEdges[k];
  return b;
}

std::vector<EvaluatedQuery> evaluate(
    std::span<const QueryRecord> queries,
    const std::map<std::string, RangeSet>& preds) {
  std::set<std::string> seen;
  std::vector<EvaluatedQuery> out;
  out.reserve(queries.size());
  for (const QueryRecord& q : queries) {
    if (!seen.insert(q.query_id).second) {
      throw SchemaError(fmt::format("duplicate query_id '{}'", q.query_id));
    }
    EvaluatedQuery e{q, {}, false};
    auto it = preds.find(q.query_id);
    if (it == preds.end()) {
      e.missing_prediction = true;
      e.scores = score(RangeSet(), q.gt);
    } else {
      e.scores = score(it->second, q.gt);
    }
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const EvaluatedQuery& a, const EvaluatedQuery& b) {
              return a.query.query_id < b.query.query_id;
            });
  return out;
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kPrecision: return "precision";
    case Metric::kRecall: return "recall";
    case Metric::kIou: return "iou";
  }
  return "unknown";
}

double metric_value(const SampleScores& s, Metric m) {
  switch (m) {
    case Metric::kPrecision: return s.precision;
    case Metric::kRecall: return s.recall;
    case Metric::kIou: return s.iou;
  }
  return 0.0;
}

namespace {

double grid_threshold(std::size_t k, std::size_t grid_n) {
  return static_cast<double>(k) / static_cast<double>(grid_n - 1);
}

}  // namespace

std::vector<CurvePoint> curve(std::span<const SampleScores> scores,
                              Metric metric, std::size_t grid_n) {
  if (scores.empty()) {
    throw InvalidArgumentError("cannot build a curve over an empty dataset");
  }
  if (grid_n < 2) {
    throw InvalidArgumentError(
        fmt::format("grid_n must be at least 2, got {}", grid_n));
  }
  std::vector<double> values;
  values.reserve(scores.size());
  for (const SampleScores& s : scores) values.push_back(metric_value(s, metric));
  std::sort(values.begin(), values.end());

  const double n = static_cast<double>(values.size());
  std::vector<CurvePoint> points;
  points.reserve(grid_n);
  for (std::size_t k = 0; k < grid_n; ++k) {
    const double tau = grid_threshold(k, grid_n);
    // Count of values >= tau.
    const auto first = std::lower_bound(values.begin(), values.end(), tau);
    const auto passing = static_cast<double>(values.end() - first);
    points.push_back({tau, passing / n});
  }
  return points;
}

double auc(std::span<const CurvePoint> points) {
  const std::size_t n = points.size();
  if (n < 2) {
    throw InvalidArgumentError("a curve needs at least two points");
  }
  for (std::size_t k = 0; k < n; ++k) {
    // The grid is generated as k/(n-1); tolerate re-parsed text values.
    if (std::abs(points[k].threshold - grid_threshold(k, n)) > 1e-12) {
      throw InvalidArgumentError(fmt::format(
          "curve threshold {} at position {} is off the uniform grid",
          points[k].threshold, k));
    }
  }
  // Sum the ordinates first and divide once, so a constant curve
  // integrates exactly.
  double sum = 0.5 * (points.front().accuracy + points.back().accuracy);
  for (std::size_t k = 1; k + 1 < n; ++k) sum += points[k].accuracy;
  return sum / static_cast<double>(n - 1);
}

const ReportRow* Report::find(std::string_view axis,
                              std::string_view slice) const {
  for (const ReportRow& r : rows) {
    if (r.axis == axis && r.slice == slice) return &r;
  }
  return nullptr;
}

namespace {

ReportRow make_row(std::string axis, std::string slice,
                   const std::vector<SampleScores>& scores,
                   std::size_t grid_n) {
  ReportRow row;
  row.axis = std::move(axis);
  row.slice = std::move(slice);
  row.n_queries = scores.size();
  row.precision_auc = auc(curve(scores, Metric::kPrecision, grid_n));
  row.recall_auc = auc(curve(scores, Metric::kRecall, grid_n));
  row.iou_auc = auc(curve(scores, Metric::kIou, grid_n));
  return row;
}

std::vector<SampleScores> select_scores(
    std::span<const EvaluatedQuery> evaluated, auto&& keep) {
  std::vector<SampleScores> out;
  for (const EvaluatedQuery& e : evaluated) {
    if (keep(e)) out.push_back(e.scores);
  }
  return out;
}

}  // namespace

Report report(std::span<const EvaluatedQuery> evaluated, std::size_t grid_n) {
  if (evaluated.empty()) {
    throw InvalidArgumentError("cannot report on an empty evaluation");
  }
  Report r;
  r.grid_n = grid_n;
  r.rows.push_back(make_row(
      "overall", "overall",
      select_scores(evaluated, [](const EvaluatedQuery&) { return true; }),
      grid_n));

  for (BucketName b : kBuckets) {
    auto s = select_scores(evaluated, [b](const EvaluatedQuery& e) {
      return bucket(e.query.video_duration_s).name == b;
    });
    if (!s.empty()) {
      r.rows.push_back(make_row("duration", std::string(to_string(b)), s, grid_n));
    }
  }
  for (QueryFormat f : {QueryFormat::kKeyword, QueryFormat::kPhrase,
                        QueryFormat::kSentence}) {
    auto s = select_scores(evaluated, [f](const EvaluatedQuery& e) {
      return e.query.format == f;
    });
    if (!s.empty()) {
      r.rows.push_back(make_row("format", std::string(to_string(f)), s, grid_n));
    }
  }
  for (QueryModality m : {QueryModality::kVision, QueryModality::kAudio,
                          QueryModality::kVisionAudio}) {
    auto s = select_scores(evaluated, [m](const EvaluatedQuery& e) {
      return e.query.modality == m;
    });
    if (!s.empty()) {
      r.rows.push_back(make_row("modality", std::string(to_string(m)), s, grid_n));
    }
  }
  return r;
}

std::string report_markdown(const Report& r) {
  std::string out;
  out += fmt::format("| {:<8} | {:<12} | {:>7} | {:>7} | {:>7} | {:>9} |\n",
                     "axis", "slice", "P_auc", "R_auc", "IoU_auc", "n_queries");
  out += fmt::format("|{:-<10}|{:-<14}|{:->8}:|{:->8}:|{:->8}:|{:->10}:|\n", "",
                     "", "", "", "", "");
  for (const ReportRow& row : r.rows) {
    out += fmt::format(
        "| {:<8} | {:<12} | {:>7.4f} | {:>7.4f} | {:>7.4f} | {:>9} |\n",
        row.axis, row.slice, row.precision_auc, row.recall_auc, row.iou_auc,
        row.n_queries);
  }
  return out;
}

}  // namespace trkit
