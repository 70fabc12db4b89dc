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

#include "trkit/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "trkit/error.hpp"
#include "trkit/parsers.hpp"

namespace trkit::io {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view content) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!content.empty()) {
    ++number;
    const std::size_t nl = content.find('\n');
    std::string_view text = content.substr(0, nl);
    content = nl == std::string_view::npos ? std::string_view{}
                                           : content.substr(nl + 1);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.find_first_not_of(" \t") == std::string_view::npos) continue;
    lines.push_back({number, text});
  }
  return lines;
}

// Error context for one input line.
struct Where {
  std::string_view source;
  std::size_t line;

  [[noreturn]] void fail(std::string_view reason) const {
    throw SchemaError(fmt::format("{}:{}: {}", source, line, reason));
  }
};

Json parse_object(const Line& line, const Where& where) {
  Json j = Json::parse(line.text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) where.fail("malformed JSON");
  if (!j.is_object()) where.fail("expected a JSON object");
  return j;
}

const Json& field(const Json& obj, const char* key, const Where& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) where.fail(fmt::format("missing field '{}'", key));
  return *it;
}

std::string get_string(const Json& obj, const char* key, const Where& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_string()) where.fail(fmt::format("field '{}' must be a string", key));
  return v.get<std::string>();
}

double get_number(const Json& v, const char* key, const Where& where) {
  if (!v.is_number()) where.fail(fmt::format("field '{}' must be a number", key));
  return v.get<double>();
}

std::int64_t get_positive_int(const Json& v, const char* key,
                              const Where& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
    where.fail(fmt::format("field '{}' must be a positive integer", key));
  }
  return v.get<std::int64_t>();
}

std::vector<TimeRange> get_ranges(const Json& obj, const char* key,
                                  const Where& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_array()) where.fail(fmt::format("field '{}' must be an array", key));
  std::vector<TimeRange> out;
  for (const Json& pair : v) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number()) {
      where.fail(fmt::format("field '{}' must hold [start, end] number pairs",
                             key));
    }
    out.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  try {
    (void)RangeSet::normalize(out);
  } catch (const InvalidRangeError& e) {
    where.fail(fmt::format("field '{}': {}", key, e.what()));
  }
  return out;
}

OrderedJson ranges_json(std::span<const TimeRange> ranges) {
  OrderedJson arr = OrderedJson::array();
  for (const TimeRange& r : ranges) arr.push_back({r.start_s, r.end_s});
  return arr;
}

std::string dump_line(const OrderedJson& j) { return j.dump() + "\n"; }

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("cannot read '{}'", path.string()));
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError(fmt::format("cannot create '{}': {}",
                                path.parent_path().string(), ec.message()));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
}

std::vector<QueryRecord> parse_ground_truth(std::string_view jsonl,
                                            std::string_view source) {
  std::vector<QueryRecord> out;
  std::set<std::string> seen;
  for (const Line& line : split_lines(jsonl)) {
    const Where where{source, line.number};
    const Json j = parse_object(line, where);
    QueryRecord q;
    q.query_id = get_string(j, "query_id", where);
    q.video_id = get_string(j, "video_id", where);
    q.query_text = get_string(j, "query", where);
    try {
      q.format = parse_query_format(get_string(j, "format", where));
      q.modality = parse_query_modality(get_string(j, "modality", where));
    } catch (const SchemaError& e) {
      where.fail(e.what());
    }
    q.video_duration_s = get_number(field(j, "duration_s", where),
                                    "duration_s", where);
    q.gt = RangeSet::normalize(get_ranges(j, "gt_ranges", where));
    try {
      validate(q);
    } catch (const Error& e) {
      where.fail(e.what());
    }
    if (!seen.insert(q.query_id).second) {
      where.fail(fmt::format("duplicate query_id '{}'", q.query_id));
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<PredictionRecord> parse_predictions(std::string_view jsonl,
                                                std::string_view source) {
  std::vector<PredictionRecord> out;
  std::set<std::string> seen;
  for (const Line& line : split_lines(jsonl)) {
    const Where where{source, line.number};
    const Json j = parse_object(line, where);
    PredictionRecord p;
    p.line = line.number;
    p.query_id = get_string(j, "query_id", where);
    const bool has_ranges = j.contains("ranges");
    const bool has_raw = j.contains("raw_text");
    if (has_ranges == has_raw) {
      where.fail("exactly one of 'ranges' or 'raw_text' is required");
    }
    if (has_ranges) {
      p.ranges = get_ranges(j, "ranges", where);
    } else {
      p.raw_text = get_string(j, "raw_text", where);
    }
    if (!seen.insert(p.query_id).second) {
      where.fail(fmt::format("duplicate query_id '{}'", p.query_id));
    }
    out.push_back(std::move(p));
  }
  return out;
}

ResolvedPredictions resolve_predictions(
    std::span<const PredictionRecord> preds,
    std::span<const QueryRecord> ground_truth) {
  std::map<std::string, const QueryRecord*> by_id;
  for (const QueryRecord& q : ground_truth) by_id.emplace(q.query_id, &q);

  ResolvedPredictions out;
  for (const PredictionRecord& p : preds) {
    const auto it = by_id.find(p.query_id);
    if (it == by_id.end()) {
      out.warnings.push_back(
          fmt::format("prediction for unknown query '{}' ignored", p.query_id));
      continue;
    }
    if (p.ranges) {
      out.ranges.emplace(p.query_id, RangeSet::normalize(*p.ranges));
      continue;
    }
    try {
      ParseOutcome parsed =
          parse_timestamps(*p.raw_text, it->second->video_duration_s);
      for (const std::string& w : parsed.warnings) {
        out.warnings.push_back(fmt::format("{}: {}", p.query_id, w));
      }
      out.ranges.emplace(p.query_id, std::move(parsed.ranges));
    } catch (const ParseError& e) {
      out.warnings.push_back(fmt::format("{}: {}", p.query_id, e.what()));
      out.ranges.emplace(p.query_id, RangeSet{});
    }
  }
  return out;
}

std::string report_json(const Report& report,
                        std::span<const EvaluatedQuery> evaluated) {
  OrderedJson j;
  j["grid_n"] = report.grid_n;
  OrderedJson rows = OrderedJson::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"axis", r.axis},
                    {"slice", r.slice},
                    {"precision_auc", r.precision_auc},
                    {"recall_auc", r.recall_auc},
                    {"iou_auc", r.iou_auc},
                    {"n_queries", r.n_queries}});
  }
  j["rows"] = std::move(rows);
  OrderedJson queries = OrderedJson::array();
  for (const EvaluatedQuery& e : evaluated) {
    queries.push_back({{"query_id", e.query.query_id},
                       {"precision", e.scores.precision},
                       {"recall", e.scores.recall},
                       {"iou", e.scores.iou},
                       {"degenerate", e.scores.degenerate},
                       {"missing_prediction", e.missing_prediction}});
  }
  j["queries"] = std::move(queries);
  return j.dump(2) + "\n";
}

std::string curves_csv(std::span<const SampleScores> scores,
                       std::size_t grid_n) {
  const auto p = curve(scores, Metric::kPrecision, grid_n);
  const auto r = curve(scores, Metric::kRecall, grid_n);
  const auto u = curve(scores, Metric::kIou, grid_n);
  std::string out = "threshold,precision_acc,recall_acc,iou_acc\n";
  for (std::size_t k = 0; k < p.size(); ++k) {
    out += fmt::format("{},{},{},{}\n", p[k].threshold, p[k].accuracy,
                       r[k].accuracy, u[k].accuracy);
  }
  return out;
}

std::string prediction_line(std::string_view query_id, const RangeSet& ranges,
                            std::span<const std::string> warnings) {
  OrderedJson j;
  j["query_id"] = query_id;
  j["ranges"] = ranges_json(ranges.ranges());
  j["warnings"] = OrderedJson::array();
  for (const std::string& w : warnings) j["warnings"].push_back(w);
  return dump_line(j);
}

std::string manifest_json(const synth::SyntheticManifest& m) {
  OrderedJson j;
  j["seed"] = m.seed;
  j["active"] = synth::to_string(m.active);
  j["padded"] = synth::to_string(m.padded());
  j["fps"] = m.fps;
  j["total_duration_s"] = m.total_duration_s;
  OrderedJson segments = OrderedJson::array();
  for (const synth::ManifestSegment& s : m.segments) {
    segments.push_back({{"modality", synth::to_string(s.modality)},
                        {"source_id", s.source_id},
                        {"caption", s.caption},
                        {"start_s", s.start_s},
                        {"end_s", s.end_s}});
  }
  j["segments"] = std::move(segments);
  OrderedJson crops = OrderedJson::array();
  for (const synth::CropSchedule& c : m.crops) {
    OrderedJson rects = OrderedJson::array();
    for (const synth::CropRect& r : c.rects) rects.push_back({r.x, r.y, r.w, r.h});
    crops.push_back(
        {{"source_image_id", c.source_image_id},
         {"image_w", c.image_w},
         {"image_h", c.image_h},
         {"fps", c.fps},
         {"params",
          {{"window_w", c.params.window_w},
           {"window_h", c.params.window_h},
           {"start_corner", synth::to_string(c.params.start_corner)},
           {"direction", synth::to_string(c.params.direction)},
           {"speed_px_per_frame", c.params.speed_px_per_frame},
           {"duration_s", c.params.duration_s}}},
         {"rects", std::move(rects)}});
  }
  j["crops"] = std::move(crops);
  return j.dump(2) + "\n";
}

std::string examples_jsonl(std::span<const synth::TrainingExample> examples) {
  std::string out;
  for (const synth::TrainingExample& e : examples) {
    OrderedJson j;
    j["objective"] = synth::to_string(e.objective);
    j["prompt"] = e.prompt;
    j["target"] = e.target;
    out += dump_line(j);
  }
  return out;
}

std::vector<synth::VisualItem> parse_visual_corpus(std::string_view jsonl,
                                                   std::string_view source) {
  std::vector<synth::VisualItem> out;
  for (const Line& line : split_lines(jsonl)) {
    const Where where{source, line.number};
    const Json j = parse_object(line, where);
    synth::VisualItem item;
    item.image_id = get_string(j, "id", where);
    item.caption = get_string(j, "caption", where);
    if (j.contains("width")) item.image_w = get_positive_int(j["width"], "width", where);
    if (j.contains("height")) item.image_h = get_positive_int(j["height"], "height", where);
    if (j.contains("duration_s")) {
      const double d = get_number(j["duration_s"], "duration_s", where);
      if (!(d > 0)) where.fail("field 'duration_s' must be positive");
      item.duration_s = d;
    }
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<synth::AudioClip> parse_audio_corpus(std::string_view jsonl,
                                                 std::string_view source) {
  std::vector<synth::AudioClip> out;
  for (const Line& line : split_lines(jsonl)) {
    const Where where{source, line.number};
    const Json j = parse_object(line, where);
    synth::AudioClip clip;
    clip.clip_id = get_string(j, "id", where);
    clip.caption = get_string(j, "caption", where);
    clip.length_s = get_number(field(j, "length_s", where), "length_s", where);
    if (!(clip.length_s > 0)) where.fail("field 'length_s' must be positive");
    out.push_back(std::move(clip));
  }
  return out;
}

std::vector<postproc::CandidateQuery> parse_candidates(
    std::string_view jsonl, std::string_view source) {
  std::vector<postproc::CandidateQuery> out;
  for (const Line& line : split_lines(jsonl)) {
    const Where where{source, line.number};
    const Json j = parse_object(line, where);
    postproc::CandidateQuery q;
    q.query_text = get_string(j, "query", where);
    q.ranges = get_ranges(j, "ranges", where);
    if (q.ranges.empty()) where.fail("field 'ranges' must not be empty");
    q.confidence = get_number(field(j, "confidence", where), "confidence", where);
    if (!(q.confidence >= 0.0 && q.confidence <= 1.0)) {
      where.fail("field 'confidence' must lie in [0, 1]");
    }
    if (j.contains("source")) {
      try {
        q.source = postproc::parse_candidate_source(get_string(j, "source", where));
      } catch (const SchemaError& e) {
        where.fail(e.what());
      }
    }
    out.push_back(std::move(q));
  }
  return out;
}

namespace {

OrderedJson candidate_json(const postproc::CandidateQuery& q) {
  OrderedJson j;
  j["query"] = q.query_text;
  j["ranges"] = ranges_json(q.ranges);
  j["confidence"] = q.confidence;
  j["source"] = postproc::to_string(q.source);
  return j;
}

}  // namespace

std::string candidates_jsonl(std::span<const postproc::CandidateQuery> kept) {
  std::string out;
  for (const auto& q : kept) out += dump_line(candidate_json(q));
  return out;
}

std::string dropped_jsonl(std::span<const postproc::DroppedQuery> dropped) {
  std::string out;
  for (const auto& d : dropped) {
    OrderedJson j = candidate_json(d.query);
    j["reason"] = postproc::to_string(d.reason);
    out += dump_line(j);
  }
  return out;
}

std::vector<std::string> parse_blocklist(std::string_view text) {
  std::vector<std::string> out;
  for (const Line& line : split_lines(text)) {
    std::string_view t = line.text;
    const auto first = t.find_first_not_of(" \t");
    const auto last = t.find_last_not_of(" \t");
    t = t.substr(first, last - first + 1);
    if (t.front() == '#') continue;
    out.emplace_back(t);
  }
  return out;
}

}  // namespace trkit::io
