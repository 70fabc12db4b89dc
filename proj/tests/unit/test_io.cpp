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

#include <filesystem>

#include <gtest/gtest.h>

#include "json.hpp"
#include "trkit/error.hpp"

namespace trkit::io {
namespace {

const std::string kGtLine =
    R"({"query_id":"q1","video_id":"v","query":"love","format":"keyword",)"
    R"("modality":"vision+audio","duration_s":100,"gt_ranges":[[20,30],[10,15]]})";

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

TEST(GroundTruth, ParsesAndNormalizes) {
  const auto qs = parse_ground_truth(kGtLine + "\n\n", "gt.jsonl");
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_EQ(qs[0].modality, QueryModality::kVisionAudio);
  EXPECT_EQ(qs[0].gt, RangeSet::normalize({{10, 15}, {20, 30}}));
}

TEST(GroundTruth, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_of([] { parse_ground_truth(kGtLine + "\n{oops", "gt.jsonl"); }),
            "gt.jsonl:2: malformed JSON");
  EXPECT_EQ(error_of([] { parse_ground_truth(kGtLine + "\n" + kGtLine, "g"); }),
            "g:2: duplicate query_id 'q1'");
  EXPECT_NE(error_of([] { parse_ground_truth(R"({"query_id":"a"})", "g"); })
                .find("missing field 'video_id'"),
            std::string::npos);
  std::string beyond = kGtLine;
  beyond.replace(beyond.find("[20,30]"), 7, "[20,300]");
  EXPECT_NE(error_of([&] { parse_ground_truth(beyond, "g"); }).find("g:1:"),
            std::string::npos);
  std::string reversed = kGtLine;
  reversed.replace(reversed.find("[20,30]"), 7, "[30,20]");
  EXPECT_NE(error_of([&] { parse_ground_truth(reversed, "g"); }).find("gt_ranges"),
            std::string::npos);
  std::string empty = kGtLine;
  empty.replace(empty.find("[[20,30],[10,15]]"), 17, "[]");
  EXPECT_NE(error_of([&] { parse_ground_truth(empty, "g"); }), "");
}

TEST(Predictions, RangesOrRawText) {
  const auto ps = parse_predictions(
      "{\"query_id\":\"a\",\"ranges\":[[1,2]]}\n"
      "{\"query_id\":\"b\",\"raw_text\":\"0:10-0:20\"}\n"
      "{\"query_id\":\"c\",\"ranges\":[],\"warnings\":[\"x\"]}\n",
      "p");
  ASSERT_EQ(ps.size(), 3u);
  EXPECT_TRUE(ps[0].ranges.has_value());
  EXPECT_EQ(*ps[1].raw_text, "0:10-0:20");
  EXPECT_EQ(ps[1].line, 2u);
  EXPECT_NE(error_of([] {
              parse_predictions("{\"query_id\":\"a\",\"ranges\":[],\"raw_text\":\"\"}", "p");
            }),
            "");
  EXPECT_EQ(error_of([] {
              parse_predictions("{\"query_id\":\"a\",\"ranges\":[]}\n{\"query_id\":\"a\",\"ranges\":[]}", "p");
            }),
            "p:2: duplicate query_id 'a'");
}

TEST(Predictions, ResolveRoutesRawTextThroughParser) {
  const auto gt = parse_ground_truth(kGtLine, "g");
  const auto ps = parse_predictions(
      "{\"query_id\":\"q1\",\"raw_text\":\"from 0:10 to 3:00\"}\n"
      "{\"query_id\":\"zz\",\"ranges\":[[1,2]]}\n",
      "p");
  const ResolvedPredictions r = resolve_predictions(ps, gt);
  EXPECT_EQ(r.ranges.at("q1"), RangeSet::normalize({{10, 100}}));
  EXPECT_EQ(r.ranges.count("zz"), 0u);
  EXPECT_GE(r.warnings.size(), 2u);  // clamp + unknown id
}

TEST(Predictions, UnparseableRawTextIsEmpty) {
  const auto gt = parse_ground_truth(kGtLine, "g");
  const auto ps = parse_predictions("{\"query_id\":\"q1\",\"raw_text\":\"sorry\"}", "p");
  const ResolvedPredictions r = resolve_predictions(ps, gt);
  EXPECT_TRUE(r.ranges.at("q1").empty());
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Writers, CurvesCsv) {
  const std::vector<SampleScores> s = {{1, 0.5, 0.5, false}};
  EXPECT_EQ(curves_csv(s, 3),
            "threshold,precision_acc,recall_acc,iou_acc\n0,1,1,1\n0.5,1,1,1\n1,1,0,0\n");
}

TEST(Writers, ReportJsonShape) {
  const auto gt = parse_ground_truth(kGtLine, "g");
  std::map<std::string, RangeSet> preds = {{"q1", gt[0].gt}};
  const auto ev = evaluate(gt, preds);
  const auto j = nlohmann::json::parse(report_json(report(ev), ev));
  EXPECT_EQ(j["grid_n"], 1001);
  EXPECT_EQ(j["rows"][0]["axis"], "overall");
  EXPECT_EQ(j["rows"][0]["iou_auc"], 1.0);
  EXPECT_EQ(j["queries"][0]["query_id"], "q1");
}

TEST(Writers, PredictionLineRoundTrips) {
  const RangeSet r = RangeSet::normalize({{1.25, 2}, {7, 9.5}});
  const std::vector<std::string> w = {"note"};
  const auto ps = parse_predictions(prediction_line("x", r, w), "p");
  EXPECT_EQ(RangeSet::normalize(*ps[0].ranges), r);
}

TEST(Writers, ManifestAndExamples) {
  synth::SyntheticManifest m;
  m.seed = 42;
  m.total_duration_s = 5;
  m.segments.push_back({synth::SynthModality::kVisual, "img", "a \"quoted\" cap", 0, 5});
  const auto j = nlohmann::json::parse(manifest_json(m));
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["padded"], "audio");
  EXPECT_EQ(j["segments"][0]["caption"], "a \"quoted\" cap");
  const auto lines = examples_jsonl(synth::emit_tasks(m));
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 2);
}

TEST(Corpora, VisualAndAudio) {
  const auto v = parse_visual_corpus(
      "{\"id\":\"a\",\"caption\":\"x\"}\n{\"id\":\"b\",\"caption\":\"y\",\"width\":640,\"height\":480,\"duration_s\":7}\n",
      "c");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].image_w, 1920);
  EXPECT_EQ(v[1].image_h, 480);
  EXPECT_EQ(*v[1].duration_s, 7.0);
  EXPECT_NE(error_of([] { parse_visual_corpus("{\"id\":\"a\",\"caption\":\"x\",\"width\":0}", "c"); }), "");
  EXPECT_EQ(parse_audio_corpus("{\"id\":\"a\",\"caption\":\"x\",\"length_s\":2.5}", "c")[0].length_s, 2.5);
  EXPECT_NE(error_of([] { parse_audio_corpus("{\"id\":\"a\",\"caption\":\"x\",\"length_s\":0}", "c"); }), "");
}

TEST(Candidates, Validation) {
  const auto c = parse_candidates(
      "{\"query\":\"q\",\"ranges\":[[0,1]],\"confidence\":0.9,\"source\":\"mixed\"}", "c");
  EXPECT_EQ(c[0].source, postproc::CandidateSource::kMixed);
  EXPECT_NE(error_of([] { parse_candidates("{\"query\":\"q\",\"ranges\":[[0,1]],\"confidence\":1.2}", "c"); }), "");
  EXPECT_NE(error_of([] { parse_candidates("{\"query\":\"q\",\"ranges\":[],\"confidence\":0.5}", "c"); }), "");
  EXPECT_NE(error_of([] { parse_candidates("{\"query\":\"q\",\"ranges\":[[0,1]],\"confidence\":0.5,\"source\":\"tv\"}", "c"); }), "");
}

TEST(Candidates, OutputLines) {
  postproc::DroppedQuery d{{"q", {{0, 1}}, 0.5, postproc::CandidateSource::kCaption},
                           postproc::DropReason::kLowConfidence};
  const auto j = nlohmann::json::parse(dropped_jsonl(std::vector{d}));
  EXPECT_EQ(j["reason"], "low_confidence");
  EXPECT_EQ(j["confidence"], 0.5);
}

TEST(Blocklist, SkipsCommentsAndBlanks) {
  EXPECT_EQ(parse_blocklist("# header\n\n  as seen here  \nthe end\r\n"),
            (std::vector<std::string>{"as seen here", "the end"}));
}

TEST(Files, ReadWriteAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "trkit_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_file(dir / "x.txt", "hello");
  EXPECT_EQ(read_file(dir / "x.txt"), "hello");
  EXPECT_THROW(read_file(dir / "missing.txt"), IoError);
  std::filesystem::remove_all(dir.parent_path());
}

}  // namespace
}  // namespace trkit::io
