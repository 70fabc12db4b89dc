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

#include "trkit/postproc.hpp"

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "trkit/error.hpp"

namespace trkit::postproc {
namespace {

CandidateQuery cq(std::string text, std::vector<TimeRange> ranges,
                  double confidence = 1.0) {
  return {std::move(text), std::move(ranges), confidence, CandidateSource::kCaption};
}

std::vector<TimeRange> spaced(int n, double gap) {
  std::vector<TimeRange> out;
  for (int i = 0; i < n; ++i) {
    const double s = i * (1.0 + gap);
    out.push_back({s, s + 1.0});
  }
  return out;
}

TEST(MergeRule, Examples) {
  EXPECT_EQ(merge_rule(cq("q", {{0, 5}, {5.3, 9}})).ranges,
            (std::vector<TimeRange>{{0, 9}}));
  EXPECT_EQ(merge_rule(cq("q", {{0, 5}, {6, 9}})).ranges,
            (std::vector<TimeRange>{{0, 5}, {6, 9}}));
  EXPECT_EQ(merge_rule(cq("q", {{2, 3}})).ranges, (std::vector<TimeRange>{{2, 3}}));
}

TEST(ConfidenceRule, Examples) {
  EXPECT_FALSE(confidence_rule(cq("q", {{0, 1}}, 0.89)));
  EXPECT_TRUE(confidence_rule(cq("q", {{0, 1}}, 0.90)));
  EXPECT_TRUE(confidence_rule(cq("q", {{0, 1}}, 1.0)));
}

TEST(GeneralityRule, Examples) {
  EXPECT_FALSE(generality_rule(cq("q", spaced(11, 2.0))));
  EXPECT_TRUE(generality_rule(cq("q", spaced(10, 2.0))));
  EXPECT_TRUE(generality_rule(cq("q", spaced(1, 2.0))));
}

TEST(StyleRule, Examples) {
  const auto block = default_blocklist();
  EXPECT_FALSE(style_rule(cq("The video concludes with a sunset.", {}), block));
  EXPECT_FALSE(style_rule(cq("In the closing moments, the band bows.", {}), block));
  EXPECT_TRUE(style_rule(cq("a man riding a bike", {}), block));
}

TEST(StyleRule, PhraseLevelAndCaseInsensitive) {
  const auto block = default_blocklist();
  EXPECT_FALSE(style_rule(cq("THE VIDEO CONCLUDES.", {}), block));
  EXPECT_FALSE(style_rule(cq("then  the   video\tconcludes", {}), block));
  EXPECT_TRUE(style_rule(cq("the videos conclude", {}), block));
  EXPECT_TRUE(style_rule(cq("in the closing momentum", {}), block));
  const std::vector<std::string> extra = {"As seen"};
  EXPECT_FALSE(style_rule(cq("as seen on stage", {}), extra));
  const std::vector<std::string> blank = {"   "};
  EXPECT_TRUE(style_rule(cq("anything", {}), blank));
}

TEST(ClassifyFormat, ReferenceExemplars) {
  EXPECT_EQ(classify_format("love"), QueryFormat::kKeyword);
  EXPECT_EQ(classify_format("coffee making process"), QueryFormat::kKeyword);
  EXPECT_EQ(classify_format("washing machine"), QueryFormat::kKeyword);
  EXPECT_EQ(classify_format("a man riding a bike"), QueryFormat::kPhrase);
  EXPECT_EQ(classify_format("person in deep thought"), QueryFormat::kPhrase);
  EXPECT_EQ(classify_format("enjoying a swim in the pool"), QueryFormat::kPhrase);
  EXPECT_EQ(classify_format("The majestic presence of a volcano surrounded by "
                            "lush vegetation and shrouded in clouds"),
            QueryFormat::kSentence);
}

TEST(ClassifyFormat, Heuristics) {
  EXPECT_EQ(classify_format("A chef is slicing onions on a wooden board."),
            QueryFormat::kSentence);
  // Long but verbless and unpunctuated: still a phrase.
  EXPECT_EQ(classify_format("an old red barn beside a quiet river under grey skies"),
            QueryFormat::kPhrase);
  EXPECT_EQ(classify_format("dog is barking"), QueryFormat::kPhrase);
  FormatThresholds t;
  t.keyword_max_words = 2;
  EXPECT_EQ(classify_format("coffee making process", t), QueryFormat::kPhrase);
  EXPECT_THROW(classify_format(""), InvalidArgumentError);
  EXPECT_THROW(classify_format(" ... "), InvalidArgumentError);
}

TEST(Pipeline, EmptyInput) {
  const FilterReport r = pipeline({});
  EXPECT_TRUE(r.kept.empty());
  EXPECT_TRUE(r.dropped.empty());
}

TEST(Pipeline, FirstFailingRuleWins) {
  const std::vector<CandidateQuery> in = {
      cq("The video concludes here", spaced(12, 2.0), 0.5)};
  const FilterReport r = pipeline(in);
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0].reason, DropReason::kLowConfidence);
  const std::vector<CandidateQuery> general = {
      cq("The video concludes here", spaced(12, 2.0), 0.95)};
  EXPECT_EQ(pipeline(general).dropped[0].reason, DropReason::kTooGeneral);
}

TEST(Pipeline, EmptyRangesAreReported) {
  const std::vector<CandidateQuery> in = {cq("q", {})};
  EXPECT_EQ(pipeline(in).dropped.at(0).reason, DropReason::kEmptyAfterMerge);
}

TEST(Pipeline, AllPassingKeepsMergedRanges) {
  const std::vector<CandidateQuery> in = {cq("a man riding a bike", {{0, 5}, {5.3, 9}}),
                                          cq("washing machine", {{20, 30}}, 0.95)};
  const FilterReport r = pipeline(in);
  ASSERT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.kept[0].ranges, (std::vector<TimeRange>{{0, 9}}));
  EXPECT_EQ(r.kept[1].query_text, "washing machine");
}

TEST(Pipeline, MergingHappensBeforeCounting) {
  const std::vector<CandidateQuery> in = {cq("clapping", spaced(12, 0.2))};
  const FilterReport r = pipeline(in);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].ranges.size(), 1u);
}

std::vector<CandidateQuery> random_candidates(std::mt19937_64& rng, int n) {
  const std::vector<std::string> texts = {"love", "The video concludes with applause",
                                          "a man riding a bike", "In the closing moments, rain",
                                          "coffee making process"};
  std::vector<CandidateQuery> out;
  for (int i = 0; i < n; ++i) {
    std::vector<TimeRange> ranges;
    const int k = 1 + static_cast<int>(rng() % 15);
    double t = 0;
    for (int j = 0; j < k; ++j) {
      t += static_cast<double>(rng() % 20) / 10.0;
      const double len = 0.1 + static_cast<double>(rng() % 30) / 10.0;
      ranges.push_back({t, t + len});
      t += len;
    }
    out.push_back(cq(texts[rng() % texts.size()], ranges,
                     static_cast<double>(80 + rng() % 21) / 100.0));
  }
  return out;
}

TEST(Pipeline, PartitionIdempotenceAndMonotonicity) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_candidates(rng, 20);
    const FilterReport r = pipeline(in);
    ASSERT_EQ(r.kept.size() + r.dropped.size(), in.size());
    // Dropped entries are the inputs as received; kept ones keep text and
    // confidence and merge ranges.
    std::multiset<std::pair<std::string, double>> a, b;
    for (const auto& q : in) a.insert({q.query_text, q.confidence});
    for (const auto& q : r.kept) b.insert({q.query_text, q.confidence});
    for (const auto& d : r.dropped) b.insert({d.query.query_text, d.query.confidence});
    EXPECT_EQ(a, b);

    const FilterReport again = pipeline(r.kept);
    EXPECT_TRUE(again.dropped.empty());
    ASSERT_EQ(again.kept.size(), r.kept.size());
    for (std::size_t i = 0; i < r.kept.size(); ++i) {
      EXPECT_EQ(again.kept[i].ranges, r.kept[i].ranges);
    }

    FilterConfig tight;
    tight.min_confidence = 0.95;
    tight.max_ranges = 5;
    EXPECT_LE(pipeline(in, tight).kept.size(), r.kept.size());
  }
}

TEST(Names, Sources) {
  EXPECT_EQ(parse_candidate_source("subtitle"), CandidateSource::kSubtitle);
  EXPECT_THROW(parse_candidate_source("radio"), SchemaError);
  EXPECT_EQ(to_string(DropReason::kMachineStyle), "machine_style");
}

}  // namespace
}  // namespace trkit::postproc
