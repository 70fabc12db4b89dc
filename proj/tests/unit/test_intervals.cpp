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

#include "trkit/intervals.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trkit/error.hpp"

namespace trkit {
namespace {

using testing::MsBitmap;
using testing::MsSpan;

RangeSet rs(std::initializer_list<TimeRange> r, double gap = 0.0) {
  return RangeSet::normalize(r, gap);
}

TEST(Normalize, SortsAndMergesOverlaps) {
  EXPECT_EQ(rs({{3, 5}, {1, 2}, {4.9, 6}}), rs({{1, 2}, {3, 6}}));
  EXPECT_EQ(rs({{3, 5}, {1, 2}, {4.9, 6}}).ranges(),
            (std::vector<TimeRange>{{1, 2}, {3, 6}}));
}

TEST(Normalize, EmptyInput) {
  EXPECT_TRUE(RangeSet::normalize(std::vector<TimeRange>{}, 0.5).empty());
}

TEST(Normalize, MergesWithinGap) {
  EXPECT_EQ(rs({{0, 1}, {1.4, 2}}, 0.5).ranges(),
            (std::vector<TimeRange>{{0, 2}}));
  EXPECT_EQ(rs({{0, 1}, {1.6, 2}}, 0.5).size(), 2u);
  // The gap bound is inclusive.
  EXPECT_EQ(rs({{0, 1}, {1.5, 2}}, 0.5).size(), 1u);
}

TEST(Normalize, TouchingRangesMergeAtZeroGap) {
  EXPECT_EQ(rs({{0, 1}, {1, 2}}).ranges(), (std::vector<TimeRange>{{0, 2}}));
}

TEST(Normalize, RejectsInvalidRangesNamingTheIndex) {
  const std::vector<TimeRange> bad = {{0, 1}, {5, 4}};
  try {
    (void)RangeSet::normalize(bad);
    FAIL() << "expected InvalidRangeError";
  } catch (const InvalidRangeError& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  const std::vector<TimeRange> negative = {{-1, 1}};
  EXPECT_THROW((void)RangeSet::normalize(negative), InvalidRangeError);
  const std::vector<TimeRange> nan = {{0, std::nan("")}};
  EXPECT_THROW((void)RangeSet::normalize(nan), InvalidRangeError);
}

TEST(Normalize, KeepsZeroWidthRangesWithZeroMeasure) {
  const RangeSet s = rs({{2, 2}, {5, 6}});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s.measure(), 1.0);
}

TEST(Normalize, IdempotentOnRandomInput) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto ranges = testing::to_ranges(testing::random_spans(rng, 20000, 8), true);
    for (double gap : {0.0, 0.5, 2.0}) {
      const RangeSet once = RangeSet::normalize(ranges, gap);
      EXPECT_EQ(RangeSet::normalize(once.ranges(), gap), once);
      for (std::size_t i = 1; i < once.size(); ++i) {
        EXPECT_LT(once.ranges()[i - 1].end_s, once.ranges()[i].start_s);
        EXPECT_GT(once.ranges()[i].start_s - once.ranges()[i - 1].end_s, gap);
      }
      EXPECT_GE(once.measure(), RangeSet::normalize(ranges, 0.0).measure());
    }
  }
}

TEST(Intersect, Examples) {
  EXPECT_EQ(intersect(rs({{10, 20}}), rs({{15, 25}})), rs({{15, 20}}));
  EXPECT_TRUE(intersect(rs({{0, 5}}), rs({{5, 10}})).empty());
  EXPECT_TRUE(intersect(rs({{0, 5}}), RangeSet{}).empty());
  const RangeSet x = rs({{1, 2}, {4, 8}, {9, 9}});
  EXPECT_EQ(intersect(x, x), x);
}

TEST(Unite, Examples) {
  EXPECT_EQ(unite(rs({{10, 20}}), rs({{15, 25}})), rs({{10, 25}}));
  const RangeSet x = rs({{1, 2}, {4, 8}});
  EXPECT_EQ(unite(x, RangeSet{}), x);
  EXPECT_EQ(unite(rs({{0, 1}}), rs({{2, 3}})).ranges(),
            (std::vector<TimeRange>{{0, 1}, {2, 3}}));
}

TEST(Score, Examples) {
  const RangeSet gt = rs({{10, 20}, {30, 40}});
  const SampleScores perfect = score(gt, gt);
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);
  EXPECT_EQ(perfect.iou, 1.0);
  EXPECT_FALSE(perfect.degenerate);

  const SampleScores half = score(rs({{15, 25}}), rs({{10, 20}}));
  EXPECT_DOUBLE_EQ(half.precision, 0.5);
  EXPECT_DOUBLE_EQ(half.recall, 0.5);
  EXPECT_DOUBLE_EQ(half.iou, 1.0 / 3.0);

  EXPECT_EQ(score(RangeSet{}, rs({{0, 10}})), SampleScores{});
  EXPECT_EQ(score(rs({{0, 10}}), RangeSet{}), SampleScores{});
}

TEST(Score, DegenerateBothEmpty) {
  const SampleScores s = score(RangeSet{}, RangeSet{});
  EXPECT_EQ(s.iou, 1.0);
  EXPECT_TRUE(s.degenerate);
}

// Millisecond units keep every quantity an exact integer, so the library
// must match the bitmap bit for bit.
TEST(OracleEquivalence, ExactInMillisecondUnits) {
  std::mt19937_64 rng(2024);
  constexpr std::int64_t kHorizon = 60000;
  for (int trial = 0; trial < 400; ++trial) {
    const auto ps = testing::random_spans(rng, kHorizon, 6);
    const auto gs = testing::random_spans(rng, kHorizon, 6);
    const RangeSet pred = RangeSet::normalize(testing::to_ranges(ps, false));
    const RangeSet gt = RangeSet::normalize(testing::to_ranges(gs, false));
    const MsBitmap bp = MsBitmap::of(ps, kHorizon);
    const MsBitmap bg = MsBitmap::of(gs, kHorizon);

    EXPECT_EQ(pred, RangeSet::normalize(testing::to_ranges(bp.runs(), false)));
    EXPECT_EQ(intersect(pred, gt),
              RangeSet::normalize(testing::to_ranges((bp & bg).runs(), false)));
    EXPECT_EQ(unite(pred, gt),
              RangeSet::normalize(testing::to_ranges((bp | bg).runs(), false)));

    const auto i = static_cast<double>((bp & bg).count());
    const auto u = static_cast<double>((bp | bg).count());
    const SampleScores s = score(pred, gt);
    EXPECT_EQ(s.precision, i / static_cast<double>(bp.count()));
    EXPECT_EQ(s.recall, i / static_cast<double>(bg.count()));
    EXPECT_EQ(s.iou, i / u);
  }
}

// Second-valued endpoints: set structure is exact, measures carry only
// subtraction rounding.
TEST(OracleEquivalence, SecondUnits) {
  std::mt19937_64 rng(7);
  constexpr std::int64_t kHorizon = 30000;
  for (int trial = 0; trial < 300; ++trial) {
    const auto ps = testing::random_spans(rng, kHorizon, 6);
    const auto gs = testing::random_spans(rng, kHorizon, 6);
    const RangeSet pred = RangeSet::normalize(testing::to_ranges(ps, true));
    const RangeSet gt = RangeSet::normalize(testing::to_ranges(gs, true));
    const MsBitmap bp = MsBitmap::of(ps, kHorizon);
    const MsBitmap bg = MsBitmap::of(gs, kHorizon);
    EXPECT_EQ(intersect(pred, gt),
              RangeSet::normalize(testing::to_ranges((bp & bg).runs(), true)));
    EXPECT_EQ(unite(pred, gt),
              RangeSet::normalize(testing::to_ranges((bp | bg).runs(), true)));
    const double i = static_cast<double>((bp & bg).count()) / 1000.0;
    EXPECT_NEAR(intersect(pred, gt).measure(), i, 1e-9);
    const SampleScores s = score(pred, gt);
    EXPECT_NEAR(s.iou, static_cast<double>((bp & bg).count()) /
                           static_cast<double>((bp | bg).count()), 1e-12);
  }
}

TEST(Properties, SymmetryBoundsAndMonotonicity) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const RangeSet a = RangeSet::normalize(
        testing::to_ranges(testing::random_spans(rng, 20000, 5), true));
    const RangeSet b = RangeSet::normalize(
        testing::to_ranges(testing::random_spans(rng, 20000, 5), true));
    EXPECT_EQ(intersect(a, b), intersect(b, a));
    EXPECT_EQ(unite(a, b), unite(b, a));
    EXPECT_EQ(score(a, b).iou, score(b, a).iou);

    const SampleScores s = score(a, b);
    EXPECT_GE(s.iou, 0.0);
    EXPECT_LE(s.iou, std::min(s.precision, s.recall) + 1e-15);
    EXPECT_LE(std::max(s.precision, s.recall), 1.0);
    EXPECT_LE(intersect(a, b).measure(), std::min(a.measure(), b.measure()));
    EXPECT_NEAR(unite(a, b).measure(),
                a.measure() + b.measure() - intersect(a, b).measure(), 1e-9);

    // Enlarging one predicted range never lowers recall.
    std::vector<TimeRange> grown = a.ranges();
    grown[0].end_s += 1.5;
    if (grown[0].start_s >= 1.0) grown[0].start_s -= 1.0;
    EXPECT_GE(score(RangeSet::normalize(grown), b).recall + 1e-12, s.recall);
  }
}

TEST(RangeSet, ToString) {
  EXPECT_EQ(rs({{1, 2.5}, {4, 5}}).to_string(), "[[1,2.5],[4,5]]");
  EXPECT_EQ(RangeSet{}.to_string(), "[]");
}

}  // namespace
}  // namespace trkit
