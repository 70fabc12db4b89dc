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

// Exact set arithmetic over multi-span time ranges, and the per-sample
// precision / recall / IoU triple computed from it.
//
// A RangeSet is always canonical: sorted by start, strictly disjoint
// (a.end_s < b.start_s for neighbours). Zero-width ranges are allowed and
// contribute nothing to measures.

#ifndef TRKIT_INTERVALS_HPP_
#define TRKIT_INTERVALS_HPP_

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace trkit {

struct TimeRange {
  double start_s = 0.0;
  double end_s = 0.0;

  double length() const { return end_s - start_s; }

  friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

class RangeSet {
 public:
  RangeSet() = default;

  // Sorts, validates and merges `ranges`. Two ranges are merged iff the gap
  // between them is <= merge_gap_s (overlaps have negative gap).
  // Throws InvalidRangeError naming the first offending index.
  static RangeSet normalize(std::span<const TimeRange> ranges,
                            double merge_gap_s = 0.0);
  static RangeSet normalize(std::initializer_list<TimeRange> ranges,
                            double merge_gap_s = 0.0) {
    return normalize(std::span<const TimeRange>(ranges.begin(), ranges.size()),
                     merge_gap_s);
  }

  const std::vector<TimeRange>& ranges() const { return ranges_; }
  std::size_t size() const { return ranges_.size(); }
  bool empty() const { return ranges_.empty(); }
  auto begin() const { return ranges_.begin(); }
  auto end() const { return ranges_.end(); }

  // Total covered length in seconds.
  double measure() const;

  std::string to_string() const;

  friend bool operator==(const RangeSet&, const RangeSet&) = default;

 private:
  explicit RangeSet(std::vector<TimeRange> canonical)
      : ranges_(std::move(canonical)) {}

  friend RangeSet intersect(const RangeSet& a, const RangeSet& b);

  std::vector<TimeRange> ranges_;
};

// Pointwise intersection. Pieces where two positive-width ranges merely
// touch are dropped.
RangeSet intersect(const RangeSet& a, const RangeSet& b);

// Pointwise union, re-normalized with a zero merge gap.
RangeSet unite(const RangeSet& a, const RangeSet& b);

struct SampleScores {
  double precision = 0.0;
  double recall = 0.0;
  double iou = 0.0;
  // Both sides have zero measure; the triple is a convention, not a ratio.
  bool degenerate = false;

  friend bool operator==(const SampleScores&, const SampleScores&) = default;
};

// Precision, recall and IoU of `pred` against `gt`:
//   P = |pred ∩ gt| / |pred|,  R = |pred ∩ gt| / |gt|,  IoU = |∩| / |∪|.
// Zero-measure sides: equal sets score 1, anything else scores 0.
SampleScores score(const RangeSet& pred, const RangeSet& gt);

}  // namespace trkit

#endif  // TRKIT_INTERVALS_HPP_
