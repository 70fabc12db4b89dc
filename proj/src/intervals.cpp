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

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "trkit/error.hpp"

namespace trkit {

RangeSet RangeSet::normalize(std::span<const TimeRange> ranges,
                             double merge_gap_s) {
  if (!(merge_gap_s >= 0.0)) {
    throw InvalidArgumentError(
        fmt::format("merge gap must be non-negative, got {}", merge_gap_s));
  }
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const TimeRange& r = ranges[i];
    if (!std::isfinite(r.start_s) || !std::isfinite(r.end_s)) {
      throw InvalidRangeError(
          i, fmt::format("range {} has a non-finite endpoint", i));
    }
    if (r.start_s < 0.0) {
      throw InvalidRangeError(
          i, fmt::format("range {} starts before 0 ({})", i, r.start_s));
    }
    if (r.start_s > r.end_s) {
      throw InvalidRangeError(
          i, fmt::format("range {} is reversed ([{}, {}])", i, r.start_s,
                         r.end_s));
    }
  }

  std::vector<TimeRange> sorted(ranges.begin(), ranges.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const TimeRange& a, const TimeRange& b) {
              return a.start_s < b.start_s ||
                     (a.start_s == b.start_s && a.end_s < b.end_s);
            });

  std::vector<TimeRange> out;
  out.reserve(sorted.size());
  for (const TimeRange& r : sorted) {
    if (!out.empty() && r.start_s - out.back().end_s <= merge_gap_s) {
      out.back().end_s = std::max(out.back().end_s, r.end_s);
    } else {
      out.push_back(r);
    }
  }
  return RangeSet(std::move(out));
}

double RangeSet::measure() const {
  double total = 0.0;
  for (const TimeRange& r : ranges_) total += r.length();
  return total;
}

std::string RangeSet::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    if (i > 0) s += ",";
    s += fmt::format("[{},{}]", ranges_[i].start_s, ranges_[i].end_s);
  }
  s += "]";
  return s;
}

RangeSet intersect(const RangeSet& a, const RangeSet& b) {
  std::vector<TimeRange> out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const TimeRange& x = a.ranges_[i];
    const TimeRange& y = b.ranges_[j];
    const double lo = std::max(x.start_s, y.start_s);
    const double hi = std::min(x.end_s, y.end_s);
    // A zero-width piece survives only if one of its sources is itself a
    // point; touching positive-width ranges share no measure.
    if (lo < hi || (lo == hi && (x.length() == 0.0 || y.length() == 0.0))) {
      out.push_back({lo, hi});
    }
    if (x.end_s < y.end_s) {
      ++i;
    } else if (y.end_s < x.end_s) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  // Pieces come from disjoint sources so they are already sorted and
  // disjoint; normalizing only guards the invariant.
  return RangeSet::normalize(out, 0.0);
}

RangeSet unite(const RangeSet& a, const RangeSet& b) {
  std::vector<TimeRange> all(a.ranges().begin(), a.ranges().end());
  all.insert(all.end(), b.ranges().begin(), b.ranges().end());
  return RangeSet::normalize(all, 0.0);
}

SampleScores score(const RangeSet& pred, const RangeSet& gt) {
  const double pred_measure = pred.measure();
  const double gt_measure = gt.measure();
  if (pred_measure == 0.0 || gt_measure == 0.0) {
    SampleScores s;
    s.degenerate = pred_measure == 0.0 && gt_measure == 0.0;
    if (s.degenerate && pred == gt) {
      s.precision = s.recall = s.iou = 1.0;
    }
    return s;
  }
  const double inter = intersect(pred, gt).measure();
  const double uni = unite(pred, gt).measure();
  return {inter / pred_measure, inter / gt_measure, inter / uni, false};
}

}  // namespace trkit
