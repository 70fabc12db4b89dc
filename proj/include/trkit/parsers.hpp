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

// Extraction of time ranges from free-form model output: frame-index lists
// ("2-4, 6-8") and clock / seconds ranges embedded in prose.

#ifndef TRKIT_PARSERS_HPP_
#define TRKIT_PARSERS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trkit/intervals.hpp"

namespace trkit {

struct FrameRange {
  std::int64_t first = 0;
  std::int64_t last = 0;

  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

// Extracts every `a-b` integer pair (also `a to b`, `a~b`, en/em dash) and
// every standalone integer `a` (as a-a), in order of appearance. Numbers
// with a decimal point are not frame indices and are skipped. Reversed
// pairs are swapped. Throws ParseError when nothing is found.
std::vector<FrameRange> parse_frame_ranges(std::string_view text);

enum class FrameSampling {
  kDense,    // frame i sampled at i / fps
  kUniform,  // n_frames spread evenly over the whole video
};

struct FrameMapping {
  FrameSampling sampling = FrameSampling::kDense;
  double fps = 1.0;
  // Required for uniform sampling; bounds indices in either mode when set.
  std::optional<std::int64_t> n_frames;
  // Required for uniform sampling; clamps the result when set.
  std::optional<double> video_duration_s;
  // Index of the first frame as the model sees it (0 or 1).
  int index_base = 0;
  // A frame covers one sampling stride; otherwise it is an instant and a
  // range spans first..last sample times only.
  bool stride_coverage = true;
};

// Throws InvalidArgumentError for unusable mappings and for indices outside
// [index_base, index_base + n_frames), listing every offending index.
RangeSet frames_to_time(std::span<const FrameRange> frames,
                        const FrameMapping& mapping);

struct ParseOutcome {
  RangeSet ranges;
  // Ignored fragments, swapped or clamped endpoints. Empty iff the whole
  // input was recognized.
  std::vector<std::string> warnings;
};

// Recognizes ranges whose endpoints are `ss`, `ss.fff`, `mm:ss` or
// `hh:mm:ss` (optionally followed by a seconds unit), joined by `-`, `–`,
// `—`, `~` or `to`. Ranges may be separated by `,`, `;` or newlines and may
// be embedded in prose. Endpoints past video_duration_s are clamped.
// Throws ParseError when no range can be extracted from non-empty text.
ParseOutcome parse_timestamps(std::string_view text,
                              std::optional<double> video_duration_s = {});

// Renders a set as "mm:ss-mm:ss, ..." with whole seconds (rounded).
std::string format_clock_ranges(const RangeSet& ranges);

}  // namespace trkit

#endif  // TRKIT_PARSERS_HPP_
