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

#include "trkit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "trkit/error.hpp"
#include "trkit/rng.hpp"

namespace trkit::synth {

std::string_view to_string(Corner c) {
  switch (c) {
    case Corner::kTopLeft: return "top_left";
    case Corner::kTopRight: return "top_right";
    case Corner::kBottomLeft: return "bottom_left";
    case Corner::kBottomRight: return "bottom_right";
  }
  return "unknown";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::kLeft: return "left";
    case Direction::kRight: return "right";
    case Direction::kUp: return "up";
    case Direction::kDown: return "down";
  }
  return "unknown";
}

std::string_view to_string(SynthModality m) {
  return m == SynthModality::kVisual ? "visual" : "audio";
}

std::string_view to_string(Objective o) {
  return o == Objective::kCaptionPrediction ? "caption_prediction"
                                            : "timestamp_localization";
}

CropSchedule plan_sliding_window(std::int64_t image_w, std::int64_t image_h,
                                 const SlidingWindowParams& params, double fps,
                                 std::string source_image_id) {
  if (image_w <= 0 || image_h <= 0) {
    throw InvalidArgumentError(
        fmt::format("image size {}x{} must be positive", image_w, image_h));
  }
  if (params.window_w <= 0 || params.window_h <= 0 ||
      params.window_w > image_w || params.window_h > image_h) {
    throw InvalidArgumentError(
        fmt::format("window {}x{} does not fit image {}x{}", params.window_w,
                    params.window_h, image_w, image_h));
  }
  if (params.speed_px_per_frame < 0) {
    throw InvalidArgumentError("sliding speed must be non-negative");
  }
  if (!(params.duration_s > 0.0) || !std::isfinite(params.duration_s)) {
    throw InvalidArgumentError("segment duration must be positive");
  }
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw InvalidArgumentError("fps must be positive");
  }

  const std::int64_t max_x = image_w - params.window_w;
  const std::int64_t max_y = image_h - params.window_h;
  const bool right = params.start_corner == Corner::kTopRight ||
                     params.start_corner == Corner::kBottomRight;
  const bool bottom = params.start_corner == Corner::kBottomLeft ||
                      params.start_corner == Corner::kBottomRight;
  std::int64_t x = right ? max_x : 0;
  std::int64_t y = bottom ? max_y : 0;

  CropSchedule out;
  out.source_image_id = std::move(source_image_id);
  out.image_w = image_w;
  out.image_h = image_h;
  out.fps = fps;
  out.params = params;
  const auto n = static_cast<std::size_t>(std::ceil(params.duration_s * fps));
  out.rects.reserve(n);
  const std::int64_t v = params.speed_px_per_frame;
  for (std::size_t i = 0; i < n; ++i) {
    out.rects.push_back({x, y, params.window_w, params.window_h});
    switch (params.direction) {
      case Direction::kRight: x = std::min(x + v, max_x); break;
      case Direction::kLeft: x = std::max(x - v, std::int64_t{0}); break;
      case Direction::kDown: y = std::min(y + v, max_y); break;
      case Direction::kUp: y = std::max(y - v, std::int64_t{0}); break;
    }
  }
  return out;
}

namespace {

// Segment lengths are kept as whole tenths of a second.
std::int64_t to_tenths(double seconds) {
  if (!(seconds > 0.0) || !std::isfinite(seconds)) {
    throw InvalidArgumentError(
        fmt::format("segment length must be positive, got {}", seconds));
  }
  return std::max<std::int64_t>(1, std::llround(seconds * 10.0));
}

double from_tenths(std::int64_t tenths) {
  return static_cast<double>(tenths) / 10.0;
}

}  // namespace

SyntheticManifest splice_audio(std::span<const AudioClip> clips,
                               std::uint64_t seed) {
  if (clips.empty()) throw InvalidArgumentError("no audio clips to splice");
  std::vector<std::int64_t> tenths;
  tenths.reserve(clips.size());
  for (const AudioClip& c : clips) tenths.push_back(to_tenths(c.length_s));

  std::vector<std::size_t> order(clips.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SeededRng rng(seed);
  rng.shuffle(order);

  SyntheticManifest m;
  m.seed = seed;
  m.active = SynthModality::kAudio;
  std::int64_t cursor = 0;
  for (std::size_t k : order) {
    const AudioClip& c = clips[k];
    m.segments.push_back({SynthModality::kAudio, c.clip_id, c.caption,
                          from_tenths(cursor),
                          from_tenths(cursor + tenths[k])});
    cursor += tenths[k];
  }
  m.total_duration_s = from_tenths(cursor);
  return m;
}

SyntheticManifest assemble_visual(std::span<const VisualItem> items,
                                  std::uint64_t seed, double fps,
                                  const WindowRanges& ranges) {
  if (items.empty()) throw InvalidArgumentError("no images to assemble");
  if (!(ranges.min_window_frac > 0.0) ||
      ranges.min_window_frac > ranges.max_window_frac ||
      ranges.max_window_frac > 1.0 || ranges.max_speed_frac < 0.0 ||
      !(ranges.min_segment_s > 0.0) ||
      ranges.min_segment_s > ranges.max_segment_s) {
    throw InvalidArgumentError("invalid sliding-window parameter ranges");
  }
  SeededRng rng(seed);
  SyntheticManifest m;
  m.seed = seed;
  m.active = SynthModality::kVisual;
  m.fps = fps;
  std::int64_t cursor = 0;
  for (const VisualItem& item : items) {
    const std::int64_t shorter = std::min(item.image_w, item.image_h);
    if (shorter <= 0) {
      throw InvalidArgumentError(
          fmt::format("image '{}' has no pixels", item.image_id));
    }
    // Draw order is part of the determinism contract.
    const auto lo_side = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(ranges.min_window_frac *
                                               static_cast<double>(shorter))));
    const auto hi_side = std::max<std::int64_t>(
        lo_side, static_cast<std::int64_t>(std::floor(
                     ranges.max_window_frac * static_cast<double>(shorter))));
    const std::int64_t side = rng.uniform_int(lo_side, hi_side);
    const auto corner = static_cast<Corner>(rng.uniform_int(0, 3));
    const auto direction = static_cast<Direction>(rng.uniform_int(0, 3));
    const bool horizontal =
        direction == Direction::kLeft || direction == Direction::kRight;
    const auto extent =
        static_cast<double>(horizontal ? item.image_w : item.image_h);
    const auto max_speed =
        static_cast<std::int64_t>(std::floor(ranges.max_speed_frac * extent));
    const std::int64_t speed = rng.uniform_int(0, max_speed);
    const std::int64_t drawn_tenths =
        rng.uniform_int(to_tenths(ranges.min_segment_s),
                        to_tenths(ranges.max_segment_s));
    const std::int64_t tenths =
        item.duration_s ? to_tenths(*item.duration_s) : drawn_tenths;

    SlidingWindowParams p;
    p.window_w = side;
    p.window_h = side;
    p.start_corner = corner;
    p.direction = direction;
    p.speed_px_per_frame = speed;
    p.duration_s = from_tenths(tenths);
    m.crops.push_back(
        plan_sliding_window(item.image_w, item.image_h, p, fps, item.image_id));
    m.segments.push_back({SynthModality::kVisual, item.image_id, item.caption,
                          from_tenths(cursor), from_tenths(cursor + tenths)});
    cursor += tenths;
  }
  m.total_duration_s = from_tenths(cursor);
  return m;
}

std::string format_range(double start_s, double end_s) {
  return fmt::format("{:.1f}-{:.1f}", start_s, end_s);
}

std::vector<TrainingExample> emit_tasks(const SyntheticManifest& manifest) {
  std::vector<TrainingExample> out;
  out.reserve(2 * manifest.segments.size());
  for (const ManifestSegment& s : manifest.segments) {
    const std::string medium =
        s.modality == SynthModality::kVisual ? "video" : "audio";
    const std::string range = format_range(s.start_s, s.end_s);
    out.push_back({Objective::kCaptionPrediction,
                   fmt::format("Describe the {} content from {} seconds.",
                               medium, range),
                   s.caption});
    out.push_back(
        {Objective::kTimestampLocalization,
         fmt::format("Give the time range in seconds where the {} contains: "
                     "\"{}\"",
                     medium, s.caption),
         range});
  }
  return out;
}

}  // namespace trkit::synth
