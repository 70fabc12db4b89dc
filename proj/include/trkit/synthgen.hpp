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

// Seeded planner for synthetic timestamp supervision: sliding-window crop
// schedules that turn still images into video segments, spliced audio
// tracks, and the paired caption / timestamp training examples.
//
// The planner emits geometry and timelines only; no pixels or samples are
// touched. Segment boundaries live on a 0.1 s grid so that the one-decimal
// timestamps in prompts and targets are exact.

#ifndef TRKIT_SYNTHGEN_HPP_
#define TRKIT_SYNTHGEN_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trkit::synth {

enum class Corner { kTopLeft, kTopRight, kBottomLeft, kBottomRight };
enum class Direction { kLeft, kRight, kUp, kDown };

std::string_view to_string(Corner c);
std::string_view to_string(Direction d);

struct SlidingWindowParams {
  std::int64_t window_w = 0;
  std::int64_t window_h = 0;
  Corner start_corner = Corner::kTopLeft;
  Direction direction = Direction::kRight;
  std::int64_t speed_px_per_frame = 0;
  double duration_s = 0.0;
};

struct CropRect {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t w = 0;
  std::int64_t h = 0;

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

struct CropSchedule {
  std::string source_image_id;
  std::int64_t image_w = 0;
  std::int64_t image_h = 0;
  double fps = 1.0;
  SlidingWindowParams params;
  std::vector<CropRect> rects;  // one per frame
};

// ceil(duration_s * fps) rects; the window advances by the speed each
// frame and stops at the image border. Throws InvalidArgumentError when the
// window does not fit or a parameter is out of range.
CropSchedule plan_sliding_window(std::int64_t image_w, std::int64_t image_h,
                                 const SlidingWindowParams& params, double fps,
                                 std::string source_image_id = {});

enum class SynthModality { kVisual, kAudio };

std::string_view to_string(SynthModality m);

struct ManifestSegment {
  SynthModality modality = SynthModality::kVisual;
  std::string source_id;
  std::string caption;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct SyntheticManifest {
  std::uint64_t seed = 0;
  SynthModality active = SynthModality::kVisual;
  double fps = 1.0;
  double total_duration_s = 0.0;
  std::vector<ManifestSegment> segments;
  // Visual manifests only; parallel to `segments`.
  std::vector<CropSchedule> crops;

  SynthModality padded() const {
    return active == SynthModality::kVisual ? SynthModality::kAudio
                                            : SynthModality::kVisual;
  }
};

struct AudioClip {
  std::string clip_id;
  double length_s = 0.0;
  std::string caption;
};

// Lays the clips end to end in a seeded random order. Lengths are rounded
// to the 0.1 s grid (minimum 0.1 s).
SyntheticManifest splice_audio(std::span<const AudioClip> clips,
                               std::uint64_t seed);

struct VisualItem {
  std::string image_id;
  std::string caption;
  std::int64_t image_w = 1920;
  std::int64_t image_h = 1080;
  // Drawn from [min_segment_s, max_segment_s] when absent.
  std::optional<double> duration_s;
};

// Ranges the per-image sliding-window parameters are drawn from.
struct WindowRanges {
  double min_window_frac = 0.25;  // of the shorter image side
  double max_window_frac = 0.75;
  double max_speed_frac = 0.05;   // of the image extent along the motion
  double min_segment_s = 5.0;
  double max_segment_s = 30.0;
};

SyntheticManifest assemble_visual(std::span<const VisualItem> items,
                                  std::uint64_t seed, double fps,
                                  const WindowRanges& ranges = {});

enum class Objective { kCaptionPrediction, kTimestampLocalization };

std::string_view to_string(Objective o);

struct TrainingExample {
  Objective objective = Objective::kCaptionPrediction;
  std::string prompt;
  std::string target;
};

// "12.5-20.0"
std::string format_range(double start_s, double end_s);

// Two examples per segment, caption prediction first.
std::vector<TrainingExample> emit_tasks(const SyntheticManifest& manifest);

}  // namespace trkit::synth

#endif  // TRKIT_SYNTHGEN_HPP_
