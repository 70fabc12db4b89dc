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

// Checked-in parser corpus: expected outputs for model answer strings.

#ifndef TRKIT_TESTS_CORPUS_HPP_
#define TRKIT_TESTS_CORPUS_HPP_

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "trkit/error.hpp"
#include "trkit/parsers.hpp"

namespace trkit::testing {

struct CorpusCase {
  std::size_t line = 0;
  nlohmann::json spec;
};

inline std::vector<CorpusCase> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<CorpusCase> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    out.push_back({n, nlohmann::json::parse(line)});
  }
  return out;
}

inline std::vector<TimeRange> json_ranges(const nlohmann::json& j) {
  std::vector<TimeRange> out;
  for (const auto& p : j) out.push_back({p[0].get<double>(), p[1].get<double>()});
  return out;
}

// Empty result on match, otherwise a description of the mismatch.
inline std::optional<std::string> run_corpus_case(const CorpusCase& c) {
  const auto& s = c.spec;
  const std::string text = s["text"].get<std::string>();
  const bool expect_error = s.value("error", false);
  const auto where = fmt::format("line {} '{}'", c.line, text);
  std::optional<double> duration;
  if (s.contains("duration_s")) duration = s["duration_s"].get<double>();
  try {
    if (s["kind"] == "frames") {
      const auto frames = parse_frame_ranges(text);
      if (expect_error) return where + ": expected a parse error";
      std::vector<FrameRange> want;
      for (const auto& p : s["frames"]) {
        want.push_back({p[0].get<std::int64_t>(), p[1].get<std::int64_t>()});
      }
      if (frames != want) return where + ": frame ranges differ";
      FrameMapping m;
      m.fps = s.value("fps", 1.0);
      m.sampling = s.value("mode", std::string("dense")) == "uniform"
                       ? FrameSampling::kUniform
                       : FrameSampling::kDense;
      if (s.contains("n_frames")) m.n_frames = s["n_frames"].get<std::int64_t>();
      m.video_duration_s = duration;
      const RangeSet got = frames_to_time(frames, m);
      const RangeSet expect = RangeSet::normalize(json_ranges(s["ranges"]));
      if (got != expect) {
        return fmt::format("{}: got {} want {}", where, got.to_string(),
                           expect.to_string());
      }
      return std::nullopt;
    }
    const ParseOutcome o = parse_timestamps(text, duration);
    if (expect_error) return where + ": expected a parse error";
    const RangeSet expect = RangeSet::normalize(json_ranges(s["ranges"]));
    if (o.ranges != expect) {
      return fmt::format("{}: got {} want {}", where, o.ranges.to_string(),
                         expect.to_string());
    }
    if (o.warnings.empty() == s["warns"].get<bool>()) {
      return fmt::format("{}: expected {} warnings, got {}", where,
                         s["warns"].get<bool>() ? "some" : "no",
                         o.warnings.size());
    }
    return std::nullopt;
  } catch (const ParseError&) {
    if (expect_error) return std::nullopt;
    return where + ": unexpected parse error";
  }
}

}  // namespace trkit::testing

#endif  // TRKIT_TESTS_CORPUS_HPP_
