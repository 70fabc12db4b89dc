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

// Python bindings. Ranges cross the boundary as lists of (start, end)
// tuples; record files cross as JSONL text.

#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trkit/cli.hpp"
#include "trkit/dattn.hpp"
#include "trkit/error.hpp"
#include "trkit/intervals.hpp"
#include "trkit/io.hpp"
#include "trkit/metrics.hpp"
#include "trkit/parsers.hpp"
#include "trkit/postproc.hpp"
#include "trkit/synthgen.hpp"

namespace py = pybind11;

namespace {

using trkit::RangeSet;
using trkit::TimeRange;
using Pairs = std::vector<std::pair<double, double>>;

RangeSet to_set(const Pairs& pairs, double gap = 0.0) {
  std::vector<TimeRange> r;
  r.reserve(pairs.size());
  for (const auto& [s, e] : pairs) r.push_back({s, e});
  return RangeSet::normalize(r, gap);
}

Pairs to_pairs(const RangeSet& set) {
  Pairs out;
  for (const TimeRange& r : set) out.emplace_back(r.start_s, r.end_s);
  return out;
}

trkit::Metric parse_metric(const std::string& name) {
  if (name == "precision") return trkit::Metric::kPrecision;
  if (name == "recall") return trkit::Metric::kRecall;
  if (name == "iou") return trkit::Metric::kIou;
  throw trkit::InvalidArgumentError("unknown metric '" + name + "'");
}

std::string evaluate_jsonl(const std::string& gt_text, const std::string& pred_text,
                           std::size_t grid_n) {
  const auto gt = trkit::io::parse_ground_truth(gt_text, "ground_truth");
  const auto preds = trkit::io::parse_predictions(pred_text, "predictions");
  const auto resolved = trkit::io::resolve_predictions(preds, gt);
  const auto evaluated = trkit::evaluate(gt, resolved.ranges);
  return trkit::io::report_json(trkit::report(evaluated, grid_n), evaluated);
}

std::pair<std::string, std::string> postprocess_jsonl(
    const std::string& candidates, double gap, double min_confidence,
    std::size_t max_ranges, std::optional<std::vector<std::string>> blocklist) {
  trkit::postproc::FilterConfig c;
  c.merge_gap_s = gap;
  c.min_confidence = min_confidence;
  c.max_ranges = max_ranges;
  if (blocklist) c.blocklist = *blocklist;
  const auto parsed = trkit::io::parse_candidates(candidates, "candidates");
  const auto r = trkit::postproc::pipeline(parsed, c);
  return {trkit::io::candidates_jsonl(r.kept), trkit::io::dropped_jsonl(r.dropped)};
}

std::pair<std::string, std::string> synth_jsonl(const std::string& corpus,
                                                const std::string& modality,
                                                std::uint64_t seed, double fps) {
  trkit::synth::SyntheticManifest m;
  if (modality == "visual") {
    m = trkit::synth::assemble_visual(trkit::io::parse_visual_corpus(corpus, "corpus"),
                                      seed, fps);
  } else if (modality == "audio") {
    m = trkit::synth::splice_audio(trkit::io::parse_audio_corpus(corpus, "corpus"), seed);
  } else {
    throw trkit::InvalidArgumentError("modality must be 'visual' or 'audio'");
  }
  return {trkit::io::manifest_json(m),
          trkit::io::examples_jsonl(trkit::synth::emit_tasks(m))};
}

}  // namespace

PYBIND11_MODULE(_trkit, m) {
  m.doc() = "Temporal retrieval evaluation toolkit";

  auto base = py::register_exception<trkit::Error>(m, "TrkitError");
  py::register_exception<trkit::InvalidArgumentError>(m, "InvalidArgumentError", base.ptr());
  py::register_exception<trkit::InvalidRangeError>(m, "InvalidRangeError", base.ptr());
  py::register_exception<trkit::SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<trkit::ParseError>(m, "ParseError", base.ptr());
  py::register_exception<trkit::NumericError>(m, "NumericError", base.ptr());
  py::register_exception<trkit::IoError>(m, "IoError", base.ptr());

  py::class_<trkit::SampleScores>(m, "SampleScores")
      .def(py::init([](double p, double r, double iou) {
             return trkit::SampleScores{p, r, iou, false};
           }),
           py::arg("precision"), py::arg("recall"), py::arg("iou"))
      .def_readonly("precision", &trkit::SampleScores::precision)
      .def_readonly("recall", &trkit::SampleScores::recall)
      .def_readonly("iou", &trkit::SampleScores::iou)
      .def_readonly("degenerate", &trkit::SampleScores::degenerate)
      .def("__repr__", [](const trkit::SampleScores& s) {
        std::ostringstream o;
        o << "SampleScores(precision=" << s.precision << ", recall=" << s.recall
          << ", iou=" << s.iou << ")";
        return o.str();
      });

  m.def("normalize", [](const Pairs& r, double gap) { return to_pairs(to_set(r, gap)); },
        py::arg("ranges"), py::arg("merge_gap") = 0.0);
  m.def("intersect", [](const Pairs& a, const Pairs& b) {
    return to_pairs(trkit::intersect(to_set(a), to_set(b)));
  });
  m.def("unite", [](const Pairs& a, const Pairs& b) {
    return to_pairs(trkit::unite(to_set(a), to_set(b)));
  });
  m.def("measure", [](const Pairs& r) { return to_set(r).measure(); });
  m.def("score", [](const Pairs& pred, const Pairs& gt) {
    return trkit::score(to_set(pred), to_set(gt));
  }, py::arg("pred"), py::arg("gt"));

  m.def("bucket", [](double d) { return std::string(trkit::to_string(trkit::bucket(d).name)); });
  m.def("curve",
        [](const std::vector<trkit::SampleScores>& s, const std::string& metric,
           std::size_t grid_n) {
          std::vector<std::pair<double, double>> out;
          for (const auto& p : trkit::curve(s, parse_metric(metric), grid_n)) {
            out.emplace_back(p.threshold, p.accuracy);
          }
          return out;
        },
        py::arg("scores"), py::arg("metric") = "iou", py::arg("grid_n") = trkit::kDefaultGridN);
  m.def("auc",
        [](const std::vector<trkit::SampleScores>& s, const std::string& metric,
           std::size_t grid_n) { return trkit::auc(trkit::curve(s, parse_metric(metric), grid_n)); },
        py::arg("scores"), py::arg("metric") = "iou", py::arg("grid_n") = trkit::kDefaultGridN);
  m.def("evaluate_jsonl", &evaluate_jsonl, py::arg("ground_truth"), py::arg("predictions"),
        py::arg("grid_n") = trkit::kDefaultGridN);

  m.def("parse_timestamps",
        [](const std::string& text, std::optional<double> duration) {
          const auto o = trkit::parse_timestamps(text, duration);
          return std::make_pair(to_pairs(o.ranges), o.warnings);
        },
        py::arg("text"), py::arg("duration") = py::none());
  m.def("parse_frame_ranges", [](const std::string& text) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& f : trkit::parse_frame_ranges(text)) out.emplace_back(f.first, f.last);
    return out;
  });
  m.def("frames_to_time",
        [](const std::vector<std::pair<std::int64_t, std::int64_t>>& frames, double fps,
           const std::string& sampling, std::optional<std::int64_t> n_frames,
           std::optional<double> duration, int index_base, bool stride_coverage) {
          std::vector<trkit::FrameRange> f;
          for (const auto& [a, b] : frames) f.push_back({a, b});
          trkit::FrameMapping mp;
          if (sampling == "uniform") {
            mp.sampling = trkit::FrameSampling::kUniform;
          } else if (sampling != "dense") {
            throw trkit::InvalidArgumentError("sampling must be 'dense' or 'uniform'");
          }
          mp.fps = fps;
          mp.n_frames = n_frames;
          mp.video_duration_s = duration;
          mp.index_base = index_base;
          mp.stride_coverage = stride_coverage;
          return to_pairs(trkit::frames_to_time(f, mp));
        },
        py::arg("frames"), py::arg("fps") = 1.0, py::arg("sampling") = "dense",
        py::arg("n_frames") = py::none(), py::arg("duration") = py::none(),
        py::arg("index_base") = 0, py::arg("stride_coverage") = true);

  m.def("alpha_weights", [](double s_v, double s_t) {
    const auto a = trkit::dattn::alpha_weights(s_v, s_t);
    return std::make_pair(a.alpha_v, a.alpha_t);
  });
  m.def("log_sum_exp", [](const std::vector<double>& x) { return trkit::dattn::log_sum_exp(x); });

  m.def("classify_format", [](const std::string& text) {
    return std::string(trkit::to_string(trkit::postproc::classify_format(text)));
  });
  m.def("postprocess_jsonl", &postprocess_jsonl, py::arg("candidates"),
        py::arg("merge_gap") = 0.5, py::arg("min_confidence") = 0.9,
        py::arg("max_ranges") = 10, py::arg("blocklist") = py::none());
  m.def("synth_jsonl", &synth_jsonl, py::arg("corpus"), py::arg("modality") = "visual",
        py::arg("seed") = 0, py::arg("fps") = 1.0);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = trkit::run_cli(args, out, err);
    }
    return std::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
