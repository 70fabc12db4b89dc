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

#include "trkit/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "trkit/dattn_check.hpp"
#include "trkit/error.hpp"
#include "trkit/io.hpp"
#include "trkit/parsers.hpp"
#include "trkit/rng.hpp"

namespace trkit {

namespace {

constexpr std::array<std::string_view, 3> kAxes = {"duration", "format",
                                                   "modality"};

std::string slice_of(const QueryRecord& q, std::string_view axis) {
  if (axis == "duration") {
    return std::string(to_string(bucket(q.video_duration_s).name));
  }
  if (axis == "format") return std::string(to_string(q.format));
  return std::string(to_string(q.modality));
}

struct EvalInputs {
  std::vector<QueryRecord> gt;
  std::vector<EvaluatedQuery> evaluated;
};

EvalInputs load_and_evaluate(const std::string& gt_path,
                             const std::string& pred_path,
                             std::ostream& err) {
  EvalInputs in;
  in.gt = io::parse_ground_truth(io::read_file(gt_path), gt_path);
  const auto preds = io::parse_predictions(io::read_file(pred_path), pred_path);
  const io::ResolvedPredictions resolved = io::resolve_predictions(preds, in.gt);
  for (const std::string& w : resolved.warnings) err << "warning: " << w << "\n";
  in.evaluated = evaluate(in.gt, resolved.ranges);
  for (const EvaluatedQuery& e : in.evaluated) {
    if (e.missing_prediction) {
      err << "warning: no prediction for '" << e.query.query_id
          << "', scored as empty\n";
    }
  }
  return in;
}

std::vector<SampleScores> scores_of(std::span<const EvaluatedQuery> evaluated) {
  std::vector<SampleScores> out;
  out.reserve(evaluated.size());
  for (const auto& e : evaluated) out.push_back(e.scores);
  return out;
}

struct EvaluateArgs {
  std::string gt;
  std::string pred;
  std::string out_dir = ".";
  std::size_t grid_n = kDefaultGridN;
  std::vector<std::string> axes = {"duration", "format", "modality"};
};

int run_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const EvalInputs in = load_and_evaluate(a.gt, a.pred, err);
  if (in.evaluated.empty()) throw SchemaError(a.gt + ": no queries");
  Report r = report(in.evaluated, a.grid_n);
  std::erase_if(r.rows, [&](const ReportRow& row) {
    return row.axis != "overall" &&
           std::find(a.axes.begin(), a.axes.end(), row.axis) == a.axes.end();
  });
  const std::filesystem::path dir(a.out_dir);
  const std::string md = report_markdown(r);
  io::write_file(dir / "report.json", io::report_json(r, in.evaluated));
  io::write_file(dir / "report.md", md);
  io::write_file(dir / "curves.csv",
                 io::curves_csv(scores_of(in.evaluated), a.grid_n));
  out << md;
  return kExitOk;
}

struct CurvesArgs {
  std::string gt;
  std::string pred;
  std::string out;
  std::size_t grid_n = kDefaultGridN;
  std::string axis;
  std::string slice;
};

int run_curves(const CurvesArgs& a, std::ostream& out, std::ostream& err) {
  if (a.axis.empty() != a.slice.empty()) {
    throw InvalidArgumentError("--axis and --slice must be given together");
  }
  const EvalInputs in = load_and_evaluate(a.gt, a.pred, err);
  std::vector<SampleScores> scores;
  for (const EvaluatedQuery& e : in.evaluated) {
    if (a.axis.empty() || slice_of(e.query, a.axis) == a.slice) {
      scores.push_back(e.scores);
    }
  }
  if (scores.empty()) {
    throw SchemaError(a.axis.empty()
                          ? std::string("no queries")
                          : fmt::format("slice {}={} has no queries", a.axis,
                                        a.slice));
  }
  const std::string csv = io::curves_csv(scores, a.grid_n);
  if (a.out.empty()) {
    out << csv;
  } else {
    io::write_file(a.out, csv);
  }
  return kExitOk;
}

struct ParseArgs {
  std::string in;
  std::string out;
  std::string kind = "timestamps";
  std::string mode = "dense";
  double fps = 1.0;
  std::optional<std::int64_t> n_frames;
  std::string duration_from;
  int index_base = 0;
  bool instant_frames = false;
};

int run_parse(const ParseArgs& a, std::ostream& out, std::ostream& err) {
  std::map<std::string, double> durations;
  if (!a.duration_from.empty()) {
    for (const QueryRecord& q : io::parse_ground_truth(
             io::read_file(a.duration_from), a.duration_from)) {
      durations.emplace(q.query_id, q.video_duration_s);
    }
  }
  const auto records = io::parse_predictions(io::read_file(a.in), a.in);
  FrameMapping mapping;
  mapping.sampling =
      a.mode == "uniform" ? FrameSampling::kUniform : FrameSampling::kDense;
  mapping.fps = a.fps;
  mapping.n_frames = a.n_frames;
  mapping.index_base = a.index_base;
  mapping.stride_coverage = !a.instant_frames;
  if (mapping.sampling == FrameSampling::kUniform && a.kind == "frames" &&
      (!a.n_frames || a.duration_from.empty())) {
    throw InvalidArgumentError(
        "uniform mode needs --n-frames and --duration-from");
  }

  std::string lines;
  std::size_t n_warned = 0;
  for (const io::PredictionRecord& p : records) {
    std::optional<double> duration;
    if (const auto it = durations.find(p.query_id); it != durations.end()) {
      duration = it->second;
    } else if (!durations.empty()) {
      throw SchemaError(fmt::format("{}:{}: query '{}' not in {}", a.in,
                                    p.line, p.query_id, a.duration_from));
    }
    RangeSet ranges;
    std::vector<std::string> warnings;
    if (p.ranges) {
      ranges = RangeSet::normalize(*p.ranges);
    } else if (a.kind == "frames") {
      try {
        FrameMapping m = mapping;
        m.video_duration_s = duration;
        ranges = frames_to_time(parse_frame_ranges(*p.raw_text), m);
      } catch (const ParseError& e) {
        warnings.emplace_back(e.what());
      } catch (const InvalidArgumentError& e) {
        warnings.emplace_back(e.what());
      }
    } else {
      try {
        ParseOutcome o = parse_timestamps(*p.raw_text, duration);
        ranges = std::move(o.ranges);
        warnings = std::move(o.warnings);
      } catch (const ParseError& e) {
        warnings.emplace_back(e.what());
      }
    }
    if (!warnings.empty()) ++n_warned;
    lines += io::prediction_line(p.query_id, ranges, warnings);
  }
  if (a.out.empty()) {
    out << lines;
  } else {
    io::write_file(a.out, lines);
  }
  err << fmt::format("parsed {} records, {} with warnings\n", records.size(),
                     n_warned);
  return kExitOk;
}

struct SynthArgs {
  std::string corpus;
  std::string out_dir = ".";
  std::string modality = "visual";
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;  // 0: whole corpus
  double fps = 1.0;
  std::optional<double> segment_duration_s;
  synth::WindowRanges ranges;
};

// Seeded draw of n distinct corpus entries, in draw order.
template <class T>
std::vector<T> sample(const std::vector<T>& corpus, std::size_t n,
                      std::uint64_t seed) {
  if (n == 0) n = corpus.size();
  if (n > corpus.size()) {
    throw InvalidArgumentError(fmt::format(
        "--n-samples {} exceeds corpus size {}", n, corpus.size()));
  }
  std::vector<std::size_t> idx(corpus.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  SeededRng rng(seed);
  rng.shuffle(idx);
  std::vector<T> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(corpus[idx[i]]);
  return out;
}

int run_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
  const std::string text = io::read_file(a.corpus);
  synth::SyntheticManifest manifest;
  if (a.modality == "audio") {
    const auto clips =
        sample(io::parse_audio_corpus(text, a.corpus), a.n_samples, a.seed);
    manifest = synth::splice_audio(clips, a.seed);
    manifest.fps = a.fps;
  } else {
    auto items =
        sample(io::parse_visual_corpus(text, a.corpus), a.n_samples, a.seed);
    if (a.segment_duration_s) {
      for (auto& item : items) item.duration_s = *a.segment_duration_s;
    }
    manifest = synth::assemble_visual(items, a.seed, a.fps, a.ranges);
  }
  const auto tasks = synth::emit_tasks(manifest);
  const std::filesystem::path dir(a.out_dir);
  io::write_file(dir / "manifest.json", io::manifest_json(manifest));
  io::write_file(dir / "tasks.jsonl", io::examples_jsonl(tasks));
  out << fmt::format("{} segments, {:.1f} s, {} training examples\n",
                     manifest.segments.size(), manifest.total_duration_s,
                     tasks.size());
  return kExitOk;
}

struct PostprocessArgs {
  std::string in;
  std::string out_dir = ".";
  std::string blocklist;
  postproc::FilterConfig config;
};

int run_postprocess(const PostprocessArgs& a, std::ostream& out,
                    std::ostream&) {
  postproc::FilterConfig config = a.config;
  if (!a.blocklist.empty()) {
    for (std::string& p : io::parse_blocklist(io::read_file(a.blocklist))) {
      config.blocklist.push_back(std::move(p));
    }
  }
  const auto candidates = io::parse_candidates(io::read_file(a.in), a.in);
  const postproc::FilterReport r = postproc::pipeline(candidates, config);
  const std::filesystem::path dir(a.out_dir);
  io::write_file(dir / "kept.jsonl", io::candidates_jsonl(r.kept));
  io::write_file(dir / "dropped.jsonl", io::dropped_jsonl(r.dropped));

  std::map<postproc::DropReason, std::size_t> counts;
  for (const auto& d : r.dropped) ++counts[d.reason];
  out << fmt::format("{:<18} {:>6}\n", "outcome", "count");
  out << fmt::format("{:<18} {:>6}\n", "kept", r.kept.size());
  for (auto reason :
       {postproc::DropReason::kEmptyAfterMerge,
        postproc::DropReason::kLowConfidence, postproc::DropReason::kTooGeneral,
        postproc::DropReason::kMachineStyle}) {
    out << fmt::format("{:<18} {:>6}\n", postproc::to_string(reason),
                       counts[reason]);
  }
  out << fmt::format("{:<18} {:>6}\n", "total", candidates.size());
  return kExitOk;
}

struct DattnArgs {
  int seeds = 20;
  std::vector<int> dims = {8, 16, 32};
  std::string mode = "adaptive";
  std::string inject_fault;
};

// Text branch enters with the wrong sign.
dattn::TextKernel sign_flip_kernel(dattn::MixMode mode) {
  using namespace dattn;
  return [mode](std::size_t t, const TokenSequence& s,
                const ProjectionWeights& w, const AttentionConfig& c) {
    const Vector self = text_self_attention(t, s, w, c);
    if (mode == MixMode::kFixed) return Vector(decomposed_fixed(t, s, w, c) - 2.0 * self);
    const LseScores sc = branch_scores(t, s, w, c);
    // An empty branch carries the -inf sentinel.
    const double s_cross =
        std::isinf(sc.s_a)   ? sc.s_v
        : std::isinf(sc.s_v) ? sc.s_a
                             : log_sum_exp(std::array<double, 2>{sc.s_v, sc.s_a});
    const AlphaWeights a = alpha_weights(s_cross, sc.s_t);
    return Vector(decomposed_adaptive(t, s, w, c) - 2.0 * a.alpha_t * self);
  };
}

int run_dattn_check(const DattnArgs& a, std::ostream& out, std::ostream&) {
  dattn::CheckOptions o;
  o.seeds = a.seeds;
  o.dims = a.dims;
  o.mode = a.mode == "fixed" ? dattn::MixMode::kFixed : dattn::MixMode::kAdaptive;
  if (a.inject_fault == "sign-flip") o.kernel = sign_flip_kernel(o.mode);
  const dattn::CheckReport r = dattn::run_dattn_checks(o);
  out << dattn::format_check_report(r);
  return r.all_passed() ? kExitOk : kExitInvariant;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kNumeric: return kExitInvariant;
    case ErrorKind::kInvalidInput:
    case ErrorKind::kSchema:
    case ErrorKind::kParse: return kExitSchema;
  }
  return kExitSchema;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Temporal retrieval evaluation and decomposed attention toolkit",
               "trkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "trkit 0.1.0");
  app.set_config("--config", "", "TOML file with default flag values")
      ->envname(kConfigEnvVar);

  const auto positive = CLI::PositiveNumber;
  const auto axes_check = CLI::IsMember({"duration", "format", "modality"});

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions and write report + curves");
  evaluate_cmd->add_option("--gt", ev.gt, "Ground-truth JSONL")->required();
  evaluate_cmd->add_option("--pred", ev.pred, "Prediction JSONL")->required();
  evaluate_cmd->add_option("--out-dir", ev.out_dir, "Output directory")->capture_default_str();
  evaluate_cmd->add_option("--grid-n", ev.grid_n, "Threshold grid size")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))->capture_default_str();
  evaluate_cmd->add_option("--axes", ev.axes, "Slice axes to report")
      ->delimiter(',')->check(axes_check)->capture_default_str();

  CurvesArgs cv;
  auto* curves_cmd = app.add_subcommand("curves", "Emit accuracy-threshold curves as CSV");
  curves_cmd->add_option("--gt", cv.gt, "Ground-truth JSONL")->required();
  curves_cmd->add_option("--pred", cv.pred, "Prediction JSONL")->required();
  curves_cmd->add_option("--out", cv.out, "CSV path (default: stdout)");
  curves_cmd->add_option("--grid-n", cv.grid_n, "Threshold grid size")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))->capture_default_str();
  curves_cmd->add_option("--axis", cv.axis, "Restrict to one slice axis")->check(axes_check);
  curves_cmd->add_option("--slice", cv.slice, "Slice name on --axis");

  ParseArgs pa;
  auto* parse_cmd = app.add_subcommand("parse", "Convert raw model output into canonical predictions");
  parse_cmd->add_option("--in", pa.in, "Prediction JSONL with raw_text")->required();
  parse_cmd->add_option("--out", pa.out, "Output JSONL (default: stdout)");
  parse_cmd->add_option("--kind", pa.kind, "Raw text format")
      ->check(CLI::IsMember({"timestamps", "frames"}))->capture_default_str();
  parse_cmd->add_option("--mode", pa.mode, "Frame sampling mode")
      ->check(CLI::IsMember({"dense", "uniform"}))->capture_default_str();
  parse_cmd->add_option("--fps", pa.fps, "Frame rate for dense mode")->check(positive)->capture_default_str();
  parse_cmd->add_option("--n-frames", pa.n_frames, "Number of sampled frames")->check(positive);
  parse_cmd->add_option("--duration-from", pa.duration_from, "Ground-truth JSONL supplying durations");
  parse_cmd->add_option("--index-base", pa.index_base, "First frame index")
      ->check(CLI::IsMember({0, 1}))->capture_default_str();
  parse_cmd->add_flag("--instant-frames", pa.instant_frames, "Frames are instants, not strides");

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "Plan a synthetic timestamp-supervised sample");
  synth_cmd->add_option("--corpus", sy.corpus, "Caption corpus JSONL")->required();
  synth_cmd->add_option("--out-dir", sy.out_dir, "Output directory")->capture_default_str();
  synth_cmd->add_option("--modality", sy.modality, "Active modality")
      ->check(CLI::IsMember({"visual", "audio"}))->capture_default_str();
  synth_cmd->add_option("--seed", sy.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--n-samples", sy.n_samples, "Corpus entries to draw (0: all)")->capture_default_str();
  synth_cmd->add_option("--fps", sy.fps, "Frame rate")->check(positive)->capture_default_str();
  synth_cmd->add_option("--segment-duration", sy.segment_duration_s,
                        "Fixed seconds per visual segment")->check(positive);
  synth_cmd->add_option("--min-segment-s", sy.ranges.min_segment_s)->check(positive)->capture_default_str();
  synth_cmd->add_option("--max-segment-s", sy.ranges.max_segment_s)->check(positive)->capture_default_str();
  synth_cmd->add_option("--min-window-frac", sy.ranges.min_window_frac)
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  synth_cmd->add_option("--max-window-frac", sy.ranges.max_window_frac)
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  synth_cmd->add_option("--max-speed-frac", sy.ranges.max_speed_frac)
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();

  PostprocessArgs pp;
  auto* post_cmd = app.add_subcommand("postprocess", "Filter generated (query, ranges, confidence) triples");
  post_cmd->add_option("--in", pp.in, "Candidate JSONL")->required();
  post_cmd->add_option("--out-dir", pp.out_dir, "Output directory")->capture_default_str();
  post_cmd->add_option("--gap", pp.config.merge_gap_s, "Merge gap in seconds")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  post_cmd->add_option("--min-confidence", pp.config.min_confidence, "Confidence cut")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  post_cmd->add_option("--max-ranges", pp.config.max_ranges, "Range count cut")->capture_default_str();
  post_cmd->add_option("--blocklist", pp.blocklist, "Extra style patterns, one per line");

  DattnArgs da;
  auto* dattn_cmd = app.add_subcommand("dattn-check", "Run the decomposed attention invariant suite");
  dattn_cmd->add_option("--seeds", da.seeds, "Random trials per dimension")
      ->check(CLI::Range(1, 100000))->capture_default_str();
  dattn_cmd->add_option("--dims", da.dims, "Model widths (even)")
      ->delimiter(',')->check(CLI::Range(2, 1024))->capture_default_str();
  dattn_cmd->add_option("--mode", da.mode, "Mixing mode")
      ->check(CLI::IsMember({"adaptive", "fixed"}))->capture_default_str();
  dattn_cmd->add_option("--inject-fault", da.inject_fault)
      ->check(CLI::IsMember({"sign-flip"}))->group("");

  // CLI11 skips an unreadable config named only through the environment.
  if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(env, ec)) {
      err << "error: " << kConfigEnvVar << " names a missing file '" << env
          << "'\n";
      return kExitIo;
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitSchema;
  }

  try {
    if (evaluate_cmd->parsed()) return run_evaluate(ev, out, err);
    if (curves_cmd->parsed()) return run_curves(cv, out, err);
    if (parse_cmd->parsed()) return run_parse(pa, out, err);
    if (synth_cmd->parsed()) return run_synth(sy, out, err);
    if (post_cmd->parsed()) return run_postprocess(pp, out, err);
    if (dattn_cmd->parsed()) return run_dattn_check(da, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitSchema;
}

}  // namespace trkit
