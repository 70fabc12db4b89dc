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

#include "trkit/dattn_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "trkit/error.hpp"
#include "trkit/rng.hpp"

namespace trkit::dattn {
namespace {

constexpr double kIdentityTol = 1e-10;
constexpr double kAlphaTol = 1e-15;
constexpr double kGradRelTol = 1e-6;
constexpr double kFdStep = 1e-5;
constexpr double kScalingTol = 0.05;

CheckResult pass(std::string name, std::string detail) {
  return {std::move(name), true, std::move(detail), std::nullopt};
}

CheckResult fail(std::string name, std::string detail,
                 std::optional<std::uint64_t> seed = std::nullopt) {
  return {std::move(name), false, std::move(detail), seed};
}

// Sum of three independent single-softmax attentions, one per modality,
// each built directly from reference_attention.
Vector fixed_reference(std::size_t t, const TokenSequence& seq,
                       const ProjectionWeights& w,
                       const AttentionConfig& config) {
  const double scale = config.scale > 0.0
                           ? config.scale
                           : 1.0 / std::sqrt(static_cast<double>(seq.d_model()));
  const Vector q = scale * (w.wq.transpose() *
                            seq.embeddings.row(static_cast<Eigen::Index>(t))
                                .transpose());
  const auto pos_t = static_cast<double>(seq.position[t]);
  auto part = [&](std::size_t lo, std::size_t hi, bool rotate) -> Vector {
    if (lo >= hi) return Vector::Zero(seq.d_model());
    const auto n = static_cast<Eigen::Index>(hi - lo);
    const auto x = seq.embeddings.middleRows(static_cast<Eigen::Index>(lo), n);
    Matrix k = x * w.wk;
    if (rotate) {
      for (Eigen::Index j = 0; j < n; ++j) {
        Vector kj = k.row(j).transpose();
        apply_rotary(kj, static_cast<double>(seq.position[lo + j]) - pos_t,
                     config.rope.base);
        k.row(j) = kj.transpose();
      }
    }
    return w.wo.transpose() * reference_attention(q, k, x * w.wv);
  };
  const bool rope = config.rope.enabled;
  const bool cross_rope = rope && config.cross == CrossPositional::kBiased;
  const std::size_t a0 = seq.offset(Modality::kAudio);
  const std::size_t t0 = seq.offset(Modality::kText);
  return part(0, a0, cross_rope) + part(a0, t0, cross_rope) +
         part(t0, t + 1, rope);
}

CheckResult check_identity(const CheckOptions& o) {
  const std::string name = o.mode == MixMode::kAdaptive
                               ? "decomposition identity (adaptive)"
                               : "decomposition identity (fixed)";
  TextKernel kernel = o.kernel;
  if (!kernel) {
    kernel = o.mode == MixMode::kAdaptive
                 ? TextKernel([](std::size_t t, const TokenSequence& s,
                                 const ProjectionWeights& w,
                                 const AttentionConfig& c) {
                     return decomposed_adaptive(t, s, w, c);
                   })
                 : TextKernel([](std::size_t t, const TokenSequence& s,
                                 const ProjectionWeights& w,
                                 const AttentionConfig& c) {
                     return decomposed_fixed(t, s, w, c);
                   });
  }
  double worst = 0.0;
  std::int64_t trials = 0;
  for (int s = 0; s < o.seeds; ++s) {
    const std::uint64_t seed = o.base_seed + static_cast<std::uint64_t>(s);
    SeededRng rng(seed);
    const int d = o.dims[static_cast<std::size_t>(s) % o.dims.size()];
    SequenceShape shape;
    shape.tokens_per_frame = rng.uniform_int(1, 4);
    shape.n_frames = rng.uniform_int(0, 64 / shape.tokens_per_frame);
    if (o.mode == MixMode::kFixed) {
      shape.tokens_per_chunk = rng.uniform_int(1, 4);
      shape.n_audio_chunks = rng.uniform_int(0, 8);
    }
    shape.n_text = rng.uniform_int(1, 32);
    const TokenSequence seq = random_sequence(shape, d, seed * 7919 + 1);
    const ProjectionWeights w = random_weights(d, seed * 7919 + 2);
    AttentionConfig config;
    config.mix = o.mode;
    const std::size_t t0 = seq.offset(Modality::kText);
    for (std::size_t t = t0; t < seq.size(); ++t) {
      const Vector got = kernel(t, seq, w, config);
      const Vector want = o.mode == MixMode::kAdaptive
                              ? monolithic_attention(t, seq, w, config)
                              : fixed_reference(t, seq, w, config);
      const double err = (got - want).cwiseAbs().maxCoeff();
      ++trials;
      if (!(err < kIdentityTol)) {
        return fail(name,
                    fmt::format("max |diff| {:.3e} at token {} (d={}, N={}, "
                                "M={})",
                                err, t, d, t0, seq.size() - t0),
                    seed);
      }
      worst = std::max(worst, err);
    }
  }
  return pass(name, fmt::format("{} tokens over {} seeds, max |diff| {:.3e}",
                                trials, o.seeds, worst));
}

CheckResult check_alpha_complement(std::uint64_t seed) {
  const std::string name = "alpha complement";
  constexpr double kInf = std::numeric_limits<double>::infinity();
  SeededRng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double sv = rng.uniform(-50.0, 50.0);
    const double st = rng.uniform(-50.0, 50.0);
    const AlphaWeights a = alpha_weights(sv, st);
    worst = std::max(worst, std::abs(a.alpha_v + a.alpha_t - 1.0));
  }
  const AlphaWeights no_visual = alpha_weights(-kInf, 1.0);
  const AlphaWeights no_text = alpha_weights(1.0, -kInf);
  const bool sentinels = no_visual.alpha_v == 0.0 && no_visual.alpha_t == 1.0 &&
                         no_text.alpha_v == 1.0 && no_text.alpha_t == 0.0;
  if (worst > kAlphaTol || !sentinels) {
    return fail(name, fmt::format("max |a_v + a_t - 1| {:.3e}, sentinels {}",
                                  worst, sentinels ? "ok" : "wrong"),
                seed);
  }
  return pass(name, fmt::format("10000 pairs, max |a_v + a_t - 1| {:.3e}",
                                worst));
}

double loss_of(const TokenSequence& seq, const ProjectionWeights& w,
               const AttentionConfig& c, const Matrix& upstream) {
  return (decomposed_fixed_text_rows(seq, w, c).array() * upstream.array())
      .sum();
}

CheckResult check_gradients(std::uint64_t seed) {
  const std::string name = "fixed-mix gradients";
  SequenceShape shape{2, 3, 2, 2, 4};
  const TokenSequence seq = random_sequence(shape, 8, seed + 11);
  ProjectionWeights w = random_weights(8, seed + 12);
  AttentionConfig config;
  config.mix = MixMode::kFixed;
  SeededRng rng(seed + 13);
  Matrix upstream(shape.n_text, 8);
  for (Eigen::Index i = 0; i < upstream.size(); ++i) {
    upstream.data()[i] = rng.normal();
  }
  const WeightGradients g = decomposed_fixed_backward(seq, w, config, upstream);

  double worst = 0.0;
  std::string worst_at;
  const std::pair<Matrix ProjectionWeights::*, const Matrix*> params[] = {
      {&ProjectionWeights::wq, &g.wq},
      {&ProjectionWeights::wk, &g.wk},
      {&ProjectionWeights::wv, &g.wv},
      {&ProjectionWeights::wo, &g.wo}};
  const char* names[] = {"wq", "wk", "wv", "wo"};
  for (int p = 0; p < 4; ++p) {
    Matrix& m = w.*(params[p].first);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double saved = m.data()[i];
      m.data()[i] = saved + kFdStep;
      const double up = loss_of(seq, w, config, upstream);
      m.data()[i] = saved - kFdStep;
      const double down = loss_of(seq, w, config, upstream);
      m.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * kFdStep);
      const double analytic = params[p].second->data()[i];
      const double denom = std::max(std::abs(numeric), std::abs(analytic));
      const double rel = denom == 0.0 ? 0.0 : std::abs(numeric - analytic) / denom;
      if (rel > worst) {
        worst = rel;
        worst_at = fmt::format("{}[{}]", names[p], i);
      }
    }
  }
  if (!(worst <= kGradRelTol)) {
    return fail(name,
                fmt::format("max relative error {:.3e} at {}", worst, worst_at),
                seed);
  }
  return pass(name, fmt::format("256 weights, max relative error {:.3e}", worst));
}

CheckResult check_debias(const CheckOptions& o) {
  const std::string name = "debiased cross-attention invariance";
  for (int s = 0; s < o.seeds; ++s) {
    const std::uint64_t seed = o.base_seed + 1000 + static_cast<std::uint64_t>(s);
    const int d = o.dims[static_cast<std::size_t>(s) % o.dims.size()];
    const TokenSequence seq =
        random_sequence(SequenceShape{4, 3, 3, 2, 5}, d, seed);
    const ProjectionWeights w = random_weights(d, seed + 1);
    TokenSequence shifted = seq;
    const std::size_t t0 = seq.offset(Modality::kText);
    for (std::size_t i = 0; i < t0; ++i) shifted.position[i] += 1000;
    const AttentionConfig config;
    for (std::size_t t = t0; t < seq.size(); ++t) {
      const Vector a = debiased_cross_attention(t, seq, w, config);
      const Vector b = debiased_cross_attention(t, shifted, w, config);
      if (a != b) {
        return fail(name, fmt::format("output moved at token {}", t), seed);
      }
    }
  }
  return pass(name, fmt::format("{} seeds, +1000 position shift, bit-identical",
                                o.seeds));
}

CheckResult check_block_locality(const CheckOptions& o) {
  const std::string name = "diagonal V2V block locality";
  for (int s = 0; s < o.seeds; ++s) {
    const std::uint64_t seed = o.base_seed + 2000 + static_cast<std::uint64_t>(s);
    const int d = o.dims[static_cast<std::size_t>(s) % o.dims.size()];
    const TokenSequence seq = random_sequence(SequenceShape{3, 4, 0, 1, 1}, d, seed);
    const ProjectionWeights w = random_weights(d, seed + 1);
    const AttentionConfig config;
    TokenSequence perturbed = seq;
    perturbed.embeddings.middleRows(4, 8).array() += 0.5;  // frames 1 and 2
    const Matrix a = diagonal_v2v(seq, w, config);
    const Matrix b = diagonal_v2v(perturbed, w, config);
    if (a.topRows(4) != b.topRows(4)) {
      return fail(name, "frame 0 changed when other frames were perturbed",
                  seed);
    }
  }
  return pass(name, fmt::format("{} seeds, untouched frame bit-identical",
                                o.seeds));
}

CheckResult check_stability(std::uint64_t seed) {
  const std::string name = "large-logit stability";
  SeededRng rng(seed);
  for (int trial = 0; trial < 20; ++trial) {
    Vector q = Vector::Zero(8);
    q[0] = 1.0;
    Matrix k = Matrix::Zero(50, 8);
    Matrix v(50, 8);
    for (Eigen::Index i = 0; i < 50; ++i) {
      k(i, 0) = rng.uniform(-700.0, 700.0);
      for (Eigen::Index j = 0; j < 8; ++j) v(i, j) = rng.normal();
    }
    const double s = lse_score(q, k);
    const Vector out = reference_attention(q, k, v);
    if (!std::isfinite(s) || !out.allFinite()) {
      return fail(name, "non-finite output for logits up to 700", seed);
    }
  }
  return pass(name, "20 trials with |logit| <= 700, all finite");
}

std::uint64_t v2v_ops(std::int64_t frames, std::int64_t per_frame,
                      BlockGranularity blocks) {
  constexpr int kD = 4;
  const TokenSequence seq =
      random_sequence(SequenceShape{frames, per_frame, 0, 1, 0}, kD, 99);
  const ProjectionWeights w = random_weights(kD, 98);
  AttentionConfig config;
  config.blocks = blocks;
  OpCounter counter;
  diagonal_v2v(seq, w, config, &counter);
  return counter.score_ops;
}

CheckResult check_scaling(CheckReport& report) {
  const std::string name = "V2V score-count scaling";
  constexpr std::int64_t kPerFrame = 4;
  const std::uint64_t diag_512 = v2v_ops(512, kPerFrame, BlockGranularity::kPerSegment);
  const std::uint64_t diag_1024 = v2v_ops(1024, kPerFrame, BlockGranularity::kPerSegment);
  const std::uint64_t full_512 = v2v_ops(512, kPerFrame, BlockGranularity::kFull);
  const std::uint64_t full_1024 = v2v_ops(1024, kPerFrame, BlockGranularity::kFull);
  report.scaling.push_back({"diagonal", 512, kPerFrame, diag_512});
  report.scaling.push_back({"diagonal", 1024, kPerFrame, diag_1024});
  report.scaling.push_back({"full", 512, kPerFrame, full_512});
  report.scaling.push_back({"full", 1024, kPerFrame, full_1024});
  const double diag_ratio = static_cast<double>(diag_1024) / static_cast<double>(diag_512);
  const double full_ratio = static_cast<double>(full_1024) / static_cast<double>(full_512);
  const bool ok = std::abs(diag_ratio - 2.0) <= 2.0 * kScalingTol &&
                  std::abs(full_ratio - 4.0) <= 4.0 * kScalingTol;
  const std::string detail = fmt::format(
      "512->1024 frames: diagonal x{:.3f}, full x{:.3f}", diag_ratio, full_ratio);
  return ok ? pass(name, detail) : fail(name, detail);
}

CheckResult check_token_arithmetic() {
  const std::string name = "one-hour token count";
  TokenTimeline tl;
  tl.fps = 1.0;
  tl.visual_tokens_per_frame = 400;
  const std::int64_t n = visual_token_count(tl, 3600.0);
  const TimelineSpans spans = tokens_for_time(tl, {0.0, 3600.0});
  const std::uint64_t full = op_count(tl, 3600.0, V2VCost::kFull);
  const bool ok = n == 1'440'000 && spans.visual.size() == 1'440'000 &&
                  full == 1'440'000ULL * 1'440'000ULL &&
                  op_count(tl, 3600.0, V2VCost::kDiagonal) == 3600ULL * 400 * 400;
  const std::string detail = fmt::format("N = {} visual tokens", n);
  return ok ? pass(name, detail) : fail(name, detail);
}

CheckResult check_saturation(std::uint64_t seed) {
  const std::string name = "alpha_v saturation with N";
  constexpr int kSeeds = 200;
  constexpr int kTextTokens = 16;
  const int sizes[] = {10, 100, 1000};
  double means[3] = {0.0, 0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    for (int s = 0; s < kSeeds; ++s) {
      SeededRng rng(seed + static_cast<std::uint64_t>(s));
      std::vector<double> visual(static_cast<std::size_t>(sizes[k]));
      std::vector<double> text(kTextTokens);
      for (double& x : visual) x = rng.normal();
      for (double& x : text) x = rng.normal();
      means[k] += alpha_weights(log_sum_exp(visual), log_sum_exp(text)).alpha_v;
    }
    means[k] /= kSeeds;
  }
  const std::string detail = fmt::format(
      "mean alpha_v at N=10/100/1000: {:.4f} / {:.4f} / {:.4f}", means[0],
      means[1], means[2]);
  return means[0] < means[1] && means[1] < means[2] ? pass(name, detail)
                                                    : fail(name, detail, seed);
}

template <typename F>
CheckResult guarded(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return fail(name, fmt::format("threw: {}", e.what()));
  }
}

}  // namespace

bool CheckReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

CheckReport run_dattn_checks(const CheckOptions& options) {
  if (options.seeds < 1) throw InvalidArgumentError("seeds must be >= 1");
  if (options.dims.empty()) throw InvalidArgumentError("no dimensions given");
  for (int d : options.dims) {
    if (d < 2 || d % 2 != 0) {
      throw InvalidArgumentError(
          fmt::format("dimension {} must be even and >= 2", d));
    }
  }
  CheckReport r;
  r.checks.push_back(guarded("decomposition identity",
                             [&] { return check_identity(options); }));
  r.checks.push_back(guarded("alpha complement", [&] {
    return check_alpha_complement(options.base_seed);
  }));
  r.checks.push_back(guarded("fixed-mix gradients", [&] {
    return check_gradients(options.base_seed);
  }));
  r.checks.push_back(guarded("debiased cross-attention invariance",
                             [&] { return check_debias(options); }));
  r.checks.push_back(guarded("diagonal V2V block locality",
                             [&] { return check_block_locality(options); }));
  r.checks.push_back(guarded("large-logit stability", [&] {
    return check_stability(options.base_seed);
  }));
  r.checks.push_back(guarded("V2V score-count scaling",
                             [&] { return check_scaling(r); }));
  r.checks.push_back(guarded("one-hour token count",
                             [&] { return check_token_arithmetic(); }));
  r.checks.push_back(guarded("alpha_v saturation with N", [&] {
    return check_saturation(options.base_seed);
  }));
  return r;
}

std::string format_check_report(const CheckReport& report) {
  std::string out;
  out += fmt::format("{:<40} {:<6} {}\n", "check", "result", "detail");
  for (const CheckResult& c : report.checks) {
    std::string detail = c.detail;
    if (c.failing_seed) detail += fmt::format(" [seed {}]", *c.failing_seed);
    out += fmt::format("{:<40} {:<6} {}\n", c.name, c.passed ? "PASS" : "FAIL",
                       detail);
  }
  if (!report.scaling.empty()) {
    out += "\nscore-op scaling\n";
    out += fmt::format("{:<10} {:>8} {:>10} {:>14}\n", "kernel", "frames",
                       "tok/frame", "score_ops");
    for (const ScalingMeasurement& m : report.scaling) {
      out += fmt::format("{:<10} {:>8} {:>10} {:>14}\n", m.kernel, m.frames,
                         m.tokens_per_frame, m.score_ops);
    }
  }
  return out;
}

}  // namespace trkit::dattn
