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

#include "trkit/dattn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "trkit/error.hpp"
#include "trkit/rng.hpp"

namespace trkit::dattn {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double effective_scale(const AttentionConfig& config, Eigen::Index d) {
  return config.scale > 0.0 ? config.scale
                            : 1.0 / std::sqrt(static_cast<double>(d));
}

void check_weights(const ProjectionWeights& w, Eigen::Index d) {
  for (const Matrix* m : {&w.wq, &w.wk, &w.wv, &w.wo}) {
    if (m->rows() != d || m->cols() != d) {
      throw InvalidArgumentError(fmt::format(
          "projection is {}x{}, expected {}x{}", m->rows(), m->cols(), d, d));
    }
  }
}

void check_text_query(std::size_t t_index, const TokenSequence& seq) {
  if (t_index >= seq.size()) {
    throw InvalidArgumentError(fmt::format(
        "token index {} out of range for {} tokens", t_index, seq.size()));
  }
  if (seq.modality[t_index] != Modality::kText) {
    throw InvalidArgumentError(
        fmt::format("token {} is not a text token", t_index));
  }
}

// Softmax-weighted average of `values` rows under `logits`, plus the
// log-sum-exp of the logits. Assumes at least one logit.
struct Pooled {
  Vector context;
  double lse = kNegInf;
};

Pooled softmax_pool(const Vector& logits, const Matrix& values) {
  const double m = logits.maxCoeff();
  const Vector e = (logits.array() - m).exp().matrix();
  const double z = e.sum();
  Pooled out;
  out.context = values.transpose() * (e / z);
  out.lse = m + std::log(z);
  return out;
}

Vector query_of(std::size_t t, const TokenSequence& seq,
                const ProjectionWeights& w, double scale) {
  return scale * (w.wq.transpose() * seq.embeddings.row(t).transpose());
}

// Keys and values of tokens [lo, hi), keys optionally rotated by their
// own positions.
struct KeyValues {
  Matrix keys;
  Matrix values;
};

KeyValues project_range(const TokenSequence& seq, const ProjectionWeights& w,
                        std::size_t lo, std::size_t hi,
                        const RotaryConfig* rotate) {
  const auto n = static_cast<Eigen::Index>(hi - lo);
  const auto block = seq.embeddings.middleRows(static_cast<Eigen::Index>(lo), n);
  KeyValues kv{block * w.wk, block * w.wv};
  if (rotate != nullptr) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector k = kv.keys.row(j).transpose();
      apply_rotary(k, static_cast<double>(seq.position[lo + j]), rotate->base);
      kv.keys.row(j) = k.transpose();
    }
  }
  return kv;
}

struct BranchResult {
  Vector context;  // before Wo; empty vector if the branch has no keys
  double lse = kNegInf;
};

// Attention of text token t over tokens [lo, hi). With `rotate`, both the
// query and the keys carry rotary encodings of their absolute positions.
BranchResult attend_branch(std::size_t t, std::size_t lo, std::size_t hi,
                           const TokenSequence& seq,
                           const ProjectionWeights& w, double scale,
                           const RotaryConfig* rotate, OpCounter* counter) {
  BranchResult r;
  if (lo >= hi) return r;
  Vector q = query_of(t, seq, w, scale);
  if (rotate != nullptr) {
    apply_rotary(q, static_cast<double>(seq.position[t]), rotate->base);
  }
  const KeyValues kv = project_range(seq, w, lo, hi, rotate);
  const Vector logits = kv.keys * q;
  if (counter != nullptr) counter->score_ops += hi - lo;
  Pooled p = softmax_pool(logits, kv.values);
  r.context = std::move(p.context);
  r.lse = p.lse;
  return r;
}

const RotaryConfig* text_rotation(const AttentionConfig& c) {
  return c.rope.enabled ? &c.rope : nullptr;
}

const RotaryConfig* cross_rotation(const AttentionConfig& c) {
  return c.rope.enabled && c.cross == CrossPositional::kBiased ? &c.rope
                                                               : nullptr;
}

Vector zero(const TokenSequence& seq) {
  return Vector::Zero(seq.d_model());
}

Vector output_of(const BranchResult& b, const TokenSequence& seq,
                 const ProjectionWeights& w) {
  if (b.context.size() == 0) return zero(seq);
  return w.wo.transpose() * b.context;
}

void prepare(std::size_t t_index, const TokenSequence& seq,
             const ProjectionWeights& w) {
  seq.validate();
  check_weights(w, seq.d_model());
  check_text_query(t_index, seq);
}

}  // namespace

std::size_t TokenSequence::count(Modality m) const {
  return static_cast<std::size_t>(
      std::count(modality.begin(), modality.end(), m));
}

std::size_t TokenSequence::offset(Modality m) const {
  // Layout is sorted by modality, so this is a partition point.
  return static_cast<std::size_t>(
      std::lower_bound(modality.begin(), modality.end(), m) -
      modality.begin());
}

void TokenSequence::validate() const {
  const auto n = static_cast<Eigen::Index>(modality.size());
  if (embeddings.rows() != n || segment_id.size() != modality.size() ||
      position.size() != modality.size()) {
    throw InvalidArgumentError(fmt::format(
        "token sequence fields disagree: {} embedding rows, {} modalities, "
        "{} segment ids, {} positions",
        embeddings.rows(), modality.size(), segment_id.size(),
        position.size()));
  }
  if (n > 0 && embeddings.cols() == 0) {
    throw InvalidArgumentError("embeddings have zero width");
  }
  for (std::size_t i = 1; i < modality.size(); ++i) {
    if (modality[i] < modality[i - 1]) {
      throw InvalidArgumentError(fmt::format(
          "token {} breaks the visual, audio, text layout order", i));
    }
    if (modality[i] == modality[i - 1] && segment_id[i] < segment_id[i - 1]) {
      throw InvalidArgumentError(
          fmt::format("segment ids decrease at token {}", i));
    }
  }
  if (!embeddings.allFinite()) {
    throw NumericError("token embeddings contain non-finite values");
  }
}

Vector reference_attention(const Vector& q, const Matrix& keys,
                           const Matrix& values, OpCounter* counter) {
  if (keys.rows() == 0) {
    throw InvalidArgumentError("attention over an empty key set");
  }
  if (keys.rows() != values.rows() || keys.cols() != q.size()) {
    throw InvalidArgumentError(fmt::format(
        "attention shapes disagree: q {}, K {}x{}, V {}x{}", q.size(),
        keys.rows(), keys.cols(), values.rows(), values.cols()));
  }
  const Vector logits = keys * q;
  if (counter != nullptr) {
    counter->score_ops += static_cast<std::uint64_t>(keys.rows());
  }
  if (!logits.allFinite()) {
    throw NumericError("attention logits are not finite");
  }
  return softmax_pool(logits, values).context;
}

double log_sum_exp(std::span<const double> logits) {
  if (logits.empty()) return kNegInf;
  double m = kNegInf;
  for (double x : logits) {
    if (!std::isfinite(x)) throw NumericError("non-finite logit");
    m = std::max(m, x);
  }
  double z = 0.0;
  for (double x : logits) z += std::exp(x - m);
  return m + std::log(z);
}

double lse_score(const Vector& q, const Matrix& keys) {
  if (keys.rows() == 0) return kNegInf;
  if (keys.cols() != q.size()) {
    throw InvalidArgumentError("query and key widths disagree");
  }
  if (!q.allFinite() || !keys.allFinite()) {
    throw NumericError("lse_score inputs are not finite");
  }
  const Vector logits = keys * q;
  return log_sum_exp(std::span<const double>(logits.data(), logits.size()));
}

AlphaWeights alpha_weights(double s_v, double s_t) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (std::isnan(s_v) || std::isnan(s_t)) {
    throw NumericError("alpha weights from NaN scores");
  }
  if (s_v == -kInf && s_t == -kInf) {
    throw NumericError("both attention branches are empty");
  }
  if (s_v == kInf && s_t == kInf) {
    throw NumericError("both attention scores are +inf");
  }
  if (s_v == -kInf || s_t == kInf) return {0.0, 1.0};
  if (s_t == -kInf || s_v == kInf) return {1.0, 0.0};
  // Evaluate the smaller weight directly and complement the larger.
  const double d = s_v - s_t;
  if (d >= 0.0) {
    const double at = 1.0 / (1.0 + std::exp(d));
    return {1.0 - at, at};
  }
  const double av = 1.0 / (1.0 + std::exp(-d));
  return {av, 1.0 - av};
}

void apply_rotary(Eigen::Ref<Vector> v, double position, double base) {
  const Eigen::Index d = v.size();
  if (d % 2 != 0) {
    throw InvalidArgumentError(
        fmt::format("rotary encoding needs an even width, got {}", d));
  }
  for (Eigen::Index i = 0; i < d / 2; ++i) {
    const double inv_freq =
        std::pow(base, -2.0 * static_cast<double>(i) / static_cast<double>(d));
    const double theta = position * inv_freq;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double x0 = v[2 * i];
    const double x1 = v[2 * i + 1];
    v[2 * i] = c * x0 - s * x1;
    v[2 * i + 1] = s * x0 + c * x1;
  }
}

ProjectionWeights random_weights(Eigen::Index d_model, std::uint64_t seed) {
  if (d_model <= 0) throw InvalidArgumentError("d_model must be positive");
  SeededRng rng(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(d_model));
  auto draw = [&] {
    Matrix m(d_model, d_model);
    for (Eigen::Index i = 0; i < d_model; ++i) {
      for (Eigen::Index j = 0; j < d_model; ++j) m(i, j) = sd * rng.normal();
    }
    return m;
  };
  ProjectionWeights w;
  w.wq = draw();
  w.wk = draw();
  w.wv = draw();
  w.wo = draw();
  return w;
}

LseScores branch_scores(std::size_t t_index, const TokenSequence& seq,
                        const ProjectionWeights& w,
                        const AttentionConfig& config) {
  prepare(t_index, seq, w);
  const double scale = effective_scale(config, seq.d_model());
  const std::size_t a0 = seq.offset(Modality::kAudio);
  const std::size_t t0 = seq.offset(Modality::kText);
  LseScores s;
  s.s_v = attend_branch(t_index, 0, a0, seq, w, scale, cross_rotation(config),
                        nullptr).lse;
  s.s_a = attend_branch(t_index, a0, t0, seq, w, scale, cross_rotation(config),
                        nullptr).lse;
  s.s_t = attend_branch(t_index, t0, t_index + 1, seq, w, scale,
                        text_rotation(config), nullptr).lse;
  return s;
}

Vector monolithic_attention(std::size_t t_index, const TokenSequence& seq,
                            const ProjectionWeights& w,
                            const AttentionConfig& config,
                            OpCounter* counter) {
  prepare(t_index, seq, w);
  const double scale = effective_scale(config, seq.d_model());
  const std::size_t t0 = seq.offset(Modality::kText);
  const std::size_t n_ctx = t_index + 1;  // every token up to and including t

  const Vector q = query_of(t_index, seq, w, scale);
  KeyValues kv = project_range(seq, w, 0, n_ctx, nullptr);
  // q R(p_t)^T R(p_j) k_j == q R(p_j - p_t) k_j: fold the rotation into the
  // key as a relative offset.
  const auto pos_t = static_cast<double>(seq.position[t_index]);
  for (std::size_t j = 0; j < n_ctx; ++j) {
    const bool text_key = j >= t0;
    const bool rotate = config.rope.enabled &&
                        (text_key || config.cross == CrossPositional::kBiased);
    if (!rotate) continue;
    Vector k = kv.keys.row(static_cast<Eigen::Index>(j)).transpose();
    apply_rotary(k, static_cast<double>(seq.position[j]) - pos_t,
                 config.rope.base);
    kv.keys.row(static_cast<Eigen::Index>(j)) = k.transpose();
  }
  return w.wo.transpose() * reference_attention(q, kv.keys, kv.values, counter);
}

Vector cross_attention_visual(std::size_t t_index, const TokenSequence& seq,
                              const ProjectionWeights& w,
                              const AttentionConfig& config,
                              OpCounter* counter) {
  prepare(t_index, seq, w);
  const double scale = effective_scale(config, seq.d_model());
  return output_of(attend_branch(t_index, 0, seq.offset(Modality::kAudio), seq,
                                 w, scale, cross_rotation(config), counter),
                   seq, w);
}

Vector cross_attention_audio(std::size_t t_index, const TokenSequence& seq,
                             const ProjectionWeights& w,
                             const AttentionConfig& config,
                             OpCounter* counter) {
  prepare(t_index, seq, w);
  const double scale = effective_scale(config, seq.d_model());
  return output_of(
      attend_branch(t_index, seq.offset(Modality::kAudio),
                    seq.offset(Modality::kText), seq, w, scale,
                    cross_rotation(config), counter),
      seq, w);
}

Vector text_self_attention(std::size_t t_index, const TokenSequence& seq,
                           const ProjectionWeights& w,
                           const AttentionConfig& config, OpCounter* counter) {
  prepare(t_index, seq, w);
  const double scale = effective_scale(config, seq.d_model());
  return output_of(attend_branch(t_index, seq.offset(Modality::kText),
                                 t_index + 1, seq, w, scale,
                                 text_rotation(config), counter),
                   seq, w);
}

Vector debiased_cross_attention(std::size_t t_index, const TokenSequence& seq,
                                const ProjectionWeights& w,
                                const AttentionConfig& config,
                                OpCounter* counter) {
  AttentionConfig debiased = config;
  debiased.cross = CrossPositional::kDebiased;
  return cross_attention_visual(t_index, seq, w, debiased, counter) +
         cross_attention_audio(t_index, seq, w, debiased, counter);
}

Vector decomposed_adaptive(std::size_t t_index, const TokenSequence& seq,
                           const ProjectionWeights& w,
                           const AttentionConfig& config,
                           OpCounter* counter) {
  prepare(t_index, seq, w);
  const double scale = effective_scale(config, seq.d_model());
  const std::size_t t0 = seq.offset(Modality::kText);
  const BranchResult cross = attend_branch(
      t_index, 0, t0, seq, w, scale, cross_rotation(config), counter);
  const BranchResult self = attend_branch(t_index, t0, t_index + 1, seq, w,
                                          scale, text_rotation(config),
                                          counter);
  const AlphaWeights a = alpha_weights(cross.lse, self.lse);
  Vector out = a.alpha_t * output_of(self, seq, w);
  if (a.alpha_v != 0.0) out += a.alpha_v * output_of(cross, seq, w);
  return out;
}

Vector decomposed_fixed(std::size_t t_index, const TokenSequence& seq,
                        const ProjectionWeights& w,
                        const AttentionConfig& config, OpCounter* counter) {
  prepare(t_index, seq, w);
  // The query token itself is in the text prefix, so at least one branch
  // is non-empty for any valid text token.
  return cross_attention_visual(t_index, seq, w, config, counter) +
         cross_attention_audio(t_index, seq, w, config, counter) +
         text_self_attention(t_index, seq, w, config, counter);
}

Matrix block_self_attention(Modality m, const TokenSequence& seq,
                            const ProjectionWeights& w,
                            const AttentionConfig& config,
                            OpCounter* counter) {
  if (m == Modality::kText) {
    throw InvalidArgumentError("block self-attention is for visual or audio");
  }
  seq.validate();
  check_weights(w, seq.d_model());
  const double scale = effective_scale(config, seq.d_model());
  const std::size_t lo = seq.offset(m);
  const std::size_t n = seq.count(m);
  const Eigen::Index d = seq.d_model();
  Matrix out(static_cast<Eigen::Index>(n), d);

  std::size_t b0 = 0;
  while (b0 < n) {
    std::size_t b1 = b0 + 1;
    switch (config.blocks) {
      case BlockGranularity::kPerToken:
        break;
      case BlockGranularity::kFull:
        b1 = n;
        break;
      case BlockGranularity::kPerSegment:
        while (b1 < n && seq.segment_id[lo + b1] == seq.segment_id[lo + b0]) {
          ++b1;
        }
        break;
    }
    const auto len = static_cast<Eigen::Index>(b1 - b0);
    const auto x = seq.embeddings.middleRows(static_cast<Eigen::Index>(lo + b0),
                                             len);
    const Matrix q = scale * (x * w.wq);
    const Matrix k = x * w.wk;
    const Matrix v = x * w.wv;
    Matrix logits = q * k.transpose();
    if (counter != nullptr) {
      counter->score_ops += static_cast<std::uint64_t>(len * len);
    }
    for (Eigen::Index i = 0; i < len; ++i) {
      const double mx = logits.row(i).maxCoeff();
      logits.row(i) = (logits.row(i).array() - mx).exp().matrix();
      logits.row(i) /= logits.row(i).sum();
    }
    out.middleRows(static_cast<Eigen::Index>(b0), len) = logits * v * w.wo;
    b0 = b1;
  }
  return out;
}

Matrix layer_forward(const TokenSequence& seq, const ProjectionWeights& w,
                     const AttentionConfig& config, OpCounter* counter) {
  if (seq.size() == 0) {
    throw InvalidArgumentError("layer_forward on an empty sequence");
  }
  seq.validate();
  check_weights(w, seq.d_model());
  Matrix out(static_cast<Eigen::Index>(seq.size()), seq.d_model());
  const std::size_t a0 = seq.offset(Modality::kAudio);
  const std::size_t t0 = seq.offset(Modality::kText);
  if (a0 > 0) {
    out.topRows(static_cast<Eigen::Index>(a0)) =
        block_self_attention(Modality::kVisual, seq, w, config, counter);
  }
  if (t0 > a0) {
    out.middleRows(static_cast<Eigen::Index>(a0),
                   static_cast<Eigen::Index>(t0 - a0)) =
        block_self_attention(Modality::kAudio, seq, w, config, counter);
  }
  for (std::size_t t = t0; t < seq.size(); ++t) {
    const Vector row = config.mix == MixMode::kFixed
                           ? decomposed_fixed(t, seq, w, config, counter)
                           : decomposed_adaptive(t, seq, w, config, counter);
    out.row(static_cast<Eigen::Index>(t)) = row.transpose();
  }
  return out;
}

Matrix decomposed_fixed_text_rows(const TokenSequence& seq,
                                  const ProjectionWeights& w,
                                  const AttentionConfig& config) {
  const std::size_t t0 = seq.offset(Modality::kText);
  Matrix out(static_cast<Eigen::Index>(seq.size() - t0), seq.d_model());
  for (std::size_t t = t0; t < seq.size(); ++t) {
    out.row(static_cast<Eigen::Index>(t - t0)) =
        decomposed_fixed(t, seq, w, config).transpose();
  }
  return out;
}

namespace {

// Accumulates the gradient of <g, Wo^T c> for one softmax branch of query
// token t over keys [lo, hi).
void branch_backward(std::size_t t, std::size_t lo, std::size_t hi,
                     const RotaryConfig* rotate, const Vector& g,
                     const TokenSequence& seq, const ProjectionWeights& w,
                     double scale, WeightGradients& grads) {
  if (lo >= hi) return;
  const auto ti = static_cast<Eigen::Index>(t);
  const Vector x_t = seq.embeddings.row(ti).transpose();
  Vector q = scale * (w.wq.transpose() * x_t);
  if (rotate != nullptr) {
    apply_rotary(q, static_cast<double>(seq.position[t]), rotate->base);
  }
  const KeyValues kv = project_range(seq, w, lo, hi, rotate);
  const Vector logits = kv.keys * q;
  const double mx = logits.maxCoeff();
  Vector p = (logits.array() - mx).exp().matrix();
  p /= p.sum();
  const Vector c = kv.values.transpose() * p;

  grads.wo += c * g.transpose();
  const Vector dc = w.wo * g;
  const Vector dp = kv.values * dc;
  const Vector dz = (p.array() * (dp.array() - p.dot(dp))).matrix();

  Vector dq = kv.keys.transpose() * dz;
  if (rotate != nullptr) {
    apply_rotary(dq, -static_cast<double>(seq.position[t]), rotate->base);
  }
  grads.wq += scale * x_t * dq.transpose();
  grads.embeddings.row(ti) += (scale * (w.wq * dq)).transpose();

  for (std::size_t j = lo; j < hi; ++j) {
    const auto r = static_cast<Eigen::Index>(j - lo);
    const auto ji = static_cast<Eigen::Index>(j);
    const Vector x_j = seq.embeddings.row(ji).transpose();
    Vector dk = dz[r] * q;
    if (rotate != nullptr) {
      apply_rotary(dk, -static_cast<double>(seq.position[j]), rotate->base);
    }
    const Vector dv = p[r] * dc;
    grads.wk += x_j * dk.transpose();
    grads.wv += x_j * dv.transpose();
    grads.embeddings.row(ji) += (w.wk * dk + w.wv * dv).transpose();
  }
}

}  // namespace

WeightGradients decomposed_fixed_backward(const TokenSequence& seq,
                                          const ProjectionWeights& w,
                                          const AttentionConfig& config,
                                          const Matrix& upstream) {
  seq.validate();
  const Eigen::Index d = seq.d_model();
  check_weights(w, d);
  const std::size_t a0 = seq.offset(Modality::kAudio);
  const std::size_t t0 = seq.offset(Modality::kText);
  if (upstream.rows() != static_cast<Eigen::Index>(seq.size() - t0) ||
      upstream.cols() != d) {
    throw InvalidArgumentError(fmt::format(
        "upstream gradient is {}x{}, expected {}x{}", upstream.rows(),
        upstream.cols(), seq.size() - t0, d));
  }
  const double scale = effective_scale(config, d);
  WeightGradients grads{Matrix::Zero(d, d), Matrix::Zero(d, d),
                        Matrix::Zero(d, d), Matrix::Zero(d, d),
                        Matrix::Zero(seq.embeddings.rows(), d)};
  for (std::size_t t = t0; t < seq.size(); ++t) {
    const Vector g =
        upstream.row(static_cast<Eigen::Index>(t - t0)).transpose();
    branch_backward(t, 0, a0, cross_rotation(config), g, seq, w, scale, grads);
    branch_backward(t, a0, t0, cross_rotation(config), g, seq, w, scale,
                    grads);
    branch_backward(t, t0, t + 1, text_rotation(config), g, seq, w, scale,
                    grads);
  }
  return grads;
}

void TokenTimeline::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw InvalidArgumentError(fmt::format("fps must be positive, got {}", fps));
  }
  if (visual_tokens_per_frame < 1 || audio_tokens_per_second < 1 ||
      audio_sample_rate_hz < 1) {
    throw InvalidArgumentError("token rates must be at least 1");
  }
}

std::int64_t frame_count(const TokenTimeline& tl, double duration_s) {
  tl.validate();
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw InvalidArgumentError(
        fmt::format("duration must be positive, got {}", duration_s));
  }
  return static_cast<std::int64_t>(std::ceil(duration_s * tl.fps));
}

std::int64_t visual_token_count(const TokenTimeline& tl, double duration_s) {
  return frame_count(tl, duration_s) * tl.visual_tokens_per_frame;
}

namespace {

TokenSpan span_for(double start, double end, double rate,
                   std::int64_t tokens_per_step) {
  const auto first = static_cast<std::int64_t>(std::floor(start * rate));
  if (end == start) return {first * tokens_per_step, first * tokens_per_step};
  const auto last = static_cast<std::int64_t>(std::ceil(end * rate));
  return {first * tokens_per_step, last * tokens_per_step};
}

}  // namespace

TimelineSpans tokens_for_time(const TokenTimeline& tl, const TimeRange& range) {
  tl.validate();
  if (!std::isfinite(range.start_s) || !std::isfinite(range.end_s) ||
      range.start_s < 0.0 || range.start_s > range.end_s) {
    throw InvalidRangeError(0, fmt::format("invalid time range [{}, {}]",
                                           range.start_s, range.end_s));
  }
  return {span_for(range.start_s, range.end_s, tl.fps,
                   tl.visual_tokens_per_frame),
          span_for(range.start_s, range.end_s,
                   static_cast<double>(tl.audio_tokens_per_second), 1)};
}

TimeRange time_for_visual_token(const TokenTimeline& tl, std::int64_t index) {
  tl.validate();
  if (index < 0) throw InvalidArgumentError("negative token index");
  const auto frame = static_cast<double>(index / tl.visual_tokens_per_frame);
  return {frame / tl.fps, (frame + 1.0) / tl.fps};
}

TimeRange time_for_audio_token(const TokenTimeline& tl, std::int64_t index) {
  tl.validate();
  if (index < 0) throw InvalidArgumentError("negative token index");
  const auto rate = static_cast<double>(tl.audio_tokens_per_second);
  const auto i = static_cast<double>(index);
  return {i / rate, (i + 1.0) / rate};
}

std::uint64_t op_count(const TokenTimeline& tl, double duration_s,
                       V2VCost mode) {
  const auto frames = static_cast<std::uint64_t>(frame_count(tl, duration_s));
  const auto per_frame = static_cast<std::uint64_t>(tl.visual_tokens_per_frame);
  std::uint64_t n = 0;
  std::uint64_t result = 0;
  bool overflow = __builtin_mul_overflow(frames, per_frame, &n);
  if (mode == V2VCost::kFull) {
    overflow = overflow || __builtin_mul_overflow(n, n, &result);
  } else {
    std::uint64_t block = 0;
    overflow = overflow || __builtin_mul_overflow(per_frame, per_frame, &block) ||
               __builtin_mul_overflow(frames, block, &result);
  }
  if (overflow) {
    throw InvalidArgumentError(
        fmt::format("score count for {} s overflows 64 bits", duration_s));
  }
  return result;
}

TokenSequence random_sequence(const SequenceShape& shape,
                              Eigen::Index d_model, std::uint64_t seed) {
  if (shape.n_frames < 0 || shape.n_audio_chunks < 0 || shape.n_text < 0 ||
      shape.tokens_per_frame < 1 || shape.tokens_per_chunk < 1 ||
      d_model <= 0) {
    throw InvalidArgumentError("invalid sequence shape");
  }
  const std::int64_t n_v = shape.n_frames * shape.tokens_per_frame;
  const std::int64_t n_a = shape.n_audio_chunks * shape.tokens_per_chunk;
  const std::int64_t n = n_v + n_a + shape.n_text;
  SeededRng rng(seed);
  TokenSequence seq;
  seq.embeddings.resize(n, d_model);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d_model; ++j) {
      seq.embeddings(i, j) = rng.normal();
    }
  }
  seq.modality.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    if (i < n_v) {
      seq.modality.push_back(Modality::kVisual);
      seq.segment_id.push_back(i / shape.tokens_per_frame);
    } else if (i < n_v + n_a) {
      seq.modality.push_back(Modality::kAudio);
      seq.segment_id.push_back((i - n_v) / shape.tokens_per_chunk);
    } else {
      seq.modality.push_back(Modality::kText);
      seq.segment_id.push_back(0);
    }
    seq.position.push_back(i);
  }
  return seq;
}

}  // namespace trkit::dattn
