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

// Decomposed attention over a concatenated [visual, audio, text] token
// sequence.
//
// A text token's causal attention over [V, T] splits exactly into a
// cross-attention term over V and a self-attention term over the text
// prefix, mixed by sigmoid weights of the two log-sum-exp scores:
//
//   Attn(t, [V, T]) = a_v XA(t, V) + a_t SA(t, T),
//   a_v = sigmoid(S_V - S_T),  S_X = log sum_x exp(q_t . k_x).
//
// The fixed form drops the weights and sums the three branches
// XA(t, V) + XA(t, A) + SA(t, T). Rotary position encoding is applied on
// the text-to-text path only; cross paths see raw queries and keys. Visual
// (and audio) tokens attend within their own frame (chunk), which makes the
// score count linear in the number of frames.
//
// Everything is single-head, double precision and sequential so that
// results are bit-reproducible.

#ifndef TRKIT_DATTN_HPP_
#define TRKIT_DATTN_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trkit/intervals.hpp"

namespace trkit::dattn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Modality { kVisual, kAudio, kText };

// Rows of `embeddings` are tokens laid out as all visual, then all audio,
// then all text. segment_id is the frame (visual) or chunk (audio) index.
struct TokenSequence {
  Matrix embeddings;
  std::vector<Modality> modality;
  std::vector<std::int64_t> segment_id;
  std::vector<std::int64_t> position;

  std::size_t size() const { return modality.size(); }
  Eigen::Index d_model() const { return embeddings.cols(); }
  std::size_t count(Modality m) const;
  // Index of the first token of modality m (== where it would start if
  // the modality is empty).
  std::size_t offset(Modality m) const;

  // Throws InvalidArgumentError on layout or shape violations.
  void validate() const;
};

// Projections in row-vector convention: q = scale * x Wq, out = c Wo.
struct ProjectionWeights {
  Matrix wq, wk, wv, wo;

  Eigen::Index d_model() const { return wq.rows(); }
};

struct RotaryConfig {
  bool enabled = true;
  double base = 10000.0;
};

enum class MixMode { kFixed, kAdaptive };

enum class CrossPositional {
  kDebiased,  // no positional signal on text-to-visual/audio scores
  kBiased,    // rotary applied on cross scores too, for comparison
};

enum class BlockGranularity {
  kPerSegment,  // attend within the same frame / audio chunk
  kPerToken,    // attend to self only
  kFull,        // dense, every token of the modality
};

struct AttentionConfig {
  MixMode mix = MixMode::kFixed;
  RotaryConfig rope;
  CrossPositional cross = CrossPositional::kDebiased;
  BlockGranularity blocks = BlockGranularity::kPerSegment;
  // Query scale; <= 0 means 1/sqrt(d_model).
  double scale = 0.0;
};

// Counts query-key dot products.
struct OpCounter {
  std::uint64_t score_ops = 0;
};

// softmax(q K^T) Vals with a max-shifted exponent. Throws
// InvalidArgumentError if K is empty or shapes disagree.
Vector reference_attention(const Vector& q, const Matrix& keys,
                           const Matrix& values, OpCounter* counter = nullptr);

// log sum_n exp(q . k_n); -inf for an empty K. Throws NumericError on
// non-finite inputs.
double lse_score(const Vector& q, const Matrix& keys);
double log_sum_exp(std::span<const double> logits);

struct LseScores {
  double s_v = 0.0;
  double s_a = 0.0;
  double s_t = 0.0;
};

struct AlphaWeights {
  double alpha_v = 0.0;
  double alpha_t = 0.0;
};

// alpha_v = sigmoid(s_v - s_t), alpha_t = 1 - alpha_v. An empty side
// (-inf score) gets exactly zero weight. Both empty throws NumericError.
AlphaWeights alpha_weights(double s_v, double s_t);

// Rotates consecutive coordinate pairs of v by position * base^(-2i/d).
void apply_rotary(Eigen::Ref<Vector> v, double position, double base);

// Deterministic random initialisation with entries N(0, 1/d).
ProjectionWeights random_weights(Eigen::Index d_model, std::uint64_t seed);

// Log-sum-exp scores of the query token t_index against the visual,
// audio and text-prefix keys. Cross scores follow config.cross.
LseScores branch_scores(std::size_t t_index, const TokenSequence& seq,
                        const ProjectionWeights& w,
                        const AttentionConfig& config);

// Single-softmax causal attention of text token t_index over every visual
// and audio token and the text prefix, using relative rotations for the
// text keys. This is the monolithic reference the decompositions must
// reproduce.
Vector monolithic_attention(std::size_t t_index, const TokenSequence& seq,
                            const ProjectionWeights& w,
                            const AttentionConfig& config,
                            OpCounter* counter = nullptr);

// Branches, each already multiplied by Wo. Empty modalities give zero.
Vector cross_attention_visual(std::size_t t_index, const TokenSequence& seq,
                              const ProjectionWeights& w,
                              const AttentionConfig& config,
                              OpCounter* counter = nullptr);
Vector cross_attention_audio(std::size_t t_index, const TokenSequence& seq,
                             const ProjectionWeights& w,
                             const AttentionConfig& config,
                             OpCounter* counter = nullptr);
Vector text_self_attention(std::size_t t_index, const TokenSequence& seq,
                           const ProjectionWeights& w,
                           const AttentionConfig& config,
                           OpCounter* counter = nullptr);

// XA(t, V) + XA(t, A) with position-free scores, whatever config.cross says.
Vector debiased_cross_attention(std::size_t t_index, const TokenSequence& seq,
                                const ProjectionWeights& w,
                                const AttentionConfig& config,
                                OpCounter* counter = nullptr);

// a_v XA(t, [V, A]) + a_t SA(t, T). Audio tokens, when present, join the
// visual side of the two-way split.
Vector decomposed_adaptive(std::size_t t_index, const TokenSequence& seq,
                           const ProjectionWeights& w,
                           const AttentionConfig& config,
                           OpCounter* counter = nullptr);

// XA(t, V) + XA(t, A) + SA(t, T), summed in that order.
Vector decomposed_fixed(std::size_t t_index, const TokenSequence& seq,
                        const ProjectionWeights& w,
                        const AttentionConfig& config,
                        OpCounter* counter = nullptr);

// Block self-attention over the tokens of one modality (visual or audio);
// returns one row per token of that modality.
Matrix block_self_attention(Modality m, const TokenSequence& seq,
                            const ProjectionWeights& w,
                            const AttentionConfig& config,
                            OpCounter* counter = nullptr);

inline Matrix diagonal_v2v(const TokenSequence& seq,
                           const ProjectionWeights& w,
                           const AttentionConfig& config,
                           OpCounter* counter = nullptr) {
  return block_self_attention(Modality::kVisual, seq, w, config, counter);
}

// Full layer: visual rows by block V2V, audio rows by per-chunk blocks,
// text rows by the decomposition selected in config.mix.
Matrix layer_forward(const TokenSequence& seq, const ProjectionWeights& w,
                     const AttentionConfig& config,
                     OpCounter* counter = nullptr);

struct WeightGradients {
  Matrix wq, wk, wv, wo;
  Matrix embeddings;
};

// Gradient of L = sum_t <upstream.row(i), decomposed_fixed(t)> where t runs
// over the text tokens in order and i is its rank among them.
WeightGradients decomposed_fixed_backward(const TokenSequence& seq,
                                          const ProjectionWeights& w,
                                          const AttentionConfig& config,
                                          const Matrix& upstream);

// Rows of decomposed_fixed for every text token.
Matrix decomposed_fixed_text_rows(const TokenSequence& seq,
                                  const ProjectionWeights& w,
                                  const AttentionConfig& config);

// Sampling contract between wall-clock time and token indices.
struct TokenTimeline {
  double fps = 1.0;
  std::int64_t visual_tokens_per_frame = 400;
  std::int64_t audio_tokens_per_second = 50;
  std::int64_t audio_sample_rate_hz = 16000;  // informational

  void validate() const;
};

struct TokenSpan {
  std::int64_t begin = 0;  // half-open
  std::int64_t end = 0;

  std::int64_t size() const { return end - begin; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct TimelineSpans {
  TokenSpan visual;
  TokenSpan audio;
};

std::int64_t frame_count(const TokenTimeline& tl, double duration_s);
std::int64_t visual_token_count(const TokenTimeline& tl, double duration_s);

TimelineSpans tokens_for_time(const TokenTimeline& tl, const TimeRange& range);
TimeRange time_for_visual_token(const TokenTimeline& tl, std::int64_t index);
TimeRange time_for_audio_token(const TokenTimeline& tl, std::int64_t index);

enum class V2VCost { kFull, kDiagonal };

// Closed-form number of visual self-attention score products for a video.
std::uint64_t op_count(const TokenTimeline& tl, double duration_s,
                       V2VCost mode);

struct SequenceShape {
  std::int64_t n_frames = 0;
  std::int64_t tokens_per_frame = 1;
  std::int64_t n_audio_chunks = 0;
  std::int64_t tokens_per_chunk = 1;
  std::int64_t n_text = 1;
};

// Random N(0,1) embeddings with positions 0..n-1 in layout order.
TokenSequence random_sequence(const SequenceShape& shape,
                              Eigen::Index d_model, std::uint64_t seed);

}  // namespace trkit::dattn

#endif  // TRKIT_DATTN_HPP_
