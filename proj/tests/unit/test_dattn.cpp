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

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trkit/error.hpp"

namespace trkit::dattn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SequenceShape shape_for(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SequenceShape s;
  s.n_frames = 1 + static_cast<std::int64_t>(rng() % 6);
  s.tokens_per_frame = 1 + static_cast<std::int64_t>(rng() % 4);
  s.n_audio_chunks = static_cast<std::int64_t>(rng() % 4);
  s.tokens_per_chunk = 1 + static_cast<std::int64_t>(rng() % 3);
  s.n_text = 1 + static_cast<std::int64_t>(rng() % 12);
  return s;
}

AttentionConfig config(MixMode mix) {
  AttentionConfig c;
  c.mix = mix;
  return c;
}

TEST(AlphaWeights, ComplementAndSentinels) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 30.0);
  for (int i = 0; i < 10000; ++i) {
    const AlphaWeights a = alpha_weights(n(rng), n(rng));
    EXPECT_LE(std::abs(a.alpha_v + a.alpha_t - 1.0), 1e-15);
    EXPECT_GE(a.alpha_v, 0.0);
    EXPECT_GE(a.alpha_t, 0.0);
  }
  EXPECT_EQ(alpha_weights(-kInf, 3.0).alpha_v, 0.0);
  EXPECT_EQ(alpha_weights(-kInf, 3.0).alpha_t, 1.0);
  EXPECT_EQ(alpha_weights(3.0, -kInf).alpha_v, 1.0);
  EXPECT_EQ(alpha_weights(kInf, 3.0).alpha_v, 1.0);
  EXPECT_EQ(alpha_weights(3.0, kInf).alpha_t, 1.0);
  EXPECT_THROW(alpha_weights(-kInf, -kInf), NumericError);
  EXPECT_THROW(alpha_weights(std::nan(""), 0.0), NumericError);
}

TEST(AlphaWeights, IsSigmoidOfDifference) {
  for (double d : {-5.0, -0.3, 0.0, 0.7, 4.0}) {
    EXPECT_NEAR(alpha_weights(d + 2.0, 2.0).alpha_v, 1.0 / (1.0 + std::exp(-d)),
                1e-15);
  }
}

TEST(LogSumExp, StableForLargeLogits) {
  const std::vector<double> big = {700.0, 699.0, -700.0};
  EXPECT_NEAR(log_sum_exp(big), 700.0 + std::log1p(std::exp(-1.0)), 1e-12);
  EXPECT_EQ(log_sum_exp({}), -kInf);
  EXPECT_THROW(log_sum_exp(std::vector<double>{1.0, kInf}), NumericError);
}

TEST(ReferenceAttention, MatchesNaiveSoftmax) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Vector q(4);
  Matrix k(5, 4), v(5, 4);
  for (auto* m : {&k, &v}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = n(rng);
  }
  for (Eigen::Index i = 0; i < 4; ++i) q[i] = n(rng);
  Vector logits = k * q;
  Vector p = logits.array().exp();
  p /= p.sum();
  const Vector expect = v.transpose() * p;
  OpCounter c;
  EXPECT_LT((reference_attention(q, k, v, &c) - expect).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(c.score_ops, 5u);
}

TEST(Rotary, PreservesNormAndIsRelative) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Vector q(16), k(16);
  for (Eigen::Index i = 0; i < 16; ++i) {
    q[i] = n(rng);
    k[i] = n(rng);
  }
  Vector qr = q, kr = k, kd = k;
  apply_rotary(qr, 37.0, 10000.0);
  apply_rotary(kr, 52.0, 10000.0);
  apply_rotary(kd, 15.0, 10000.0);
  EXPECT_NEAR(qr.norm(), q.norm(), 1e-12);
  EXPECT_NEAR(qr.dot(kr), q.dot(kd), 1e-11);
  Vector odd(3);
  EXPECT_THROW(apply_rotary(odd, 1.0, 10000.0), InvalidArgumentError);
}

TEST(Kernels, MatchLongDoubleOracle) {
  for (int d : {8, 16, 32}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const TokenSequence seq = random_sequence(shape_for(seed), d, seed);
      const ProjectionWeights w = random_weights(d, seed + 100);
      for (std::size_t t = seq.offset(Modality::kText); t < seq.size(); ++t) {
        const auto causal = testing::oracle_attention(t, seq, w, false);
        const auto fixed = testing::oracle_attention(t, seq, w, true);
        const AttentionConfig ca = config(MixMode::kAdaptive);
        EXPECT_LT(testing::max_abs_diff(monolithic_attention(t, seq, w, ca), causal), 1e-12);
        EXPECT_LT(testing::max_abs_diff(decomposed_adaptive(t, seq, w, ca), causal), 1e-12);
        EXPECT_LT(testing::max_abs_diff(
                      decomposed_fixed(t, seq, w, config(MixMode::kFixed)), fixed),
                  1e-12);
      }
    }
  }
}

TEST(Kernels, FixedIsSumOfBranches) {
  const TokenSequence seq = random_sequence({2, 3, 2, 2, 4}, 8, 4);
  const ProjectionWeights w = random_weights(8, 5);
  const AttentionConfig c = config(MixMode::kFixed);
  for (std::size_t t = seq.offset(Modality::kText); t < seq.size(); ++t) {
    const Vector sum = cross_attention_visual(t, seq, w, c) +
                       cross_attention_audio(t, seq, w, c) +
                       text_self_attention(t, seq, w, c);
    EXPECT_EQ(decomposed_fixed(t, seq, w, c), sum);
    EXPECT_EQ(debiased_cross_attention(t, seq, w, c),
              Vector(cross_attention_visual(t, seq, w, c) +
                     cross_attention_audio(t, seq, w, c)));
  }
}

TEST(Kernels, VisionOnlyAndTextOnlyInputs) {
  const ProjectionWeights w = random_weights(8, 9);
  const TokenSequence no_visual = random_sequence({0, 1, 0, 1, 3}, 8, 1);
  const TokenSequence no_audio = random_sequence({3, 2, 0, 1, 3}, 8, 2);
  for (const TokenSequence* seq : {&no_visual, &no_audio}) {
    for (std::size_t t = seq->offset(Modality::kText); t < seq->size(); ++t) {
      const Vector a = decomposed_adaptive(t, *seq, w, config(MixMode::kAdaptive));
      const Vector f = decomposed_fixed(t, *seq, w, config(MixMode::kFixed));
      EXPECT_TRUE(a.allFinite());
      EXPECT_TRUE(f.allFinite());
      EXPECT_LT(testing::max_abs_diff(a, testing::oracle_attention(t, *seq, w, false)), 1e-12);
    }
  }
  const LseScores s = branch_scores(no_visual.offset(Modality::kText), no_visual, w,
                                    config(MixMode::kAdaptive));
  EXPECT_EQ(s.s_v, -kInf);
  EXPECT_EQ(s.s_a, -kInf);
  EXPECT_EQ(cross_attention_audio(no_audio.offset(Modality::kText), no_audio, w,
                                  config(MixMode::kFixed)),
            Vector::Zero(8));
}

TEST(Kernels, RejectsNonTextQueries) {
  const TokenSequence seq = random_sequence({2, 2, 0, 1, 2}, 8, 1);
  const ProjectionWeights w = random_weights(8, 1);
  EXPECT_THROW(decomposed_fixed(0, seq, w, {}), InvalidArgumentError);
  EXPECT_THROW(decomposed_fixed(seq.size(), seq, w, {}), InvalidArgumentError);
}

TEST(Debias, CrossBranchIgnoresVisualAndAudioPositions) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TokenSequence seq = random_sequence(shape_for(seed), 16, seed);
    const ProjectionWeights w = random_weights(16, seed);
    TokenSequence shifted = seq;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq.modality[i] != Modality::kText) shifted.position[i] += 1000;
    }
    AttentionConfig biased;
    biased.cross = CrossPositional::kBiased;
    bool biased_moved = false;
    for (std::size_t t = seq.offset(Modality::kText); t < seq.size(); ++t) {
      EXPECT_EQ(debiased_cross_attention(t, seq, w, {}),
                debiased_cross_attention(t, shifted, w, {}));
      EXPECT_EQ(decomposed_fixed(t, seq, w, {}), decomposed_fixed(t, shifted, w, {}));
      biased_moved |= monolithic_attention(t, seq, w, biased) !=
                      monolithic_attention(t, shifted, w, biased);
    }
    if (seq.offset(Modality::kText) > 0) EXPECT_TRUE(biased_moved) << seed;
  }
}

TEST(BlockV2V, LocalityAndGranularity) {
  const int d = 8;
  const TokenSequence seq = random_sequence({5, 3, 0, 1, 1}, d, 6);
  const ProjectionWeights w = random_weights(d, 6);
  AttentionConfig c;
  const Matrix base = diagonal_v2v(seq, w, c);

  TokenSequence poked = seq;
  poked.embeddings.row(4) *= -3.0;  // inside frame 1 (tokens 3..5)
  const Matrix after = diagonal_v2v(poked, w, c);
  for (Eigen::Index r = 0; r < 15; ++r) {
    if (r >= 3 && r < 6) {
      EXPECT_NE(after.row(r), base.row(r));
    } else {
      EXPECT_EQ(after.row(r), base.row(r));
    }
  }

  c.blocks = BlockGranularity::kPerToken;
  const Matrix per_token = diagonal_v2v(seq, w, c);
  const Matrix expect = seq.embeddings.topRows(15) * w.wv * w.wo;
  EXPECT_LT((per_token - expect).cwiseAbs().maxCoeff(), 1e-12);

  c.blocks = BlockGranularity::kFull;
  const Matrix full = diagonal_v2v(seq, w, c);
  EXPECT_NE(full.row(0), base.row(0));
}

TEST(BlockV2V, ScoreOpsScaleLinearlyVersusQuadratically) {
  const ProjectionWeights w = random_weights(4, 1);
  auto ops = [&](std::int64_t frames, BlockGranularity g) {
    const TokenSequence seq = random_sequence({frames, 4, 0, 1, 1}, 4, 2);
    AttentionConfig c;
    c.blocks = g;
    OpCounter counter;
    (void)diagonal_v2v(seq, w, c, &counter);
    return static_cast<double>(counter.score_ops);
  };
  EXPECT_DOUBLE_EQ(ops(256, BlockGranularity::kPerSegment) /
                       ops(128, BlockGranularity::kPerSegment), 2.0);
  EXPECT_DOUBLE_EQ(ops(256, BlockGranularity::kFull) /
                       ops(128, BlockGranularity::kFull), 4.0);
}

TEST(Stability, LargeLogitsStayFinite) {
  TokenSequence seq = random_sequence({2, 2, 1, 2, 3}, 8, 3);
  ProjectionWeights w = random_weights(8, 3);
  w.wq *= 60.0;
  w.wk *= 60.0;
  for (std::size_t t = seq.offset(Modality::kText); t < seq.size(); ++t) {
    EXPECT_TRUE(decomposed_adaptive(t, seq, w, {}).allFinite());
    EXPECT_TRUE(monolithic_attention(t, seq, w, {}).allFinite());
  }
  EXPECT_TRUE(layer_forward(seq, w, {}).allFinite());
}

TEST(Gradients, MatchCentralDifferences) {
  const int d = 8;
  const TokenSequence seq = random_sequence({2, 2, 1, 2, 3}, d, 11);
  const ProjectionWeights w = random_weights(d, 12);
  const AttentionConfig c = config(MixMode::kFixed);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n;
  Matrix upstream(3, d);
  for (Eigen::Index i = 0; i < upstream.size(); ++i) upstream.data()[i] = n(rng);

  auto loss = [&](const TokenSequence& s, const ProjectionWeights& p) {
    return (decomposed_fixed_text_rows(s, p, c).array() * upstream.array()).sum();
  };
  const WeightGradients g = decomposed_fixed_backward(seq, w, c, upstream);
  constexpr double h = 1e-5;
  auto rel = [](double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
  };

  const std::array<std::pair<Matrix ProjectionWeights::*, const Matrix*>, 4> params = {
      {{&ProjectionWeights::wq, &g.wq},
       {&ProjectionWeights::wk, &g.wk},
       {&ProjectionWeights::wv, &g.wv},
       {&ProjectionWeights::wo, &g.wo}}};
  double worst = 0.0;
  for (const auto& [member, grad] : params) {
    for (Eigen::Index i = 0; i < d * d; ++i) {
      ProjectionWeights plus = w, minus = w;
      (plus.*member).data()[i] += h;
      (minus.*member).data()[i] -= h;
      const double fd = (loss(seq, plus) - loss(seq, minus)) / (2 * h);
      worst = std::max(worst, rel(grad->data()[i], fd));
    }
  }
  EXPECT_LT(worst, 1e-6);

  double worst_x = 0.0;
  for (Eigen::Index i = 0; i < seq.embeddings.size(); ++i) {
    TokenSequence plus = seq, minus = seq;
    plus.embeddings.data()[i] += h;
    minus.embeddings.data()[i] -= h;
    const double fd = (loss(plus, w) - loss(minus, w)) / (2 * h);
    worst_x = std::max(worst_x, rel(g.embeddings.data()[i], fd));
  }
  EXPECT_LT(worst_x, 1e-6);
}

TEST(Timeline, OneHourAtFourHundredTokensPerFrame) {
  const TokenTimeline tl;
  EXPECT_EQ(frame_count(tl, 3600), 3600);
  EXPECT_EQ(visual_token_count(tl, 3600), 1440000);
  EXPECT_EQ(tokens_for_time(tl, {0, 3600}).visual.size(), 1440000);
  EXPECT_EQ(op_count(tl, 3600, V2VCost::kDiagonal), 3600ull * 400 * 400);
  EXPECT_EQ(op_count(tl, 3600, V2VCost::kFull), 1440000ull * 1440000ull);
}

TEST(Timeline, SpansAndInverse) {
  const TokenTimeline tl;
  const TimelineSpans s = tokens_for_time(tl, {2.5, 4.0});
  EXPECT_EQ(s.visual, (TokenSpan{800, 1600}));
  EXPECT_EQ(s.audio, (TokenSpan{125, 200}));
  EXPECT_EQ(tokens_for_time(tl, {3.0, 3.0}).visual.size(), 0);
  EXPECT_EQ(time_for_visual_token(tl, 401), (TimeRange{1.0, 2.0}));
  EXPECT_EQ(time_for_audio_token(tl, 50), (TimeRange{1.0, 1.02}));
  EXPECT_THROW(tokens_for_time(tl, {5.0, 4.0}), InvalidRangeError);
  TokenTimeline bad;
  bad.fps = 0;
  EXPECT_THROW(bad.validate(), InvalidArgumentError);
}

TEST(Saturation, MeanAlphaVisualGrowsWithVisualCount) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n;
  double previous = 0.0;
  for (int visual : {10, 100, 1000}) {
    double sum = 0.0;
    for (int seed = 0; seed < 200; ++seed) {
      std::vector<double> v(static_cast<std::size_t>(visual)), t(16);
      for (double& x : v) x = n(rng);
      for (double& x : t) x = n(rng);
      sum += alpha_weights(log_sum_exp(v), log_sum_exp(t)).alpha_v;
    }
    const double mean = sum / 200.0;
    EXPECT_GT(mean, previous) << visual;
    previous = mean;
  }
}

}  // namespace
}  // namespace trkit::dattn
