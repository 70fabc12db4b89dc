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

// Rule-based cleanup of generated (query, time ranges, confidence) triples
// and a lexical query-format classifier.

#ifndef TRKIT_POSTPROC_HPP_
#define TRKIT_POSTPROC_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trkit/intervals.hpp"
#include "trkit/metrics.hpp"

namespace trkit::postproc {

enum class CandidateSource { kCaption, kSubtitle, kMixed };

std::string_view to_string(CandidateSource s);
CandidateSource parse_candidate_source(std::string_view name);

struct CandidateQuery {
  std::string query_text;
  std::vector<TimeRange> ranges;
  double confidence = 1.0;
  CandidateSource source = CandidateSource::kCaption;
};

enum class DropReason {
  kLowConfidence,
  kTooGeneral,
  kMachineStyle,
  kEmptyAfterMerge,
};

std::string_view to_string(DropReason r);

struct DroppedQuery {
  CandidateQuery query;  // as received
  DropReason reason;
};

struct FilterReport {
  std::vector<CandidateQuery> kept;  // ranges merged
  std::vector<DroppedQuery> dropped;
};

std::vector<std::string> default_blocklist();

struct FilterConfig {
  double merge_gap_s = 0.5;
  double min_confidence = 0.9;
  std::size_t max_ranges = 10;
  std::vector<std::string> blocklist = default_blocklist();
};

// Replaces the ranges with their normalization under gap_s.
CandidateQuery merge_rule(const CandidateQuery& q, double gap_s = 0.5);

// Each rule returns true to keep the query.
bool confidence_rule(const CandidateQuery& q, double threshold = 0.9);
bool generality_rule(const CandidateQuery& q, std::size_t max_ranges = 10);
// Phrase-level, case-insensitive match against each blocklist entry.
bool style_rule(const CandidateQuery& q, std::span<const std::string> blocklist);

// Merge, then confidence, generality and style in that order. A query is
// dropped with the first rule it fails.
FilterReport pipeline(std::span<const CandidateQuery> candidates,
                      const FilterConfig& config = {});

struct FormatThresholds {
  std::size_t keyword_max_words = 4;
  std::size_t sentence_min_words = 8;
};

// sentence: >= sentence_min_words words with a finite verb or terminal
//           punctuation;
// keyword:  <= keyword_max_words words, no finite verb, no function words;
// phrase:   everything else.
// Throws InvalidArgumentError for text without words.
QueryFormat classify_format(std::string_view text,
                            const FormatThresholds& thresholds = {});

}  // namespace trkit::postproc

#endif  // TRKIT_POSTPROC_HPP_
