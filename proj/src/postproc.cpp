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

#include "trkit/postproc.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <fmt/format.h>

#include "trkit/error.hpp"

namespace trkit::postproc {

std::string_view to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::kCaption: return "caption";
    case CandidateSource::kSubtitle: return "subtitle";
    case CandidateSource::kMixed: return "mixed";
  }
  return "unknown";
}

CandidateSource parse_candidate_source(std::string_view name) {
  for (auto s : {CandidateSource::kCaption, CandidateSource::kSubtitle,
                 CandidateSource::kMixed}) {
    if (name == to_string(s)) return s;
  }
  throw SchemaError(fmt::format("unknown candidate source '{}'", name));
}

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::kLowConfidence: return "low_confidence";
    case DropReason::kTooGeneral: return "too_general";
    case DropReason::kMachineStyle: return "machine_style";
    case DropReason::kEmptyAfterMerge: return "empty_after_merge";
  }
  return "unknown";
}

std::vector<std::string> default_blocklist() {
  return {"the video concludes", "in the closing moments"};
}

CandidateQuery merge_rule(const CandidateQuery& q, double gap_s) {
  CandidateQuery out = q;
  out.ranges = RangeSet::normalize(q.ranges, gap_s).ranges();
  return out;
}

bool confidence_rule(const CandidateQuery& q, double threshold) {
  return !(q.confidence < threshold);
}

bool generality_rule(const CandidateQuery& q, std::size_t max_ranges) {
  return q.ranges.size() <= max_ranges;
}

namespace {

// Lower-cased words (letters, digits, apostrophes), in order.
std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '\'' || u >= 0x80) {
      cur += static_cast<char>(std::tolower(u));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

// " w1 w2 ... wn " so that substring search respects word boundaries.
std::string padded_phrase(std::string_view text) {
  std::string out = " ";
  for (const std::string& w : words_of(text)) {
    out += w;
    out += ' ';
  }
  return out;
}

bool contains(std::span<const std::string_view> set, std::string_view w) {
  return std::find(set.begin(), set.end(), w) != set.end();
}

constexpr std::array<std::string_view, 24> kFiniteVerbs = {
    "is",    "are",  "was",    "were",  "am",    "has",  "have",   "had",
    "does",  "do",   "did",    "can",   "could", "will", "would",  "shall",
    "should", "may", "might",  "must",  "isn't", "aren't", "wasn't", "don't"};

// Common words ending in -ed that are not past-tense forms.
constexpr std::array<std::string_view, 10> kNotVerbsEd = {
    "speed", "seed", "feed", "need", "breed", "bleed", "hundred", "sacred",
    "naked", "wicked"};

constexpr std::array<std::string_view, 40> kFunctionWords = {
    "a",     "an",    "the",   "in",     "on",    "at",    "of",   "with",
    "by",    "for",   "to",    "from",   "into",  "onto",  "over", "under",
    "and",   "or",    "but",   "his",    "her",   "their", "its",  "this",
    "that",  "these", "those", "while",  "during", "some", "he",   "she",
    "they",  "it",    "we",    "you",    "i",     "my",    "our",  "your"};

bool is_finite_verb(std::string_view w) {
  if (contains(kFiniteVerbs, w)) return true;
  return w.size() >= 5 && w.ends_with("ed") && !contains(kNotVerbsEd, w);
}

}  // namespace

bool style_rule(const CandidateQuery& q,
                std::span<const std::string> blocklist) {
  const std::string text = padded_phrase(q.query_text);
  for (const std::string& pattern : blocklist) {
    const std::string p = padded_phrase(pattern);
    if (p.size() <= 1) continue;  // blank pattern
    if (text.find(p) != std::string::npos) return false;
  }
  return true;
}

FilterReport pipeline(std::span<const CandidateQuery> candidates,
                      const FilterConfig& config) {
  FilterReport report;
  for (const CandidateQuery& q : candidates) {
    const CandidateQuery merged = merge_rule(q, config.merge_gap_s);
    if (merged.ranges.empty()) {
      report.dropped.push_back({q, DropReason::kEmptyAfterMerge});
    } else if (!confidence_rule(merged, config.min_confidence)) {
      report.dropped.push_back({q, DropReason::kLowConfidence});
    } else if (!generality_rule(merged, config.max_ranges)) {
      report.dropped.push_back({q, DropReason::kTooGeneral});
    } else if (!style_rule(merged, config.blocklist)) {
      report.dropped.push_back({q, DropReason::kMachineStyle});
    } else {
      report.kept.push_back(merged);
    }
  }
  return report;
}

QueryFormat classify_format(std::string_view text,
                            const FormatThresholds& thresholds) {
  const std::vector<std::string> words = words_of(text);
  if (words.empty()) {
    throw InvalidArgumentError("cannot classify a query without words");
  }
  const bool has_verb = std::any_of(words.begin(), words.end(),
                                    [](const std::string& w) {
                                      return is_finite_verb(w);
                                    });
  std::string_view trimmed = text;
  while (!trimmed.empty() &&
         std::isspace(static_cast<unsigned char>(trimmed.back()))) {
    trimmed.remove_suffix(1);
  }
  const bool terminal = !trimmed.empty() && (trimmed.back() == '.' ||
                                             trimmed.back() == '!' ||
                                             trimmed.back() == '?');
  if (words.size() >= thresholds.sentence_min_words && (has_verb || terminal)) {
    return QueryFormat::kSentence;
  }
  const bool has_function_word =
      std::any_of(words.begin(), words.end(), [](const std::string& w) {
        return contains(kFunctionWords, w);
      });
  if (words.size() <= thresholds.keyword_max_words && !has_verb &&
      !has_function_word) {
    return QueryFormat::kKeyword;
  }
  return QueryFormat::kPhrase;
}

}  // namespace trkit::postproc
