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

#include "trkit/parsers.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "trkit/error.hpp"

namespace trkit {
namespace {

enum class TokenKind {
  kNumber,
  kJoiner,   // range separator: - – — ~ --> to
  kListSep,  // , ; newline
  kOpen,     // [ (
  kClose,    // ] )
  kWord,
  kPunct,
};

struct Token {
  TokenKind kind;
  std::size_t begin = 0;  // byte offsets into the source text
  std::size_t end = 0;
  char sep = 0;  // the separator byte, for kListSep
  // kNumber only.
  double seconds = 0.0;
  bool is_integer = false;
  std::int64_t integer = 0;
  bool valid = true;  // false for malformed clock values like 1:75
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool is_word_char(char c) {
  return is_alpha(c) || is_digit(c) || c == '_' || c == '\'';
}
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

constexpr std::array<std::string_view, 5> kSecondUnits = {
    "s", "sec", "secs", "second", "seconds"};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (is_space(c)) {
        ++pos_;
      } else if (is_digit(c)) {
        tokens.push_back(number());
      } else if (is_alpha(c)) {
        tokens.push_back(word());
      } else {
        tokens.push_back(symbol());
      }
    }
    return tokens;
  }

 private:
  char at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

  std::size_t digits(std::size_t i) const {
    while (i < text_.size() && is_digit(text_[i])) ++i;
    return i;
  }

  Token number() {
    Token t{TokenKind::kNumber};
    t.begin = pos_;
    std::vector<std::string_view> groups;
    std::size_t i = pos_;
    for (;;) {
      const std::size_t j = digits(i);
      groups.push_back(text_.substr(i, j - i));
      i = j;
      if (at(i) == ':' && is_digit(at(i + 1))) {
        ++i;
        continue;
      }
      break;
    }
    std::string_view fraction;
    if (at(i) == '.' && is_digit(at(i + 1))) {
      const std::size_t j = digits(i + 1);
      fraction = text_.substr(i + 1, j - i - 1);
      i = j;
    } else if (groups.size() > 1 && at(i) == ',' && is_digit(at(i + 1)) &&
               digits(i + 1) == i + 4) {
      // Subtitle-style milliseconds, 00:01:05,250.
      fraction = text_.substr(i + 1, 3);
      i += 4;
    }

    // Digits glued to letters (1080p, 4k, 3rd) form a word, except for a
    // seconds unit such as "10s" or "10sec".
    if (is_alpha(at(i))) {
      std::size_t j = i;
      while (j < text_.size() && is_word_char(text_[j])) ++j;
      const std::string_view suffix = text_.substr(i, j - i);
      const bool unit = std::any_of(
          kSecondUnits.begin(), kSecondUnits.end(),
          [&](std::string_view u) { return iequals(u, suffix); });
      if (!unit) {
        pos_ = j;
        Token w{TokenKind::kWord};
        w.begin = t.begin;
        w.end = j;
        return w;
      }
      i = j;
    } else {
      // Detached unit: "10 seconds".
      std::size_t j = i;
      while (is_space(at(j))) ++j;
      std::size_t k = j;
      while (k < text_.size() && is_alpha(text_[k])) ++k;
      const std::string_view suffix = text_.substr(j, k - j);
      if (k > j && !is_word_char(at(k)) &&
          std::any_of(kSecondUnits.begin(), kSecondUnits.end(),
                      [&](std::string_view u) { return iequals(u, suffix); })) {
        i = k;
      }
    }
    pos_ = i;
    t.end = i;
    evaluate(t, groups, fraction);
    return t;
  }

  static void evaluate(Token& t, const std::vector<std::string_view>& groups,
                       std::string_view fraction) {
    if (groups.size() > 3) {
      t.valid = false;
      return;
    }
    std::array<double, 3> fields{};
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].size() > 15) {
        t.valid = false;
        return;
      }
      std::int64_t v = 0;
      std::from_chars(groups[g].data(), groups[g].data() + groups[g].size(), v);
      fields[g] = static_cast<double>(v);
      if (groups.size() == 1) t.integer = v;
    }
    double frac = 0.0;
    if (!fraction.empty()) {
      std::string buf = "0.";
      buf.append(fraction.substr(0, std::min<std::size_t>(fraction.size(), 15)));
      std::from_chars(buf.data(), buf.data() + buf.size(), frac);
    }
    t.is_integer = groups.size() == 1 && fraction.empty();
    switch (groups.size()) {
      case 1:
        if (fraction.empty()) {
          t.seconds = fields[0];
        } else {
          // Parse the literal as a whole so "15.3" is the double nearest 15.3.
          std::string buf(groups[0]);
          buf += '.';
          buf.append(fraction.substr(0, std::min<std::size_t>(fraction.size(), 15)));
          std::from_chars(buf.data(), buf.data() + buf.size(), t.seconds);
        }
        break;
      case 2:
        t.valid = fields[1] < 60.0;
        t.seconds = fields[0] * 60.0 + fields[1] + frac;
        break;
      case 3:
        t.valid = fields[1] < 60.0 && fields[2] < 60.0;
        t.seconds = fields[0] * 3600.0 + fields[1] * 60.0 + fields[2] + frac;
        break;
    }
    if (!std::isfinite(t.seconds)) t.valid = false;
  }

  Token word() {
    Token t{TokenKind::kWord};
    t.begin = pos_;
    while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
    t.end = pos_;
    if (iequals(text_.substr(t.begin, t.end - t.begin), "to")) {
      t.kind = TokenKind::kJoiner;
    }
    return t;
  }

  Token symbol() {
    Token t{TokenKind::kPunct};
    t.begin = pos_;
    const char c = text_[pos_];
    std::size_t len = 1;
    if (c == '-') {
      t.kind = TokenKind::kJoiner;
      if (text_.substr(pos_, 3) == "-->") len = 3;
    } else if (c == '~') {
      t.kind = TokenKind::kJoiner;
    } else if (c == ',' || c == ';' || c == '\n') {
      t.kind = TokenKind::kListSep;
      t.sep = c;
    } else if (c == '[' || c == '(') {
      t.kind = TokenKind::kOpen;
    } else if (c == ']' || c == ')') {
      t.kind = TokenKind::kClose;
    } else if (text_.substr(pos_, 3) == "\xE2\x80\x93" ||
               text_.substr(pos_, 3) == "\xE2\x80\x94") {
      t.kind = TokenKind::kJoiner;  // en dash, em dash
      len = 3;
    } else if (static_cast<unsigned char>(c) >= 0x80) {
      // Keep multi-byte sequences together so warnings stay valid UTF-8.
      while (pos_ + len < text_.size() &&
             (static_cast<unsigned char>(text_[pos_ + len]) & 0xC0) == 0x80) {
        ++len;
      }
      t.kind = TokenKind::kWord;
    }
    pos_ += len;
    t.end = pos_;
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct RawRange {
  double start = 0.0;
  double end = 0.0;
  std::size_t first_token = 0;
};

bool is_number(const std::vector<Token>& tokens, std::size_t i) {
  return i < tokens.size() && tokens[i].kind == TokenKind::kNumber &&
         tokens[i].valid;
}

bool is_kind(const std::vector<Token>& tokens, std::size_t i, TokenKind k) {
  return i < tokens.size() && tokens[i].kind == k;
}

// Tokens that carry no content of their own: brackets and sentence
// punctuation around an otherwise well-formed answer.
bool is_benign(std::string_view text, const Token& t) {
  switch (t.kind) {
    case TokenKind::kListSep:
    case TokenKind::kOpen:
    case TokenKind::kClose:
      return true;
    case TokenKind::kPunct: {
      const char c = text[t.begin];
      return c == '.' || c == ':' || c == '!' || c == '?' || c == '"' ||
             c == '\'' || c == '`' || c == '*';
    }
    default:
      return false;
  }
}

std::string quote_fragment(std::string_view text, std::size_t begin,
                           std::size_t end) {
  constexpr std::size_t kMax = 80;
  std::string_view frag = text.substr(begin, end - begin);
  std::string out(frag.substr(0, kMax));
  for (char& c : out) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  if (frag.size() > kMax) out += "...";
  return out;
}

// Groups unconsumed, non-benign tokens into contiguous fragments.
void warn_ignored(std::string_view text, const std::vector<Token>& tokens,
                  const std::vector<bool>& consumed,
                  std::vector<std::string>& warnings) {
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (consumed[i] || is_benign(text, tokens[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < tokens.size() && !consumed[j + 1] &&
           tokens[j + 1].kind != TokenKind::kListSep) {
      ++j;
    }
    // Trim trailing benign punctuation from the quoted fragment.
    std::size_t last = j;
    while (last > i && is_benign(text, tokens[last])) --last;
    const Token& first_tok = tokens[i];
    if (first_tok.kind == TokenKind::kNumber && i == last) {
      warnings.push_back(fmt::format(
          "unpaired time value '{}'",
          quote_fragment(text, first_tok.begin, first_tok.end)));
    } else {
      warnings.push_back(fmt::format(
          "ignored text '{}'",
          quote_fragment(text, first_tok.begin, tokens[last].end)));
    }
    i = j + 1;
  }
}

// Matches `a <joiner> b` and bracketed `[a, b]` pairs.
std::vector<RawRange> match_ranges(const std::vector<Token>& tokens,
                                   std::vector<bool>& consumed,
                                   bool integers_only) {
  auto usable = [&](std::size_t i) {
    return is_number(tokens, i) && (!integers_only || tokens[i].is_integer);
  };
  std::vector<RawRange> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (usable(i) && is_kind(tokens, i + 1, TokenKind::kJoiner) &&
        usable(i + 2)) {
      out.push_back({tokens[i].seconds, tokens[i + 2].seconds, i});
      consumed[i] = consumed[i + 1] = consumed[i + 2] = true;
      i += 3;
      continue;
    }
    if (!integers_only && is_kind(tokens, i, TokenKind::kOpen) &&
        usable(i + 1) && is_kind(tokens, i + 2, TokenKind::kListSep) &&
        tokens[i + 2].sep == ',' && usable(i + 3) &&
        is_kind(tokens, i + 4, TokenKind::kClose)) {
      out.push_back({tokens[i + 1].seconds, tokens[i + 3].seconds, i + 1});
      for (std::size_t k = i; k <= i + 4; ++k) consumed[k] = true;
      i += 5;
      continue;
    }
    ++i;
  }
  return out;
}

}  // namespace

std::vector<FrameRange> parse_frame_ranges(std::string_view text) {
  const std::vector<Token> tokens = Lexer(text).run();
  std::vector<bool> consumed(tokens.size(), false);
  std::vector<RawRange> pairs = match_ranges(tokens, consumed, true);

  // Standalone integers become single-frame ranges; merge them back into
  // source order with the pairs.
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!consumed[i] && is_number(tokens, i) && tokens[i].is_integer) {
      pairs.push_back({tokens[i].seconds, tokens[i].seconds, i});
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const RawRange& a, const RawRange& b) {
              return a.first_token < b.first_token;
            });
  if (pairs.empty()) {
    throw ParseError("no frame index found", std::string(text));
  }
  std::vector<FrameRange> out;
  out.reserve(pairs.size());
  for (const RawRange& p : pairs) {
    auto a = static_cast<std::int64_t>(p.start);
    auto b = static_cast<std::int64_t>(p.end);
    if (a > b) std::swap(a, b);
    out.push_back({a, b});
  }
  return out;
}

RangeSet frames_to_time(std::span<const FrameRange> frames,
                        const FrameMapping& mapping) {
  if (mapping.index_base != 0 && mapping.index_base != 1) {
    throw InvalidArgumentError(
        fmt::format("frame index base must be 0 or 1, got {}",
                    mapping.index_base));
  }
  if (mapping.n_frames && *mapping.n_frames <= 0) {
    throw InvalidArgumentError("n_frames must be positive");
  }
  if (mapping.video_duration_s && !(*mapping.video_duration_s > 0.0)) {
    throw InvalidArgumentError("video duration must be positive");
  }
  double stride = 0.0;
  if (mapping.sampling == FrameSampling::kDense) {
    if (!(mapping.fps > 0.0) || !std::isfinite(mapping.fps)) {
      throw InvalidArgumentError(
          fmt::format("fps must be positive, got {}", mapping.fps));
    }
    stride = 1.0 / mapping.fps;
  } else {
    if (!mapping.n_frames || !mapping.video_duration_s) {
      throw InvalidArgumentError(
          "uniform sampling needs both n_frames and the video duration");
    }
    stride = *mapping.video_duration_s /
             static_cast<double>(*mapping.n_frames);
  }

  std::vector<std::int64_t> bad;
  auto check = [&](std::int64_t index) {
    const std::int64_t k = index - mapping.index_base;
    if (k < 0 || (mapping.n_frames && k >= *mapping.n_frames)) {
      bad.push_back(index);
    }
  };
  for (const FrameRange& f : frames) {
    if (f.first > f.last) {
      throw InvalidArgumentError(
          fmt::format("reversed frame range {}-{}", f.first, f.last));
    }
    check(f.first);
    if (f.last != f.first) check(f.last);
  }
  if (!bad.empty()) {
    throw InvalidArgumentError(
        fmt::format("frame indices out of range: {}", fmt::join(bad, ", ")));
  }

  // Dense mode divides by fps directly so that i/fps is correctly rounded.
  auto time_of = [&](std::int64_t k) {
    const auto x = static_cast<double>(k);
    return mapping.sampling == FrameSampling::kDense ? x / mapping.fps
                                                     : x * stride;
  };
  std::vector<TimeRange> out;
  out.reserve(frames.size());
  for (const FrameRange& f : frames) {
    const std::int64_t a = f.first - mapping.index_base;
    const std::int64_t b = f.last - mapping.index_base;
    double start = time_of(a);
    double end = mapping.stride_coverage ? time_of(b + 1) : time_of(b);
    if (mapping.video_duration_s) {
      const double d = *mapping.video_duration_s;
      if (start >= d) continue;
      end = std::min(end, d);
    }
    out.push_back({start, end});
  }
  return RangeSet::normalize(out, 0.0);
}

ParseOutcome parse_timestamps(std::string_view text,
                              std::optional<double> video_duration_s) {
  if (video_duration_s && !(*video_duration_s > 0.0)) {
    throw InvalidArgumentError("video duration must be positive");
  }
  const std::vector<Token> tokens = Lexer(text).run();
  std::vector<bool> consumed(tokens.size(), false);
  const std::vector<RawRange> raw = match_ranges(tokens, consumed, false);

  ParseOutcome outcome;
  if (raw.empty()) {
    const bool blank = std::all_of(text.begin(), text.end(), [](char c) {
      return is_space(c) || c == '\n';
    });
    if (blank) return outcome;
    throw ParseError("no time range found", std::string(text));
  }
  warn_ignored(text, tokens, consumed, outcome.warnings);

  std::vector<TimeRange> ranges;
  ranges.reserve(raw.size());
  for (RawRange r : raw) {
    if (r.start > r.end) {
      outcome.warnings.push_back(
          fmt::format("swapped reversed range {}-{}", r.start, r.end));
      std::swap(r.start, r.end);
    }
    if (video_duration_s) {
      const double d = *video_duration_s;
      if (r.start >= d && r.end > r.start) {
        outcome.warnings.push_back(fmt::format(
            "dropped range {}-{} beyond video end {}", r.start, r.end, d));
        continue;
      }
      if (r.end > d) {
        outcome.warnings.push_back(fmt::format(
            "clamped range end {} to video end {}", r.end, d));
        r.end = d;
      }
      if (r.start > d) {
        outcome.warnings.push_back(fmt::format(
            "dropped instant {} beyond video end {}", r.start, d));
        continue;
      }
    }
    ranges.push_back({r.start, r.end});
  }
  outcome.ranges = RangeSet::normalize(ranges, 0.0);
  return outcome;
}

std::string format_clock_ranges(const RangeSet& ranges) {
  auto clock = [](double t) {
    const auto s = static_cast<std::int64_t>(std::llround(t));
    return fmt::format("{:02}:{:02}", s / 60, s % 60);
  };
  std::string out;
  for (const TimeRange& r : ranges) {
    if (!out.empty()) out += ", ";
    out += clock(r.start_s) + "-" + clock(r.end_s);
  }
  return out;
}

}  // namespace trkit
