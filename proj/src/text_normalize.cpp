// Copyright 2026 The csteval Authors
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

#include "csteval/text_normalize.hpp"

#include <array>
#include <regex>

#include "csteval/unicode.hpp"

namespace csteval {

namespace {

const std::regex& url_pattern() {
  static const std::regex re(R"((https?://|www\.)\S+)", std::regex::icase);
  return re;
}

// Emoji modifiers and joiners that ride along with pictographic codepoints.
bool is_emoji_component(uint32_t cp) {
  return cp == 0x200D || cp == 0xFE0E || cp == 0xFE0F ||
         (cp >= 0x1F1E6 && cp <= 0x1F1FF) || (cp >= 0x1F3FB && cp <= 0x1F3FF);
}

constexpr std::array<std::string_view, 16> kAsciiEmoticons = {
    ":-)", ":-(", ":-D", ":-P", ";-)", ":'(", "^_^", "-_-",
    ":)",  ":(",  ":D",  ":P",  ";)",  ";(",  "xD",  "XD",
};

std::string strip_ascii_emoticons(std::string text) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::string_view emo : kAsciiEmoticons) {
      std::size_t pos;
      while ((pos = text.find(emo)) != std::string::npos) {
        text.erase(pos, emo.size());
        changed = true;
      }
    }
  }
  return text;
}

std::string strip_pictographic(std::string_view text) {
  std::vector<uint32_t> cps = uni::decode_utf8(text);
  std::vector<uint32_t> kept;
  kept.reserve(cps.size());
  for (uint32_t cp : cps) {
    if (uni::is_pictographic(cp) || is_emoji_component(cp)) continue;
    kept.push_back(cp);
  }
  return uni::encode_utf8(kept);
}

// Removes every match, rescanning until stable so that nested or
// newly-adjacent spans are caught too.
std::string remove_pattern_fixpoint(std::string text, const std::regex& re) {
  for (int pass = 0; pass < 64; ++pass) {
    std::string next = std::regex_replace(text, re, "");
    if (next == text) break;
    text = std::move(next);
  }
  return text;
}

std::string lowercase_latin(std::string_view text) {
  std::vector<uint32_t> cps = uni::decode_utf8(text);
  for (uint32_t& cp : cps) cp = uni::to_lower_latin(cp);
  return uni::encode_utf8(cps);
}

std::string collapse_whitespace(std::string_view text) {
  std::vector<uint32_t> cps = uni::decode_utf8(text);
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  bool seen_content = false;
  for (uint32_t cp : cps) {
    if (uni::is_whitespace(cp)) {
      pending_space = seen_content;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    seen_content = true;
    uni::append_utf8(out, cp);
  }
  return out;
}

std::string normalize_once(std::string text, const NormalizationConfig& config) {
  text = uni::to_nfc(text);
  if (config.strip_urls) text = remove_pattern_fixpoint(std::move(text), url_pattern());
  if (config.strip_emoticons) {
    text = strip_pictographic(text);
    text = strip_ascii_emoticons(std::move(text));
  }
  for (const std::string& pattern : config.annotation_patterns) {
    text = remove_pattern_fixpoint(std::move(text), std::regex(pattern));
  }
  if (config.lowercase_latin) text = lowercase_latin(text);
  text = uni::to_nfc(text);
  if (config.collapse_whitespace) text = collapse_whitespace(text);
  return text;
}

}  // namespace

std::string normalize_text(std::string_view text, const NormalizationConfig& config) {
  // Removal stages can juxtapose characters into new removable spans, so the
  // pass is iterated to a fixed point. Converges in one or two rounds.
  std::string current(text);
  for (int pass = 0; pass < 8; ++pass) {
    std::string next = normalize_once(current, config);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<uint32_t> cps = uni::decode_utf8(text);
  std::string current;
  for (uint32_t cp : cps) {
    if (uni::is_whitespace(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      uni::append_utf8(current, cp);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace csteval
