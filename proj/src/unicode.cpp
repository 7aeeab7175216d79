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

#include "csteval/unicode.hpp"

#include <algorithm>

#include "csteval/unicode_data.hpp"

namespace csteval::uni {

namespace {

constexpr uint32_t kReplacement = 0xFFFD;

// Hangul syllable composition constants (UAX #15 section 3.12).
constexpr uint32_t kSBase = 0xAC00;
constexpr uint32_t kLBase = 0x1100;
constexpr uint32_t kVBase = 0x1161;
constexpr uint32_t kTBase = 0x11A7;
constexpr uint32_t kLCount = 19;
constexpr uint32_t kVCount = 21;
constexpr uint32_t kTCount = 28;
constexpr uint32_t kNCount = kVCount * kTCount;
constexpr uint32_t kSCount = kLCount * kNCount;

bool range_contains(const CodepointRange* ranges, std::size_t n, uint32_t cp) {
  const CodepointRange* end = ranges + n;
  auto it = std::upper_bound(ranges, end, cp, [](uint32_t v, const CodepointRange& r) {
    return v < r.lo;
  });
  return it != ranges && cp <= (it - 1)->hi;
}

const DecompositionEntry* find_decomposition(uint32_t cp) {
  const DecompositionEntry* end = kDecompositions + kDecompositionCount;
  auto it = std::lower_bound(kDecompositions, end, cp,
                             [](const DecompositionEntry& e, uint32_t v) { return e.cp < v; });
  return (it != end && it->cp == cp) ? it : nullptr;
}

uint32_t find_composition(uint32_t first, uint32_t second) {
  const CompositionEntry* end = kCompositions + kCompositionCount;
  auto it = std::lower_bound(
      kCompositions, end, std::pair<uint32_t, uint32_t>{first, second},
      [](const CompositionEntry& e, const std::pair<uint32_t, uint32_t>& key) {
        return e.first != key.first ? e.first < key.first : e.second < key.second;
      });
  return (it != end && it->first == first && it->second == second) ? it->composed : 0;
}

void decompose_into(uint32_t cp, std::vector<uint32_t>& out) {
  if (cp >= kSBase && cp < kSBase + kSCount) {
    uint32_t index = cp - kSBase;
    out.push_back(kLBase + index / kNCount);
    out.push_back(kVBase + (index % kNCount) / kTCount);
    if (index % kTCount != 0) out.push_back(kTBase + index % kTCount);
    return;
  }
  if (const DecompositionEntry* e = find_decomposition(cp)) {
    decompose_into(e->first, out);
    if (e->second != 0) decompose_into(e->second, out);
    return;
  }
  out.push_back(cp);
}

}  // namespace

std::vector<uint32_t> decode_utf8(std::string_view text) {
  std::vector<uint32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    uint8_t b0 = static_cast<uint8_t>(text[i]);
    uint32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > text.size()) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      uint8_t b = static_cast<uint8_t>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    if (ok) {
      if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
          (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
        ok = false;
      }
    }
    if (!ok) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(const std::vector<uint32_t>& codepoints) {
  std::string out;
  out.reserve(codepoints.size());
  for (uint32_t cp : codepoints) append_utf8(out, cp);
  return out;
}

bool is_valid_utf8(std::string_view text) {
  std::vector<uint32_t> cps = decode_utf8(text);
  return encode_utf8(cps) == text;
}

uint8_t combining_class(uint32_t cp) {
  const CombiningClassEntry* end = kCombiningClasses + kCombiningClassCount;
  auto it = std::lower_bound(kCombiningClasses, end, cp,
                             [](const CombiningClassEntry& e, uint32_t v) { return e.cp < v; });
  return (it != end && it->cp == cp) ? it->ccc : 0;
}

std::vector<uint32_t> to_nfc(const std::vector<uint32_t>& codepoints) {
  // 1. Full canonical decomposition.
  std::vector<uint32_t> buf;
  buf.reserve(codepoints.size());
  for (uint32_t cp : codepoints) decompose_into(cp, buf);

  // 2. Canonical ordering of combining marks (stable bubble pass).
  for (std::size_t i = 1; i < buf.size(); ++i) {
    uint8_t ccc = combining_class(buf[i]);
    if (ccc == 0) continue;
    std::size_t j = i;
    while (j > 0) {
      uint8_t prev = combining_class(buf[j - 1]);
      if (prev == 0 || prev <= ccc) break;
      std::swap(buf[j - 1], buf[j]);
      --j;
    }
  }

  // 3. Canonical composition.
  std::vector<uint32_t> out;
  out.reserve(buf.size());
  int last_starter = -1;
  uint8_t last_ccc = 0;
  for (uint32_t cp : buf) {
    uint8_t ccc = combining_class(cp);
    if (last_starter >= 0) {
      uint32_t starter = out[static_cast<std::size_t>(last_starter)];
      bool blocked = last_ccc != 0 && last_ccc >= ccc;
      if (!blocked) {
        uint32_t composed = 0;
        if (starter >= kLBase && starter < kLBase + kLCount && cp >= kVBase &&
            cp < kVBase + kVCount) {
          composed = kSBase + ((starter - kLBase) * kVCount + (cp - kVBase)) * kTCount;
        } else if (starter >= kSBase && starter < kSBase + kSCount &&
                   (starter - kSBase) % kTCount == 0 && cp > kTBase && cp < kTBase + kTCount) {
          composed = starter + (cp - kTBase);
        } else {
          composed = find_composition(starter, cp);
        }
        if (composed != 0) {
          out[static_cast<std::size_t>(last_starter)] = composed;
          continue;
        }
      }
    }
    if (ccc == 0) {
      last_starter = static_cast<int>(out.size());
      last_ccc = 0;
    } else {
      last_ccc = ccc;
    }
    out.push_back(cp);
  }
  return out;
}

std::string to_nfc(std::string_view text) {
  return encode_utf8(to_nfc(decode_utf8(text)));
}

bool is_letter(uint32_t cp) { return range_contains(kLetters, kLettersCount, cp); }

bool is_digit(uint32_t cp) { return range_contains(kDecimalDigits, kDecimalDigitsCount, cp); }

bool is_whitespace(uint32_t cp) { return range_contains(kWhitespace, kWhitespaceCount, cp); }

bool is_pictographic(uint32_t cp) {
  return range_contains(kPictographic, kPictographicCount, cp);
}

bool is_arabic(uint32_t cp) {
  return (cp >= 0x0600 && cp <= 0x06FF) || (cp >= 0x0750 && cp <= 0x077F) ||
         (cp >= 0x08A0 && cp <= 0x08FF) || (cp >= 0xFB50 && cp <= 0xFDFF) ||
         (cp >= 0xFE70 && cp <= 0xFEFF);
}

bool is_basic_latin_letter(uint32_t cp) {
  return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
}

uint32_t to_lower_latin(uint32_t cp) {
  const CaseFoldEntry* end = kLatinLowercase + kLatinLowercaseCount;
  auto it = std::lower_bound(kLatinLowercase, end, cp,
                             [](const CaseFoldEntry& e, uint32_t v) { return e.cp < v; });
  return (it != end && it->cp == cp) ? it->lower : cp;
}

}  // namespace csteval::uni
