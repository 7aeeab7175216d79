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

#ifndef CSTEVAL_UNICODE_HPP_
#define CSTEVAL_UNICODE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace csteval::uni {

// UTF-8 <-> codepoint conversion. Invalid byte sequences decode to U+FFFD,
// one replacement per bogus byte, so decoding is total.
std::vector<uint32_t> decode_utf8(std::string_view text);
std::string encode_utf8(const std::vector<uint32_t>& codepoints);
void append_utf8(std::string& out, uint32_t cp);

bool is_valid_utf8(std::string_view text);

// Canonical composition (NFC) per UAX #15, including Hangul.
std::vector<uint32_t> to_nfc(const std::vector<uint32_t>& codepoints);
std::string to_nfc(std::string_view text);

uint8_t combining_class(uint32_t cp);

bool is_letter(uint32_t cp);
bool is_digit(uint32_t cp);
bool is_whitespace(uint32_t cp);
bool is_pictographic(uint32_t cp);

// Arabic script blocks (Arabic, Supplement, Extended-A/B, presentation forms).
bool is_arabic(uint32_t cp);
// ASCII A-Z / a-z.
bool is_basic_latin_letter(uint32_t cp);

// Simple lowercase mapping restricted to the Latin blocks; identity elsewhere.
uint32_t to_lower_latin(uint32_t cp);

}  // namespace csteval::uni

#endif  // CSTEVAL_UNICODE_HPP_
