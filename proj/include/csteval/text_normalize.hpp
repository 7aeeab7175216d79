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

#ifndef CSTEVAL_TEXT_NORMALIZE_HPP_
#define CSTEVAL_TEXT_NORMALIZE_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace csteval {

// Text cleanup applied to corpus sides, ASR transcripts and hypotheses before
// scoring: NFC, URL / emoticon / annotation removal, Latin lowercasing and
// whitespace collapsing. The whole pass is idempotent.
struct NormalizationConfig {
  // Regex patterns for corpus-specific annotations, removed repeatedly until
  // no match remains. Defaults cover bracketed spans such as "[laughter]".
  std::vector<std::string> annotation_patterns{R"(\[[^\][]*\])", R"(<[^><]*>)"};
  bool strip_urls = true;
  bool strip_emoticons = true;
  bool lowercase_latin = true;
  bool collapse_whitespace = true;
  std::string unicode_form = "NFC";  // only NFC is supported

  bool operator==(const NormalizationConfig&) const = default;
};

std::string normalize_text(std::string_view text, const NormalizationConfig& config);

// Whitespace tokenization of an already-normalized string.
std::vector<std::string> whitespace_tokens(std::string_view text);

}  // namespace csteval

#endif  // CSTEVAL_TEXT_NORMALIZE_HPP_
