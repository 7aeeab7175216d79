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

#include <random>
#include <string>
#include <vector>

#include "csteval/text_normalize.hpp"
#include "csteval/unicode.hpp"
#include "doctest.h"

using namespace csteval;

TEST_CASE("normalization strips urls, emoji, and case in one pass") {
  NormalizationConfig config;
  CHECK(normalize_text("Check THIS http://x.co 😀  now", config) == "check this now");
  CHECK(normalize_text("see www.example.com/page?q=1 please", config) == "see please");
  CHECK(normalize_text("HTTPS://UPPER.example/Path stays gone", config) == "stays gone");
}

TEST_CASE("annotation spans are removed to a fixed point") {
  NormalizationConfig config;
  CHECK(normalize_text("قال [laughter] خلاص", config) == "قال خلاص");
  CHECK(normalize_text("<noise> هو <overlap> جه", config) == "هو جه");
  // Removing the inner span exposes a new well-formed outer span.
  CHECK(normalize_text("a [x[y]z] b", config) == "a b");
  SUBCASE("custom patterns replace the defaults") {
    config.annotation_patterns = {R"(\{[^}]*\})"};
    CHECK(normalize_text("keep [this] but {not this}", config) == "keep [this] but");
  }
}

TEST_CASE("ascii emoticons and emoji sequences disappear") {
  NormalizationConfig config;
  CHECK(normalize_text("nice :) really :-D good", config) == "nice really good");
  // Skin-tone modifier and ZWJ ride along with their pictographs.
  CHECK(normalize_text("ok 👍🏽 done", config) == "ok done");
  CHECK(normalize_text("family 👩‍👧 here", config) == "family here");
  SUBCASE("emoticon stripping can be disabled") {
    config.strip_emoticons = false;
    CHECK(normalize_text("nice :) really", config) == "nice :) really");
  }
}

TEST_CASE("latin lowercases while arabic is untouched") {
  NormalizationConfig config;
  CHECK(normalize_text("Meeting مهم Today", config) == "meeting مهم today");
  SUBCASE("lowercasing can be disabled") {
    config.lowercase_latin = false;
    CHECK(normalize_text("Meeting مهم Today", config) == "Meeting مهم Today");
  }
}

TEST_CASE("whitespace collapses and trims") {
  NormalizationConfig config;
  CHECK(normalize_text("  a\t\tb \n c  ", config) == "a b c");
  CHECK(normalize_text(" x  y", config) == "x y");
  CHECK(normalize_text("   ", config) == "");
  CHECK(normalize_text("", config) == "");
}

TEST_CASE("output is nfc") {
  NormalizationConfig config;
  std::string decomposed = "cafe";
  decomposed += "\xCC\x81";  // combining acute
  CHECK(normalize_text(decomposed, config) == "café");
}

TEST_CASE("normalization is idempotent on adversarial strings") {
  NormalizationConfig config;
  const std::string cases[] = {
      "plain",
      "[a[b]c]",
      "ht tp://x :-) :)",
      "😀😀😀",
      "A  B\tC",
      "x[y]z<w>q",
      "www.a.b www.c.d",
      ":-:-))",  // inner removal exposes a second emoticon; must cascade
  };
  for (const std::string& s : cases) {
    std::string once = normalize_text(s, config);
    CHECK(normalize_text(once, config) == once);
  }
}

TEST_CASE("normalization is idempotent on random soup") {
  NormalizationConfig config;
  std::mt19937 rng(23);
  const std::vector<std::string> atoms = {
      "a",  "B",    "م",  "ح",   " ",    "\t", "[", "]",  "<",  ">",
      ":",  ")",    "(",  "-",   "http", "://", "w", "ww", ".",  "co",
      "😀", "👍🏽", "é",  "e\xCC\x81", "5",  "٥",  "_", "!",  "x",  "D",
  };
  std::uniform_int_distribution<int> len(0, 16);
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    int n = len(rng);
    for (int k = 0; k < n; ++k) s += atoms[rng() % atoms.size()];
    std::string once = normalize_text(s, config);
    std::string twice = normalize_text(once, config);
    CHECK(twice == once);
  }
}

TEST_CASE("whitespace_tokens splits on unicode whitespace") {
  CHECK(whitespace_tokens("a b  c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(whitespace_tokens("").empty());
  CHECK(whitespace_tokens("  ").empty());
  CHECK(whitespace_tokens("واحد اتنين") == std::vector<std::string>{"واحد", "اتنين"});
  CHECK(whitespace_tokens("x y") == std::vector<std::string>{"x", "y"});
}
