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

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "csteval/tokenizer.hpp"
#include "csteval/unicode.hpp"
#include "doctest.h"

using namespace csteval;

namespace {

std::string random_text(std::mt19937& rng) {
  // Codepoint pools spanning the scripts the corpus mixes, whitespace, the
  // private-use marker, and astral-plane emoji.
  static const std::vector<uint32_t> pool = {
      U'a', U'b',   U'z',    U'A',    0x0627, 0x0644, 0x062D, 0x0628, U' ',
      U' ', U'\t',  U'\n',   0x00E9,  0x4E2D, 0x1F600, 0x1F389, 0xE000, U'!',
      U'5', 0x0665, 0x200D,  0x00A0,  0x0301,
  };
  std::uniform_int_distribution<int> len(0, 24);
  std::vector<uint32_t> cps;
  int n = len(rng);
  for (int k = 0; k < n; ++k) cps.push_back(pool[rng() % pool.size()]);
  return uni::encode_utf8(cps);
}

}  // namespace

TEST_CASE("training merges the most frequent pair, greatest pair on ties") {
  TokenizerModel model = train_bpe({"aaab", "aaab"}, 4, /*byte_fallback=*/false);
  REQUIRE(model.merges().size() == 2);
  CHECK(model.merges()[0].left == "a");
  CHECK(model.merges()[0].right == "a");
  CHECK_FALSE(model.merges()[0].right_final);
  // After the first merge the counts of ("aa","a") and ("a","b</w>") tie at
  // two; the lexicographically greater pair wins.
  CHECK(model.merges()[1].left == "aa");
  CHECK(model.merges()[1].right == "a");
  CHECK_FALSE(model.merges()[1].right_final);
  CHECK(encode(model, "aaab").size() == 2);
  CHECK(decode(model, encode(model, "aaab")) == "aaab");
}

TEST_CASE("training stops when no pair is left") {
  TokenizerModel model = train_bpe({"ab"}, 100, /*byte_fallback=*/false);
  CHECK(model.merges().size() == 1);
  CHECK(model.merges()[0].right_final);
  CHECK(encode(model, "ab").size() == 1);
}

TEST_CASE("vocab_size below the base alphabet is rejected") {
  CHECK_THROWS_AS(train_bpe({"abcdef"}, 2), TokenizerError);
  CHECK_THROWS_AS(train_bpe({}, 10), TokenizerError);
  CHECK_THROWS_AS(train_bpe({""}, 10), TokenizerError);
}

TEST_CASE("char model is bpe training with zero merges") {
  std::vector<std::string> corpus = {"aaab", "aaab"};
  TokenizerModel chars = train_char_model(corpus, /*byte_fallback=*/false);
  CHECK(chars.merges().empty());
  CHECK(serialize_tokenizer(chars) ==
        serialize_tokenizer(train_bpe(corpus, 2, /*byte_fallback=*/false)));
  CHECK(encode(chars, "aaab").size() == 4);
}

TEST_CASE("word-final symbols fall back to their unmarked form") {
  // Training "ab" yields base symbols {a, b</w>} only.
  TokenizerModel model = train_char_model({"ab"});
  // "aba" needs a word-final a: absent, so the unmarked a is used.
  std::vector<int> ids = encode(model, "aba");
  REQUIRE(ids.size() == 3);
  CHECK(model.entry(ids[2]).kind == TokenKind::kNormal);
  CHECK(decode(model, ids) == "aba");
  // "ba" needs an unmarked b: absent, so bytes carry it.
  ids = encode(model, "ba");
  CHECK(model.entry(ids[0]).kind == TokenKind::kByte);
  CHECK(decode(model, ids) == "ba");
}

TEST_CASE("unknown characters go through byte fallback or fail loudly") {
  TokenizerModel with_bytes = train_char_model({"ab"});
  std::vector<int> ids = encode(with_bytes, "cab");
  CHECK(ids[0] == with_bytes.byte_id(static_cast<uint8_t>('c')));
  CHECK(decode(with_bytes, ids) == "cab");
  // Multi-byte characters expand to one byte token per UTF-8 byte.
  CHECK(encode(with_bytes, "م").size() == 2);

  TokenizerModel no_bytes = train_char_model({"ab"}, /*byte_fallback=*/false);
  CHECK_THROWS_AS(encode(no_bytes, "cab"), TokenizerError);
}

TEST_CASE("decode inverts encode on random mixed-script strings") {
  TokenizerModel model = train_bpe({"أنا أحب التفاح", "i love apples", "aaab abab"}, 80);
  std::mt19937 rng(99);
  for (int i = 0; i < 2000; ++i) {
    std::string text = random_text(rng);
    CHECK(decode(model, encode(model, text)) == text);
  }
}

TEST_CASE("training is deterministic") {
  std::vector<std::string> corpus = {"abcd dcba", "aabb ccdd", "abab baba", "قال قالوا"};
  std::string first = serialize_tokenizer(train_bpe(corpus, 40));
  for (int run = 0; run < 3; ++run) {
    CHECK(serialize_tokenizer(train_bpe(corpus, 40)) == first);
  }
}

TEST_CASE("serialization round trips byte for byte") {
  TokenizerModel model = train_bpe({"أنا أحب التفاح", "i love apples"}, 60, true, {"<pad>"});
  std::string json_text = serialize_tokenizer(model);
  TokenizerModel back = deserialize_tokenizer(json_text);
  CHECK(serialize_tokenizer(back) == json_text);
  CHECK(back.special_tokens() == model.special_tokens());
  CHECK(back.byte_fallback());
  std::string sample = "التفاح لذيذ, apples!";
  CHECK(encode(back, sample) == encode(model, sample));
}

TEST_CASE("deserialization rejects malformed models") {
  CHECK_THROWS_AS(deserialize_tokenizer("not json"), TokenizerError);
  CHECK_THROWS_AS(deserialize_tokenizer("[]"), TokenizerError);
  // Gapped ids.
  CHECK_THROWS_AS(deserialize_tokenizer(R"({"vocab": {"a": 0, "b": 2}})"), TokenizerError);
  // Merge result missing from the vocab.
  CHECK_THROWS_AS(
      deserialize_tokenizer(R"({"vocab": {"a": 0, "b": 1}, "merges": ["a b"]})"),
      TokenizerError);
  // byte_fallback without the byte block.
  CHECK_THROWS_AS(deserialize_tokenizer(R"({"vocab": {"a": 0}, "byte_fallback": true})"),
                  TokenizerError);
}

TEST_CASE("words containing the marker glyph or suffix text still round trip") {
  // "</w>" as literal text and U+E000 in the input must not confuse the
  // naming scheme.
  TokenizerModel model = train_bpe({"x</w> x</w>", "\xEE\x80\x80 ok"}, 60);
  for (const std::string text : {"x</w>", "\xEE\x80\x80", "a</w>b"}) {
    CHECK(decode(model, encode(model, text)) == text);
  }
  std::string json_text = serialize_tokenizer(model);
  CHECK(serialize_tokenizer(deserialize_tokenizer(json_text)) == json_text);
}

TEST_CASE("bundled demo models reproduce the twelve-vs-five contrast") {
  const char* source_dir = std::getenv("CSTEVAL_SOURCE_DIR");
  REQUIRE_MESSAGE(source_dir != nullptr, "CSTEVAL_SOURCE_DIR must point at the repo root");
  auto dir = std::filesystem::path(source_dir) / "data" / "tokenizers";
  TokenizerModel chars = load_tokenizer((dir / "char_fallback.json").string());
  TokenizerModel bpe = load_tokenizer((dir / "arabic_bpe.json").string());

  const std::string sentence = "أنا أحب التفاح";
  auto rows = compare_tokenizers({{"char_fallback", &chars}, {"arabic_bpe", &bpe}}, sentence);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].token_count == 12);
  CHECK(rows[0].fertility == doctest::Approx(4.0));
  CHECK(rows[1].token_count == 5);
  CHECK(rows[1].pieces == std::vector<std::string>{"أنا", "أح", "ب", "التف", "اح"});
  CHECK(rows[1].fertility == doctest::Approx(5.0 / 3.0));

  // Both models remain lossless on the demo sentence.
  CHECK(decode(chars, encode(chars, sentence)) == sentence);
  CHECK(decode(bpe, encode(bpe, sentence)) == sentence);
}
