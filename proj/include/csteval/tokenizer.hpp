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

#ifndef CSTEVAL_TOKENIZER_HPP_
#define CSTEVAL_TOKENIZER_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace csteval {

class TokenizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TokenKind { kNormal, kByte, kSpecial };

struct TokenEntry {
  std::string text;  // literal text; for byte tokens the "<0xNN>" name
  TokenKind kind = TokenKind::kNormal;
  bool word_final = false;  // carries the end-of-word marker
  int byte_value = -1;      // for kByte
};

struct MergeRule {
  std::string left;
  std::string right;
  bool right_final = false;
};

// Classic BPE vocabulary: base symbols are characters, words carry an
// end-of-word marker fused onto their last character, and merges apply
// greedily in training priority order. With byte fallback enabled any UTF-8
// input is representable and decode(encode(x)) == x.
class TokenizerModel {
 public:
  TokenizerModel() { byte_ids_.fill(-1); }

  bool byte_fallback() const { return byte_fallback_; }
  void set_byte_fallback(bool on) { byte_fallback_ = on; }

  const std::vector<TokenEntry>& tokens() const { return tokens_; }
  const std::vector<MergeRule>& merges() const { return merges_; }
  const std::vector<std::string>& special_tokens() const { return special_tokens_; }

  std::size_t vocab_size() const { return tokens_.size(); }

  int add_special(const std::string& text);
  void add_byte_tokens();
  int add_symbol(const std::string& text, bool word_final);
  // Registers the rule and its result token; returns the result id.
  int add_merge(const std::string& left, const std::string& right, bool right_final);
  // Appends a pre-built entry with the next id (deserialization path).
  void adopt_entry(TokenEntry entry);
  // Records a rule whose result token already exists.
  void register_merge(const std::string& left, const std::string& right, bool right_final);

  int find_symbol(const std::string& text, bool word_final) const;
  int byte_id(uint8_t byte) const { return byte_ids_[byte]; }
  int merge_priority(const std::string& left, const std::string& right, bool right_final) const;

  const TokenEntry& entry(int id) const;

  // Serialized name as used in the JSON vocab ("<0xNN>" for bytes, a "</w>"
  // suffix for word-final symbols).
  std::string token_name(int id) const;

 private:
  std::vector<TokenEntry> tokens_;
  std::map<std::pair<std::string, bool>, int> symbol_ids_;
  std::array<int, 256> byte_ids_;
  std::vector<MergeRule> merges_;
  std::map<std::tuple<std::string, std::string, bool>, int> merge_ranks_;
  std::vector<std::string> special_tokens_;
  bool byte_fallback_ = true;
};

// Trains on whitespace-pre-split words until the vocabulary holds
// `vocab_size` corpus symbols (base alphabet plus merges), or no adjacent
// pair is left to merge. Ties on pair frequency resolve to the
// lexicographically greatest pair, so training is deterministic.
TokenizerModel train_bpe(const std::vector<std::string>& corpus_text, std::size_t vocab_size,
                         bool byte_fallback = true,
                         const std::vector<std::string>& special_tokens = {});

// Base alphabet only, no merges: the pure character model.
TokenizerModel train_char_model(const std::vector<std::string>& corpus_text,
                                bool byte_fallback = true,
                                const std::vector<std::string>& special_tokens = {});

std::vector<int> encode(const TokenizerModel& model, std::string_view text);
std::string decode(const TokenizerModel& model, const std::vector<int>& ids);

struct TokenizerComparisonRow {
  std::string model_name;
  std::vector<std::string> pieces;  // display text, markers stripped, no whitespace tokens
  std::size_t token_count = 0;
  double fertility = 0.0;  // tokens per whitespace word
};

std::vector<TokenizerComparisonRow> compare_tokenizers(
    const std::vector<std::pair<std::string, const TokenizerModel*>>& models,
    std::string_view text);

std::string serialize_tokenizer(const TokenizerModel& model);
TokenizerModel deserialize_tokenizer(const std::string& json_text);

TokenizerModel load_tokenizer(const std::string& path);
void save_tokenizer(const TokenizerModel& model, const std::string& path);

}  // namespace csteval

#endif  // CSTEVAL_TOKENIZER_HPP_
