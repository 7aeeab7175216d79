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

#include "csteval/tokenizer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "csteval/unicode.hpp"
#include "json.hpp"

namespace csteval {
namespace {

constexpr uint32_t kMarkerChar = 0xE000;  // private-use; never a vocab symbol
constexpr std::string_view kFinalSuffix = "</w>";

std::string byte_token_name(int byte) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "<0x%02X>", byte);
  return std::string(buf);
}

bool parse_byte_token_name(const std::string& name, int* byte) {
  if (name.size() != 6 || name.rfind("<0x", 0) != 0 || name[5] != '>') return false;
  int value = 0;
  for (int i = 3; i < 5; ++i) {
    char c = name[static_cast<std::size_t>(i)];
    int digit;
    if (c >= '0' && c <= '9') digit = c - '0';
    else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
    else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
    else return false;
    value = value * 16 + digit;
  }
  *byte = value;
  return true;
}

// A serialized token name must round-trip unambiguously, so merge results
// may not collide with the byte-token syntax or the "</w>" suffix.
bool ambiguous_token_text(const std::string& text) {
  if (text.size() >= kFinalSuffix.size() &&
      text.compare(text.size() - kFinalSuffix.size(), kFinalSuffix.size(), kFinalSuffix) == 0) {
    return true;
  }
  int byte;
  return parse_byte_token_name(text, &byte);
}

// Working symbol during training and encoding. `byte >= 0` marks a raw byte
// emitted by fallback; byte symbols never participate in merges.
struct Sym {
  std::string text;
  bool final_ = false;
  int byte = -1;
};

bool sym_matches(const Sym& s, const std::string& text, bool final_) {
  return s.byte < 0 && s.final_ == final_ && s.text == text;
}

void append_char_utf8(std::string* out, uint32_t cp) { uni::append_utf8(*out, cp); }

// Splits text into runs of non-whitespace (words) and whitespace. A word's
// last character carries the end-of-word marker. Characters with no direct
// symbol form (the private-use marker itself) become byte symbols up front.
std::vector<std::vector<Sym>> symbolize(std::string_view text, std::vector<bool>* is_word,
                                        std::vector<std::string>* raw_runs = nullptr) {
  std::vector<uint32_t> cps = uni::decode_utf8(text);
  std::vector<std::vector<Sym>> runs;
  std::size_t i = 0;
  while (i < cps.size()) {
    bool word = !uni::is_whitespace(cps[i]);
    std::size_t j = i;
    while (j < cps.size() && (!uni::is_whitespace(cps[j])) == word) ++j;
    if (raw_runs) {
      raw_runs->push_back(
          uni::encode_utf8(std::vector<uint32_t>(cps.begin() + static_cast<long>(i),
                                                 cps.begin() + static_cast<long>(j))));
    }
    std::vector<Sym> syms;
    for (std::size_t k = i; k < j; ++k) {
      bool last = word && k + 1 == j;
      if (cps[k] == kMarkerChar) {
        std::string raw;
        append_char_utf8(&raw, cps[k]);
        for (unsigned char b : raw) {
          Sym s;
          s.text = byte_token_name(b);
          s.byte = b;
          syms.push_back(std::move(s));
        }
        if (last && !syms.empty()) syms.back().final_ = false;  // bytes never final
        continue;
      }
      Sym s;
      append_char_utf8(&s.text, cps[k]);
      s.final_ = last;
      syms.push_back(std::move(s));
    }
    runs.push_back(std::move(syms));
    if (is_word) is_word->push_back(word);
    i = j;
  }
  return runs;
}

void apply_merge(std::vector<Sym>* syms, const std::string& left, const std::string& right,
                 bool right_final) {
  std::vector<Sym>& v = *syms;
  std::size_t w = 0;
  for (std::size_t r = 0; r < v.size();) {
    if (r + 1 < v.size() && sym_matches(v[r], left, false) &&
        sym_matches(v[r + 1], right, right_final)) {
      Sym merged;
      merged.text = v[r].text + v[r + 1].text;
      merged.final_ = right_final;
      v[w++] = std::move(merged);
      r += 2;
    } else {
      // w == r self-assignment would empty the symbol text.
      if (w != r) v[w] = std::move(v[r]);
      ++w;
      r += 1;
    }
  }
  v.resize(w);
}

std::pair<std::string, std::string> pair_sort_key(const std::string& left, const Sym& right) {
  std::string right_key = right.text;
  if (right.final_) append_char_utf8(&right_key, kMarkerChar);
  return {left, right_key};
}

}  // namespace

int TokenizerModel::add_special(const std::string& text) {
  TokenEntry e;
  e.text = text;
  e.kind = TokenKind::kSpecial;
  tokens_.push_back(std::move(e));
  special_tokens_.push_back(text);
  return static_cast<int>(tokens_.size()) - 1;
}

void TokenizerModel::add_byte_tokens() {
  for (int b = 0; b < 256; ++b) {
    if (byte_ids_[static_cast<std::size_t>(b)] >= 0) continue;
    TokenEntry e;
    e.text = byte_token_name(b);
    e.kind = TokenKind::kByte;
    e.byte_value = b;
    tokens_.push_back(std::move(e));
    byte_ids_[static_cast<std::size_t>(b)] = static_cast<int>(tokens_.size()) - 1;
  }
  byte_fallback_ = true;
}

int TokenizerModel::add_symbol(const std::string& text, bool word_final) {
  auto key = std::make_pair(text, word_final);
  auto it = symbol_ids_.find(key);
  if (it != symbol_ids_.end()) return it->second;
  TokenEntry e;
  e.text = text;
  e.word_final = word_final;
  tokens_.push_back(std::move(e));
  int id = static_cast<int>(tokens_.size()) - 1;
  symbol_ids_.emplace(std::move(key), id);
  return id;
}

int TokenizerModel::add_merge(const std::string& left, const std::string& right,
                              bool right_final) {
  register_merge(left, right, right_final);
  return add_symbol(left + right, right_final);
}

int TokenizerModel::find_symbol(const std::string& text, bool word_final) const {
  auto it = symbol_ids_.find(std::make_pair(text, word_final));
  return it == symbol_ids_.end() ? -1 : it->second;
}

int TokenizerModel::merge_priority(const std::string& left, const std::string& right,
                                   bool right_final) const {
  auto it = merge_ranks_.find(std::make_tuple(left, right, right_final));
  return it == merge_ranks_.end() ? -1 : it->second;
}

const TokenEntry& TokenizerModel::entry(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw TokenizerError("token id " + std::to_string(id) + " is out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::string TokenizerModel::token_name(int id) const {
  const TokenEntry& e = entry(id);
  if (e.kind == TokenKind::kNormal && e.word_final) return e.text + std::string(kFinalSuffix);
  return e.text;
}

namespace {

TokenizerModel train_impl(const std::vector<std::string>& corpus_text,
                          std::optional<std::size_t> vocab_size, bool byte_fallback,
                          const std::vector<std::string>& special_tokens) {
  if (corpus_text.empty()) throw TokenizerError("training corpus is empty");

  // Word frequency table; whitespace characters join the base alphabet but
  // never merge.
  std::map<std::string, long long> word_counts;
  std::map<std::pair<std::string, bool>, bool> base_symbols;
  bool any_content = false;
  for (const std::string& line : corpus_text) {
    std::vector<bool> is_word;
    std::vector<std::string> raw;
    auto runs = symbolize(line, &is_word, &raw);
    for (std::size_t r = 0; r < runs.size(); ++r) {
      any_content = true;
      for (const Sym& s : runs[r]) {
        if (s.byte >= 0) continue;
        base_symbols[{s.text, s.final_}] = true;
      }
      if (!is_word[r]) continue;
      word_counts[raw[r]] += 1;
    }
  }
  if (!any_content) throw TokenizerError("training corpus is empty");

  if (vocab_size && *vocab_size < base_symbols.size()) {
    throw TokenizerError("vocab_size " + std::to_string(*vocab_size) +
                         " is below the base alphabet size " +
                         std::to_string(base_symbols.size()));
  }

  TokenizerModel model;
  model.set_byte_fallback(byte_fallback);
  for (const std::string& s : special_tokens) model.add_special(s);
  if (byte_fallback) model.add_byte_tokens();
  for (const auto& [key, unused] : base_symbols) model.add_symbol(key.first, key.second);

  std::vector<std::pair<std::vector<Sym>, long long>> words;
  words.reserve(word_counts.size());
  for (const auto& [word, count] : word_counts) {
    std::vector<Sym> syms;
    auto runs = symbolize(word, nullptr);
    if (runs.size() == 1) syms = std::move(runs[0]);
    words.emplace_back(std::move(syms), count);
  }

  std::size_t target_merges = vocab_size ? *vocab_size - base_symbols.size() : 0;
  for (std::size_t step = 0; step < target_merges; ++step) {
    // Recounting per step keeps the update logic simple; corpora here are
    // small enough that this stays well under a second.
    std::map<std::pair<std::string, std::string>, long long> pair_counts;
    std::map<std::pair<std::string, std::string>, std::pair<const Sym*, const Sym*>> pair_syms;
    for (const auto& [syms, count] : words) {
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i].byte >= 0 || syms[i + 1].byte >= 0) continue;
        auto key = pair_sort_key(syms[i].text, syms[i + 1]);
        pair_counts[key] += count;
        pair_syms[key] = {&syms[i], &syms[i + 1]};
      }
    }

    const std::pair<std::string, std::string>* best_key = nullptr;
    long long best_count = 0;
    for (const auto& [key, count] : pair_counts) {
      std::string merged = pair_syms[key].first->text + pair_syms[key].second->text;
      if (ambiguous_token_text(merged)) continue;
      if (best_key == nullptr || count > best_count ||
          (count == best_count && key > *best_key)) {
        best_key = &key;
        best_count = count;
      }
    }
    if (best_key == nullptr) break;

    const Sym* left = pair_syms[*best_key].first;
    const Sym* right = pair_syms[*best_key].second;
    std::string left_text = left->text;
    std::string right_text = right->text;
    bool right_final = right->final_;
    model.add_merge(left_text, right_text, right_final);
    for (auto& [syms, count] : words) apply_merge(&syms, left_text, right_text, right_final);
  }
  return model;
}

}  // namespace

TokenizerModel train_bpe(const std::vector<std::string>& corpus_text, std::size_t vocab_size,
                         bool byte_fallback, const std::vector<std::string>& special_tokens) {
  return train_impl(corpus_text, vocab_size, byte_fallback, special_tokens);
}

TokenizerModel train_char_model(const std::vector<std::string>& corpus_text, bool byte_fallback,
                                const std::vector<std::string>& special_tokens) {
  return train_impl(corpus_text, std::nullopt, byte_fallback, special_tokens);
}

namespace {

// Falls back from the marked symbol to its unmarked form, then to bytes.
void emit_symbol(const TokenizerModel& model, const Sym& s, std::vector<int>* out) {
  if (s.byte >= 0) {
    int id = model.byte_id(static_cast<uint8_t>(s.byte));
    if (id < 0) throw TokenizerError("byte token " + s.text + " is not in the vocabulary");
    out->push_back(id);
    return;
  }
  int id = model.find_symbol(s.text, s.final_);
  if (id < 0 && s.final_) id = model.find_symbol(s.text, false);
  if (id >= 0) {
    out->push_back(id);
    return;
  }
  if (model.byte_fallback()) {
    for (unsigned char b : s.text) {
      int bid = model.byte_id(b);
      if (bid < 0) throw TokenizerError("byte token is not in the vocabulary");
      out->push_back(bid);
    }
    return;
  }
  throw TokenizerError("character '" + s.text +
                       "' is not in the vocabulary and byte fallback is disabled");
}

}  // namespace

std::vector<int> encode(const TokenizerModel& model, std::string_view text) {
  std::vector<int> ids;
  auto runs = symbolize(text, nullptr);
  for (auto& syms : runs) {
    // Greedy merge loop: always apply the lowest-rank merge present.
    for (;;) {
      int best_rank = -1;
      std::size_t best_i = 0;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i].byte >= 0 || syms[i + 1].byte >= 0 || syms[i].final_) continue;
        int rank = model.merge_priority(syms[i].text, syms[i + 1].text, syms[i + 1].final_);
        if (rank >= 0 && (best_rank < 0 || rank < best_rank)) {
          best_rank = rank;
          best_i = i;
        }
      }
      if (best_rank < 0) break;
      const MergeRule& rule = model.merges()[static_cast<std::size_t>(best_rank)];
      apply_merge(&syms, rule.left, rule.right, rule.right_final);
      (void)best_i;
    }
    for (const Sym& s : syms) emit_symbol(model, s, &ids);
  }
  return ids;
}

std::string decode(const TokenizerModel& model, const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) {
    const TokenEntry& e = model.entry(id);
    switch (e.kind) {
      case TokenKind::kByte:
        out.push_back(static_cast<char>(static_cast<unsigned char>(e.byte_value)));
        break;
      case TokenKind::kNormal:
      case TokenKind::kSpecial:
        out += e.text;
        break;
    }
  }
  return out;
}

std::vector<TokenizerComparisonRow> compare_tokenizers(
    const std::vector<std::pair<std::string, const TokenizerModel*>>& models,
    std::string_view text) {
  std::size_t word_count = 0;
  {
    std::vector<bool> is_word;
    auto runs = symbolize(text, &is_word);
    for (bool w : is_word) word_count += w ? 1 : 0;
  }
  std::vector<TokenizerComparisonRow> rows;
  for (const auto& [name, model] : models) {
    TokenizerComparisonRow row;
    row.model_name = name;
    for (int id : encode(*model, text)) {
      const TokenEntry& e = model->entry(id);
      if (e.kind == TokenKind::kNormal) {
        bool all_space = true;
        for (uint32_t cp : uni::decode_utf8(e.text)) {
          if (!uni::is_whitespace(cp)) {
            all_space = false;
            break;
          }
        }
        if (all_space) continue;
      } else if (e.kind == TokenKind::kByte) {
        if (uni::is_whitespace(static_cast<uint32_t>(e.byte_value))) continue;
      }
      row.pieces.push_back(e.text);
    }
    row.token_count = row.pieces.size();
    row.fertility = word_count == 0
                        ? 0.0
                        : static_cast<double>(row.token_count) / static_cast<double>(word_count);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string serialize_tokenizer(const TokenizerModel& model) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json vocab = nlohmann::ordered_json::object();
  for (std::size_t id = 0; id < model.vocab_size(); ++id) {
    vocab[model.token_name(static_cast<int>(id))] = id;
  }
  doc["vocab"] = std::move(vocab);
  nlohmann::ordered_json merges = nlohmann::ordered_json::array();
  for (const MergeRule& m : model.merges()) {
    std::string right = m.right;
    if (m.right_final) right += std::string(kFinalSuffix);
    merges.push_back(m.left + " " + right);
  }
  doc["merges"] = std::move(merges);
  doc["byte_fallback"] = model.byte_fallback();
  doc["special_tokens"] = model.special_tokens();
  return doc.dump(2) + "\n";
}

namespace {

struct ParsedName {
  std::string text;
  TokenKind kind = TokenKind::kNormal;
  bool final_ = false;
  int byte = -1;
};

ParsedName parse_token_name(const std::string& name,
                            const std::vector<std::string>& specials) {
  ParsedName p;
  if (std::find(specials.begin(), specials.end(), name) != specials.end()) {
    p.text = name;
    p.kind = TokenKind::kSpecial;
    return p;
  }
  if (parse_byte_token_name(name, &p.byte)) {
    p.text = name;
    p.kind = TokenKind::kByte;
    return p;
  }
  if (name.size() > kFinalSuffix.size() &&
      name.compare(name.size() - kFinalSuffix.size(), kFinalSuffix.size(), kFinalSuffix) == 0) {
    p.text = name.substr(0, name.size() - kFinalSuffix.size());
    p.final_ = true;
    return p;
  }
  p.text = name;
  return p;
}

}  // namespace

TokenizerModel deserialize_tokenizer(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw TokenizerError(std::string("tokenizer JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vocab") || !doc["vocab"].is_object()) {
    throw TokenizerError("tokenizer JSON must be an object with a 'vocab' map");
  }
  std::vector<std::string> specials;
  if (doc.contains("special_tokens")) {
    for (const auto& s : doc["special_tokens"]) specials.push_back(s.get<std::string>());
  }
  bool byte_fallback = doc.value("byte_fallback", false);

  std::vector<std::pair<std::string, int>> by_id;
  for (const auto& [name, id_json] : doc["vocab"].items()) {
    if (!id_json.is_number_integer()) {
      throw TokenizerError("vocab entry '" + name + "' has a non-integer id");
    }
    by_id.emplace_back(name, id_json.get<int>());
  }
  std::sort(by_id.begin(), by_id.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (std::size_t i = 0; i < by_id.size(); ++i) {
    if (by_id[i].second != static_cast<int>(i)) {
      throw TokenizerError("vocab ids must be dense and start at 0; id " +
                           std::to_string(by_id[i].second) + " breaks the sequence");
    }
  }

  TokenizerModel model;
  model.set_byte_fallback(false);
  int bytes_seen = 0;
  for (const auto& [name, id] : by_id) {
    (void)id;
    ParsedName p = parse_token_name(name, specials);
    switch (p.kind) {
      case TokenKind::kSpecial:
        model.add_special(p.text);
        break;
      case TokenKind::kByte: {
        // add_byte_tokens assigns a block; here ids must follow file order.
        TokenEntry e;
        e.text = p.text;
        e.kind = TokenKind::kByte;
        e.byte_value = p.byte;
        model.adopt_entry(std::move(e));
        ++bytes_seen;
        break;
      }
      case TokenKind::kNormal:
        if (model.find_symbol(p.text, p.final_) >= 0) {
          throw TokenizerError("duplicate vocab symbol '" + name + "'");
        }
        model.add_symbol(p.text, p.final_);
        break;
    }
  }
  if (byte_fallback && bytes_seen != 256) {
    throw TokenizerError("byte_fallback requires all 256 byte tokens in the vocab");
  }
  model.set_byte_fallback(byte_fallback);

  if (doc.contains("merges")) {
    for (const auto& m : doc["merges"]) {
      std::string rule = m.get<std::string>();
      std::size_t space = rule.find(' ');
      if (space == std::string::npos || space == 0 || space + 1 == rule.size()) {
        throw TokenizerError("merge rule '" + rule + "' must be 'left right'");
      }
      std::string left = rule.substr(0, space);
      std::string right = rule.substr(space + 1);
      bool right_final = false;
      if (right.size() > kFinalSuffix.size() &&
          right.compare(right.size() - kFinalSuffix.size(), kFinalSuffix.size(), kFinalSuffix) ==
              0) {
        right = right.substr(0, right.size() - kFinalSuffix.size());
        right_final = true;
      }
      if (model.find_symbol(left + right, right_final) < 0) {
        throw TokenizerError("merge result of '" + rule + "' is not in the vocabulary");
      }
      model.register_merge(left, right, right_final);
    }
  }
  return model;
}

void TokenizerModel::adopt_entry(TokenEntry entry) {
  if (entry.kind == TokenKind::kByte) {
    if (entry.byte_value < 0 || entry.byte_value > 255 ||
        byte_ids_[static_cast<std::size_t>(entry.byte_value)] >= 0) {
      throw TokenizerError("duplicate or invalid byte token '" + entry.text + "'");
    }
    byte_ids_[static_cast<std::size_t>(entry.byte_value)] = static_cast<int>(tokens_.size());
  }
  tokens_.push_back(std::move(entry));
}

void TokenizerModel::register_merge(const std::string& left, const std::string& right,
                                    bool right_final) {
  if (find_symbol(left, false) < 0) {
    throw TokenizerError("merge left side '" + left + "' is not in the vocabulary");
  }
  if (find_symbol(right, right_final) < 0) {
    throw TokenizerError("merge right side '" + right + "' is not in the vocabulary");
  }
  auto rank_key = std::make_tuple(left, right, right_final);
  if (merge_ranks_.count(rank_key) != 0) {
    throw TokenizerError("duplicate merge rule '" + left + "' + '" + right + "'");
  }
  merge_ranks_.emplace(rank_key, static_cast<int>(merges_.size()));
  merges_.push_back(MergeRule{left, right, right_final});
}

TokenizerModel load_tokenizer(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TokenizerError("cannot open tokenizer file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_tokenizer(buf.str());
}

void save_tokenizer(const TokenizerModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TokenizerError("cannot open tokenizer file '" + path + "' for writing");
  out << serialize_tokenizer(model);
  if (!out) throw TokenizerError("failed writing tokenizer file '" + path + "'");
}

}  // namespace csteval
