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

#ifndef CSTEVAL_CORPUS_HPP_
#define CSTEVAL_CORPUS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csteval/text_normalize.hpp"

namespace csteval {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Split { kTrain, kTest, kOther };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

// kCs marks transcript hypotheses scored against the code-switched source.
enum class TargetLang { kEn, kAr, kCs };

std::string to_string(TargetLang lang);
TargetLang target_lang_from_string(const std::string& name);

struct AudioRef {
  std::string path;
  double duration_s = 0.0;

  bool operator==(const AudioRef&) const = default;
};

// One three-way parallel unit: code-switched source plus optional English and
// Arabic references and an optional audio recording.
struct Segment {
  std::string id;
  Split split = Split::kOther;
  std::string source_cs;
  std::optional<std::string> ref_en;
  std::optional<std::string> ref_ar;
  std::optional<AudioRef> audio;

  bool operator==(const Segment&) const = default;
};

enum class CorpusFormat { kJsonl, kTsv };

CorpusFormat corpus_format_from_string(const std::string& name);

class Corpus {
 public:
  Corpus() = default;
  Corpus(std::string name, std::string provenance, std::vector<Segment> segments);

  const std::vector<Segment>& segments() const { return segments_; }
  const std::string& name() const { return name_; }
  const std::string& provenance() const { return provenance_; }

  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }

  const Segment* find(const std::string& id) const;
  std::map<Split, std::size_t> split_counts() const;

  bool operator==(const Corpus& other) const {
    return name_ == other.name_ && provenance_ == other.provenance_ &&
           segments_ == other.segments_;
  }

 private:
  std::string name_;
  std::string provenance_;
  std::vector<Segment> segments_;
  std::map<std::string, std::size_t> index_;
};

// Candidate translations of one system for one target language.
struct HypothesisSet {
  std::string system_id;
  TargetLang target_lang = TargetLang::kEn;
  std::map<std::string, std::string> entries;  // segment id -> hypothesis
};

struct CodeSwitchStats {
  double arabic_token_fraction = 0.0;
  double latin_token_fraction = 0.0;
  double other_fraction = 0.0;
  std::size_t segments_with_switch = 0;
  double word_overlap_src_to_ar = 0.0;
  std::size_t total_tokens = 0;
  std::size_t overlap_segment_count = 0;  // segments carrying an Arabic reference
};

struct SplitExpectation {
  std::map<Split, std::size_t> counts;
};

struct ValidationReport {
  std::size_t total_segments = 0;
  std::map<Split, std::size_t> split_counts;
  std::size_t empty_ref_en = 0;  // reference absent or blank after trimming
  std::size_t empty_ref_ar = 0;
  std::size_t missing_audio = 0;
  bool passed = true;
  // split name -> (expected, actual) for every expectation mismatch
  std::map<std::string, std::pair<std::size_t, std::size_t>> mismatches;
};

// Record schema (JSONL keys / TSV column order):
//   id, split, source_cs, ref_en, ref_ar, audio_path, duration_s
Corpus load_corpus(const std::string& path, CorpusFormat format);
void save_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format);

ValidationReport validate_corpus(const Corpus& corpus,
                                 const std::optional<SplitExpectation>& expectation = {});

// Script make-up of the source side and the verbatim source->Arabic-reference
// word overlap. Text is normalized before tokenization unless `normalize` is
// false (the raw mode).
CodeSwitchStats codeswitch_stats(const Corpus& corpus, bool normalize = true,
                                 const NormalizationConfig& config = {});

// Hypothesis files are JSONL records {"id": ..., "text": ...}.
HypothesisSet load_hypotheses(const std::string& path, const std::string& system_id,
                              TargetLang target_lang);
void save_hypotheses(const HypothesisSet& hyps, const std::string& path);

enum class TokenScript { kArabic, kLatin, kOther };

// Majority script of a token's letters; ties and letterless tokens -> kOther.
TokenScript classify_token_script(const std::string& token);

}  // namespace csteval

#endif  // CSTEVAL_CORPUS_HPP_
