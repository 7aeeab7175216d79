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

#ifndef CSTEVAL_METRICS_HPP_
#define CSTEVAL_METRICS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csteval/clients.hpp"
#include "csteval/corpus.hpp"
#include "csteval/text_normalize.hpp"

namespace csteval {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Metric { kBleu, kMeteor, kWer, kCer, kEed, kBertF1, kLlmGrade };
enum class Direction { kHigherBetter, kLowerBetter };

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);
Direction direction_of(Metric metric);

struct MetricScore {
  Metric metric = Metric::kBleu;
  double corpus_value = 0.0;
  std::map<std::string, double> segment_values;
  Direction direction = Direction::kHigherBetter;
  bool available = true;  // false when an endpoint was missing or failed
  std::vector<std::string> excluded_segments;
  std::string note;
};

struct MetricReport {
  std::string system_id;
  std::string target_lang;
  std::vector<MetricScore> scores;
  std::string config_fingerprint;
  double coverage = 0.0;  // scored segments / corpus segments
  std::size_t segments_scored = 0;

  const MetricScore* find(Metric metric) const;
};

struct MetricOptions {
  bool normalize = true;  // run normalize_text before scoring
  NormalizationConfig norm;
  int max_ngram = 4;
};

// Word- and character-level Levenshtein distance, unit cost per edit.
std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b);
std::size_t levenshtein_chars(const std::string& a, const std::string& b);

// BLEU tokens: normalized text with every codepoint that is neither letter,
// digit, nor whitespace split off as its own token.
std::vector<std::string> bleu_tokens(const std::string& text, const MetricOptions& opts = {});

// Corpus BLEU on the 0-100 scale: geometric mean of clipped n-gram
// precisions over the orders with at least one hypothesis n-gram, times
// brevity penalty exp(1 - ref_len/hyp_len) when the hypothesis is shorter.
double corpus_bleu(const std::vector<std::pair<std::string, std::string>>& hyp_ref_pairs,
                   const MetricOptions& opts = {});

// Sentence BLEU with exponential smoothing: the k-th zero n-gram count is
// replaced by 1/(2^k * ngram_count). A hypothesis without any unigram match
// scores 0; smoothing only rescues higher orders.
double sentence_bleu(const std::string& hyp, const std::string& ref,
                     const MetricOptions& opts = {});

// Original exact-match METEOR: F = 10PR/(R+9P), penalty = 0.5*(chunks/m)^3.
// Empty input after normalization scores 0.
double meteor(const std::string& hyp, const std::string& ref, const MetricOptions& opts = {});

// Levenshtein normalized by reference unit count; reference must be
// non-empty.
double wer(const std::string& hyp, const std::string& ref, const MetricOptions& opts = {});
double cer(const std::string& hyp, const std::string& ref, const MetricOptions& opts = {});

// Character Levenshtein normalized by max length; in [0, 1]. Two empty
// strings score 0.
double eed(const std::string& hyp, const std::string& ref, const MetricOptions& opts = {});

// Greedy max-cosine token matching over endpoint embeddings; F1 of
// mean-max precision and recall.
double bert_f1(const std::string& hyp, const std::string& ref, const EmbeddingClient& client,
               const MetricOptions& opts = {});

struct GraderRubric {
  std::string system_text =
      "You are a strict grader of translations of code-switched Egyptian "
      "Arabic-English speech.";
  // Slots: {src}, {ref}, {hyp}.
  std::string user_pattern =
      "Rate the candidate translation on a scale of 0-10, where 10 means the "
      "candidate conveys exactly the meaning of the reference. Reply with "
      "the integer score first, then one short justification.\n\n"
      "Source: {src}\nReference: {ref}\nCandidate: {hyp}\n\nScore:";

  std::string render(const std::string& src, const std::string& hyp,
                     const std::string& ref) const;
};

// First integer in the reply when it lies in 0..10; nullopt otherwise.
std::optional<int> parse_grade(const std::string& reply);

// Grades one segment; up to three attempts on unparseable replies, then
// nullopt. Network errors propagate as ClientError.
std::optional<double> llm_grade(const std::string& src, const std::string& hyp,
                                const std::string& ref, const ChatClient& client,
                                const GraderRubric& rubric = {});

struct MetricClients {
  const EmbeddingClient* embeddings = nullptr;
  const ChatClient* grader = nullptr;
};

// Reference text for hypotheses in `lang`: ref_en, ref_ar, or the
// code-switched source for transcript scoring.
std::optional<std::string> reference_text(const Segment& segment, TargetLang lang);

MetricReport score_system(const Corpus& corpus, const HypothesisSet& hyps,
                          const std::vector<Metric>& metric_set, const MetricClients& clients,
                          const MetricOptions& opts, const std::string& config_fingerprint,
                          const GraderRubric& rubric = {});

struct LeaderboardRow {
  int rank = 0;
  std::string system_id;
  double value = 0.0;
};

// Sorts by the key metric respecting its direction; ties resolve to
// lexicographically smaller system_id. All reports must share fingerprint
// and target language.
std::vector<LeaderboardRow> rank_systems(const std::vector<MetricReport>& reports,
                                         Metric key_metric);

}  // namespace csteval

#endif  // CSTEVAL_METRICS_HPP_
