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

#include "csteval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csteval/unicode.hpp"

namespace csteval {
namespace {

std::string maybe_normalize(const std::string& text, const MetricOptions& opts) {
  return opts.normalize ? normalize_text(text, opts.norm) : text;
}

std::vector<uint32_t> codepoints_of(const std::string& text, const MetricOptions& opts) {
  return uni::decode_utf8(maybe_normalize(text, opts));
}

template <typename Seq>
std::size_t levenshtein_seq(const Seq& a, const Seq& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t best = std::min(prev[j], cur[j - 1]) + 1;
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min(best, sub);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngram_counts(const std::vector<std::string>& tokens, int order) {
  NgramCounts counts;
  if (order <= 0 || tokens.size() < static_cast<std::size_t>(order)) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(order) <= tokens.size(); ++i) {
    counts[std::vector<std::string>(tokens.begin() + static_cast<long>(i),
                                    tokens.begin() + static_cast<long>(i) + order)] += 1;
  }
  return counts;
}

struct BleuStats {
  std::vector<std::size_t> matched;  // per order, clipped matches
  std::vector<std::size_t> total;    // per order, hypothesis n-gram count
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  explicit BleuStats(int max_ngram)
      : matched(static_cast<std::size_t>(max_ngram), 0),
        total(static_cast<std::size_t>(max_ngram), 0) {}
};

void accumulate_bleu(BleuStats* stats, const std::vector<std::string>& hyp_tokens,
                     const std::vector<std::string>& ref_tokens, int max_ngram) {
  stats->hyp_len += hyp_tokens.size();
  stats->ref_len += ref_tokens.size();
  for (int n = 1; n <= max_ngram; ++n) {
    NgramCounts hyp_counts = ngram_counts(hyp_tokens, n);
    NgramCounts ref_counts = ngram_counts(ref_tokens, n);
    for (const auto& [gram, count] : hyp_counts) {
      stats->total[static_cast<std::size_t>(n - 1)] += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) {
        stats->matched[static_cast<std::size_t>(n - 1)] += std::min(count, it->second);
      }
    }
  }
}

double brevity_penalty(std::size_t hyp_len, std::size_t ref_len) {
  if (hyp_len >= ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

double bleu_from_stats(const BleuStats& stats, bool smooth) {
  if (stats.hyp_len == 0) return 0.0;
  // Smoothing rescues higher-order zeros on short sentences, never a
  // hypothesis with no unigram overlap at all.
  if (!stats.matched.empty() && stats.matched[0] == 0) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  std::size_t zeros = 0;
  for (std::size_t n = 0; n < stats.total.size(); ++n) {
    if (stats.total[n] == 0) continue;  // hypothesis too short for this order
    double p;
    if (stats.matched[n] == 0) {
      if (!smooth) return 0.0;
      ++zeros;
      p = 1.0 / (std::pow(2.0, static_cast<double>(zeros)) *
                 static_cast<double>(stats.total[n]));
    } else {
      p = static_cast<double>(stats.matched[n]) / static_cast<double>(stats.total[n]);
    }
    log_sum += std::log(p);
    ++orders;
  }
  if (orders == 0) return 0.0;
  double geo_mean = std::exp(log_sum / orders);
  return 100.0 * geo_mean * brevity_penalty(stats.hyp_len, stats.ref_len);
}

}  // namespace

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::kBleu: return "bleu";
    case Metric::kMeteor: return "meteor";
    case Metric::kWer: return "wer";
    case Metric::kCer: return "cer";
    case Metric::kEed: return "eed";
    case Metric::kBertF1: return "bert_f1";
    case Metric::kLlmGrade: return "llm_grade";
  }
  return "bleu";
}

Metric metric_from_string(const std::string& name) {
  if (name == "bleu") return Metric::kBleu;
  if (name == "meteor") return Metric::kMeteor;
  if (name == "wer") return Metric::kWer;
  if (name == "cer") return Metric::kCer;
  if (name == "eed") return Metric::kEed;
  if (name == "bert_f1") return Metric::kBertF1;
  if (name == "llm_grade" || name == "llmg") return Metric::kLlmGrade;
  throw MetricsError("unknown metric '" + name + "'");
}

Direction direction_of(Metric metric) {
  switch (metric) {
    case Metric::kWer:
    case Metric::kCer:
    case Metric::kEed:
      return Direction::kLowerBetter;
    default:
      return Direction::kHigherBetter;
  }
}

const MetricScore* MetricReport::find(Metric metric) const {
  for (const MetricScore& s : scores) {
    if (s.metric == metric) return &s;
  }
  return nullptr;
}

std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return levenshtein_seq(a, b);
}

std::size_t levenshtein_chars(const std::string& a, const std::string& b) {
  return levenshtein_seq(uni::decode_utf8(a), uni::decode_utf8(b));
}

std::vector<std::string> bleu_tokens(const std::string& text, const MetricOptions& opts) {
  std::vector<uint32_t> cps = codepoints_of(text, opts);
  std::string spaced;
  for (uint32_t cp : cps) {
    bool punct = !uni::is_letter(cp) && !uni::is_digit(cp) && !uni::is_whitespace(cp);
    if (punct) spaced.push_back(' ');
    uni::append_utf8(spaced, cp);
    if (punct) spaced.push_back(' ');
  }
  return whitespace_tokens(spaced);
}

double corpus_bleu(const std::vector<std::pair<std::string, std::string>>& hyp_ref_pairs,
                   const MetricOptions& opts) {
  if (hyp_ref_pairs.empty()) throw MetricsError("corpus_bleu: empty hypothesis set");
  BleuStats stats(opts.max_ngram);
  for (const auto& [hyp, ref] : hyp_ref_pairs) {
    accumulate_bleu(&stats, bleu_tokens(hyp, opts), bleu_tokens(ref, opts), opts.max_ngram);
  }
  return bleu_from_stats(stats, /*smooth=*/false);
}

double sentence_bleu(const std::string& hyp, const std::string& ref,
                     const MetricOptions& opts) {
  BleuStats stats(opts.max_ngram);
  accumulate_bleu(&stats, bleu_tokens(hyp, opts), bleu_tokens(ref, opts), opts.max_ngram);
  return bleu_from_stats(stats, /*smooth=*/true);
}

double meteor(const std::string& hyp, const std::string& ref, const MetricOptions& opts) {
  std::vector<std::string> hyp_tokens = whitespace_tokens(maybe_normalize(hyp, opts));
  std::vector<std::string> ref_tokens = whitespace_tokens(maybe_normalize(ref, opts));
  if (hyp_tokens.empty() || ref_tokens.empty()) return 0.0;

  // Exact-match alignment; each hypothesis token takes the reference
  // position that extends the previous match when possible, else the
  // earliest free one. Chunks are maximal runs contiguous on both sides.
  std::vector<bool> ref_used(ref_tokens.size(), false);
  std::vector<long> align(hyp_tokens.size(), -1);
  long last_ref = -2;
  for (std::size_t i = 0; i < hyp_tokens.size(); ++i) {
    long chosen = -1;
    std::size_t next = static_cast<std::size_t>(last_ref + 1);
    if (last_ref + 1 >= 0 && next < ref_tokens.size() && !ref_used[next] &&
        ref_tokens[next] == hyp_tokens[i]) {
      chosen = last_ref + 1;
    } else {
      for (std::size_t j = 0; j < ref_tokens.size(); ++j) {
        if (!ref_used[j] && ref_tokens[j] == hyp_tokens[i]) {
          chosen = static_cast<long>(j);
          break;
        }
      }
    }
    align[i] = chosen;
    if (chosen >= 0) {
      ref_used[static_cast<std::size_t>(chosen)] = true;
      last_ref = chosen;
    }
  }

  std::size_t m = 0;
  std::size_t chunks = 0;
  long prev_ref = -2;
  bool in_chunk = false;
  for (std::size_t i = 0; i < align.size(); ++i) {
    if (align[i] < 0) {
      in_chunk = false;
      continue;
    }
    ++m;
    if (!in_chunk || align[i] != prev_ref + 1) ++chunks;
    in_chunk = true;
    prev_ref = align[i];
  }
  if (m == 0) return 0.0;

  double p = static_cast<double>(m) / static_cast<double>(hyp_tokens.size());
  double r = static_cast<double>(m) / static_cast<double>(ref_tokens.size());
  double f = 10.0 * p * r / (r + 9.0 * p);
  double frag = static_cast<double>(chunks) / static_cast<double>(m);
  double penalty = 0.5 * frag * frag * frag;
  return f * (1.0 - penalty);
}

double wer(const std::string& hyp, const std::string& ref, const MetricOptions& opts) {
  std::vector<std::string> hyp_tokens = whitespace_tokens(maybe_normalize(hyp, opts));
  std::vector<std::string> ref_tokens = whitespace_tokens(maybe_normalize(ref, opts));
  if (ref_tokens.empty()) throw MetricsError("wer: empty reference");
  return static_cast<double>(levenshtein(hyp_tokens, ref_tokens)) /
         static_cast<double>(ref_tokens.size());
}

double cer(const std::string& hyp, const std::string& ref, const MetricOptions& opts) {
  std::vector<uint32_t> hyp_cps = codepoints_of(hyp, opts);
  std::vector<uint32_t> ref_cps = codepoints_of(ref, opts);
  if (ref_cps.empty()) throw MetricsError("cer: empty reference");
  return static_cast<double>(levenshtein_seq(hyp_cps, ref_cps)) /
         static_cast<double>(ref_cps.size());
}

double eed(const std::string& hyp, const std::string& ref, const MetricOptions& opts) {
  std::vector<uint32_t> hyp_cps = codepoints_of(hyp, opts);
  std::vector<uint32_t> ref_cps = codepoints_of(ref, opts);
  std::size_t longest = std::max(hyp_cps.size(), ref_cps.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein_seq(hyp_cps, ref_cps)) /
         static_cast<double>(longest);
}

namespace {

void l2_normalize(std::vector<double>* v) {
  double norm = 0.0;
  for (double x : *v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm <= 0.0) return;  // zero vector contributes zero cosine
  for (double& x : *v) x /= norm;
}

double mean_max_cosine(const std::vector<std::vector<double>>& from,
                       const std::vector<std::vector<double>>& to) {
  double sum = 0.0;
  for (const auto& f : from) {
    double best = 0.0;
    for (const auto& t : to) {
      double dot = 0.0;
      std::size_t dim = std::min(f.size(), t.size());
      for (std::size_t k = 0; k < dim; ++k) dot += f[k] * t[k];
      best = std::max(best, dot);
    }
    sum += best;
  }
  return from.empty() ? 0.0 : sum / static_cast<double>(from.size());
}

}  // namespace

double bert_f1(const std::string& hyp, const std::string& ref, const EmbeddingClient& client,
               const MetricOptions& opts) {
  std::vector<std::string> hyp_tokens = whitespace_tokens(maybe_normalize(hyp, opts));
  std::vector<std::string> ref_tokens = whitespace_tokens(maybe_normalize(ref, opts));
  if (hyp_tokens.empty() && ref_tokens.empty()) return 1.0;
  if (hyp_tokens.empty() || ref_tokens.empty()) return 0.0;

  std::vector<std::string> all = hyp_tokens;
  all.insert(all.end(), ref_tokens.begin(), ref_tokens.end());
  std::vector<std::vector<double>> vectors = client.embed(all);
  if (vectors.size() != all.size()) {
    throw ClientError("embedding endpoint returned a wrong-sized vector list");
  }
  for (auto& v : vectors) l2_normalize(&v);
  std::vector<std::vector<double>> hyp_vecs(vectors.begin(),
                                            vectors.begin() + static_cast<long>(hyp_tokens.size()));
  std::vector<std::vector<double>> ref_vecs(vectors.begin() + static_cast<long>(hyp_tokens.size()),
                                            vectors.end());
  double precision = mean_max_cosine(hyp_vecs, ref_vecs);
  double recall = mean_max_cosine(ref_vecs, hyp_vecs);
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::string GraderRubric::render(const std::string& src, const std::string& hyp,
                                 const std::string& ref) const {
  std::string out = user_pattern;
  auto replace_all = [&out](const std::string& slot, const std::string& value) {
    for (std::size_t pos = out.find(slot); pos != std::string::npos;
         pos = out.find(slot, pos + value.size())) {
      out.replace(pos, slot.size(), value);
    }
  };
  replace_all("{src}", src);
  replace_all("{ref}", ref);
  replace_all("{hyp}", hyp);
  return out;
}

std::optional<int> parse_grade(const std::string& reply) {
  for (std::size_t i = 0; i < reply.size(); ++i) {
    if (reply[i] < '0' || reply[i] > '9') continue;
    std::size_t j = i;
    long value = 0;
    while (j < reply.size() && reply[j] >= '0' && reply[j] <= '9') {
      value = value * 10 + (reply[j] - '0');
      if (value > 1000) break;
      ++j;
    }
    if (value <= 10) return static_cast<int>(value);
    return std::nullopt;  // first integer out of range
  }
  return std::nullopt;
}

std::optional<double> llm_grade(const std::string& src, const std::string& hyp,
                                const std::string& ref, const ChatClient& client,
                                const GraderRubric& rubric) {
  constexpr int kAttempts = 3;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    ChatResult reply = client.complete(rubric.system_text, rubric.render(src, hyp, ref));
    std::optional<int> grade = parse_grade(reply.text);
    if (grade) return static_cast<double>(*grade) / 10.0;
  }
  return std::nullopt;
}

std::optional<std::string> reference_text(const Segment& segment, TargetLang lang) {
  switch (lang) {
    case TargetLang::kEn: return segment.ref_en;
    case TargetLang::kAr: return segment.ref_ar;
    case TargetLang::kCs: return segment.source_cs;
  }
  return std::nullopt;
}

namespace {

struct ScoredPair {
  std::string id;
  std::string hyp;
  std::string ref;
  std::string src;
};

MetricScore pure_metric_score(Metric metric, const std::vector<ScoredPair>& pairs,
                              const MetricOptions& opts) {
  MetricScore score;
  score.metric = metric;
  score.direction = direction_of(metric);
  switch (metric) {
    case Metric::kBleu: {
      std::vector<std::pair<std::string, std::string>> hyp_refs;
      hyp_refs.reserve(pairs.size());
      for (const ScoredPair& p : pairs) hyp_refs.emplace_back(p.hyp, p.ref);
      score.corpus_value = corpus_bleu(hyp_refs, opts);
      for (const ScoredPair& p : pairs) {
        score.segment_values[p.id] = sentence_bleu(p.hyp, p.ref, opts);
      }
      return score;
    }
    case Metric::kWer:
    case Metric::kCer: {
      // Corpus value is micro-averaged: total edits over total reference
      // units.
      std::size_t edits = 0;
      std::size_t units = 0;
      for (const ScoredPair& p : pairs) {
        if (metric == Metric::kWer) {
          auto hyp_tokens = whitespace_tokens(opts.normalize ? normalize_text(p.hyp, opts.norm)
                                                             : p.hyp);
          auto ref_tokens = whitespace_tokens(opts.normalize ? normalize_text(p.ref, opts.norm)
                                                             : p.ref);
          if (ref_tokens.empty()) throw MetricsError("wer: empty reference for segment " + p.id);
          std::size_t d = levenshtein(hyp_tokens, ref_tokens);
          edits += d;
          units += ref_tokens.size();
          score.segment_values[p.id] =
              static_cast<double>(d) / static_cast<double>(ref_tokens.size());
        } else {
          auto hyp_cps = uni::decode_utf8(opts.normalize ? normalize_text(p.hyp, opts.norm)
                                                         : p.hyp);
          auto ref_cps = uni::decode_utf8(opts.normalize ? normalize_text(p.ref, opts.norm)
                                                         : p.ref);
          if (ref_cps.empty()) throw MetricsError("cer: empty reference for segment " + p.id);
          std::size_t d = levenshtein_seq(hyp_cps, ref_cps);
          edits += d;
          units += ref_cps.size();
          score.segment_values[p.id] =
              static_cast<double>(d) / static_cast<double>(ref_cps.size());
        }
      }
      score.corpus_value = units == 0 ? 0.0
                                      : static_cast<double>(edits) / static_cast<double>(units);
      return score;
    }
    case Metric::kMeteor:
    case Metric::kEed: {
      double sum = 0.0;
      for (const ScoredPair& p : pairs) {
        double v = metric == Metric::kMeteor ? meteor(p.hyp, p.ref, opts)
                                             : eed(p.hyp, p.ref, opts);
        score.segment_values[p.id] = v;
        sum += v;
      }
      score.corpus_value = pairs.empty() ? 0.0 : sum / static_cast<double>(pairs.size());
      return score;
    }
    default:
      throw MetricsError("metric " + to_string(metric) + " needs an endpoint client");
  }
}

MetricScore network_metric_score(Metric metric, const std::vector<ScoredPair>& pairs,
                                 const MetricClients& clients, const MetricOptions& opts,
                                 const GraderRubric& rubric) {
  MetricScore score;
  score.metric = metric;
  score.direction = direction_of(metric);
  const bool is_bert = metric == Metric::kBertF1;
  if ((is_bert && clients.embeddings == nullptr) || (!is_bert && clients.grader == nullptr)) {
    score.available = false;
    score.note = "endpoint not configured";
    return score;
  }
  double sum = 0.0;
  std::size_t scored = 0;
  for (const ScoredPair& p : pairs) {
    try {
      std::optional<double> value;
      if (is_bert) {
        value = bert_f1(p.hyp, p.ref, *clients.embeddings, opts);
      } else {
        value = llm_grade(p.src, p.hyp, p.ref, *clients.grader, rubric);
      }
      if (!value) {
        score.excluded_segments.push_back(p.id);
        continue;
      }
      score.segment_values[p.id] = *value;
      sum += *value;
      ++scored;
    } catch (const ClientError& e) {
      score.excluded_segments.push_back(p.id);
      if (score.note.empty()) score.note = e.what();
    }
  }
  if (scored == 0) {
    score.available = false;
    if (score.note.empty()) score.note = "no segment could be scored";
    return score;
  }
  score.corpus_value = sum / static_cast<double>(scored);
  return score;
}

}  // namespace

MetricReport score_system(const Corpus& corpus, const HypothesisSet& hyps,
                          const std::vector<Metric>& metric_set, const MetricClients& clients,
                          const MetricOptions& opts, const std::string& config_fingerprint,
                          const GraderRubric& rubric) {
  if (corpus.empty()) throw MetricsError("score_system: empty corpus");
  if (hyps.entries.empty()) throw MetricsError("score_system: empty hypothesis set");

  std::vector<ScoredPair> pairs;
  for (const Segment& segment : corpus.segments()) {
    auto it = hyps.entries.find(segment.id);
    if (it == hyps.entries.end()) continue;
    std::optional<std::string> ref = reference_text(segment, hyps.target_lang);
    if (!ref) {
      throw MetricsError("segment " + segment.id + " has no " +
                         to_string(hyps.target_lang) + " reference");
    }
    pairs.push_back(ScoredPair{segment.id, it->second, *ref, segment.source_cs});
  }
  if (pairs.empty()) throw MetricsError("score_system: hypotheses cover no corpus segment");

  MetricReport report;
  report.system_id = hyps.system_id;
  report.target_lang = to_string(hyps.target_lang);
  report.config_fingerprint = config_fingerprint;
  report.segments_scored = pairs.size();
  report.coverage = static_cast<double>(pairs.size()) / static_cast<double>(corpus.size());
  for (Metric metric : metric_set) {
    if (metric == Metric::kBertF1 || metric == Metric::kLlmGrade) {
      report.scores.push_back(network_metric_score(metric, pairs, clients, opts, rubric));
    } else {
      report.scores.push_back(pure_metric_score(metric, pairs, opts));
    }
  }
  return report;
}

std::vector<LeaderboardRow> rank_systems(const std::vector<MetricReport>& reports,
                                         Metric key_metric) {
  if (reports.empty()) throw MetricsError("rank_systems: no reports");
  for (const MetricReport& r : reports) {
    if (r.config_fingerprint != reports.front().config_fingerprint) {
      throw MetricsError("rank_systems: fingerprint mismatch between '" +
                         reports.front().system_id + "' and '" + r.system_id + "'");
    }
    if (r.target_lang != reports.front().target_lang) {
      throw MetricsError("rank_systems: target language mismatch between '" +
                         reports.front().system_id + "' and '" + r.system_id + "'");
    }
  }
  std::vector<LeaderboardRow> rows;
  for (const MetricReport& r : reports) {
    const MetricScore* score = r.find(key_metric);
    if (score == nullptr || !score->available) {
      throw MetricsError("rank_systems: report '" + r.system_id + "' lacks metric " +
                         to_string(key_metric));
    }
    rows.push_back(LeaderboardRow{0, r.system_id, score->corpus_value});
  }
  const bool higher = direction_of(key_metric) == Direction::kHigherBetter;
  std::sort(rows.begin(), rows.end(), [higher](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.value != b.value) return higher ? a.value > b.value : a.value < b.value;
    return a.system_id < b.system_id;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i) + 1;
  return rows;
}

}  // namespace csteval
