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

#include "csteval/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "csteval/text_normalize.hpp"

namespace csteval {

double monotone_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

BenchResult measure_throughput(const ChatClient& mt, const std::vector<std::string>& prompts,
                               std::size_t warmup, const Clock& clock) {
  if (prompts.size() <= warmup) {
    throw BenchError("need at least one prompt beyond the " + std::to_string(warmup) +
                     " warmup requests");
  }
  BenchResult result;
  result.endpoint_label = mt.config().model_id.empty() ? mt.config().base_url
                                                       : mt.config().model_id;
  long long tokens = 0;
  double measured_s = 0.0;
  std::size_t successes = 0;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const bool measured = i >= warmup;
    double t0 = clock();
    try {
      ChatResult reply = mt.complete("", prompts[i]);
      double elapsed = std::max(0.0, clock() - t0);
      if (!measured) continue;
      ++result.request_count;
      ++successes;
      measured_s += elapsed;
      if (reply.completion_tokens) {
        tokens += *reply.completion_tokens;
      } else {
        tokens += static_cast<long long>(whitespace_tokens(reply.text).size());
        result.token_count_estimated = true;
      }
    } catch (const ClientError&) {
      if (!measured) continue;
      ++result.request_count;
      ++result.failures;
    }
  }
  if (successes == 0) throw BenchError("all throughput requests failed");
  result.wall_clock_s = measured_s;
  result.tokens_per_s = measured_s > 0.0 ? static_cast<double>(tokens) / measured_s : 0.0;
  return result;
}

BenchResult measure_latency(const AsrClient& asr, const AudioClip& clip, std::size_t repeats,
                            const Clock& clock) {
  if (repeats < 1) throw BenchError("latency measurement needs repeats >= 1");
  BenchResult result;
  result.endpoint_label = asr.config().model_id.empty() ? asr.config().base_url
                                                        : asr.config().model_id;
  std::vector<double> samples;
  for (std::size_t i = 0; i < repeats; ++i) {
    double t0 = clock();
    ++result.request_count;
    try {
      asr.transcribe(clip);
      double elapsed = std::max(0.0, clock() - t0);
      samples.push_back(elapsed);
      result.wall_clock_s += elapsed;
    } catch (const ClientError&) {
      ++result.failures;
    }
  }
  if (samples.empty()) throw BenchError("all latency requests failed");
  std::sort(samples.begin(), samples.end());
  std::size_t n = samples.size();
  double median = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  result.latency_s_per_clip = median;
  return result;
}

std::vector<DegradationEntry> degradation(const MetricReport& full, const MetricReport& quant) {
  if (full.config_fingerprint != quant.config_fingerprint) {
    throw BenchError("degradation: reports have different config fingerprints");
  }
  if (full.target_lang != quant.target_lang) {
    throw BenchError("degradation: reports have different target languages");
  }
  std::vector<DegradationEntry> out;
  for (const MetricScore& f : full.scores) {
    if (!f.available) continue;
    const MetricScore* q = quant.find(f.metric);
    if (q == nullptr || !q->available) continue;
    DegradationEntry entry;
    entry.metric = f.metric;
    entry.full_value = f.corpus_value;
    entry.quant_value = q->corpus_value;
    // Denominator max(|full|, |quant|) keeps the delta antisymmetric under
    // swapping reports; it equals full whenever quality degraded, the case
    // the percentage is quoted for.
    double denom = std::max(std::abs(f.corpus_value), std::abs(q->corpus_value));
    double diff = f.corpus_value - q->corpus_value;
    if (f.direction == Direction::kLowerBetter) diff = -diff;
    entry.relative = denom > 0.0 ? diff / denom : 0.0;
    out.push_back(entry);
  }
  return out;
}

}  // namespace csteval
