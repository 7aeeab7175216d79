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

#ifndef CSTEVAL_BENCH_HPP_
#define CSTEVAL_BENCH_HPP_

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csteval/audio.hpp"
#include "csteval/clients.hpp"
#include "csteval/metrics.hpp"

namespace csteval {

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Monotone seconds source; injectable so tests can fake time.
using Clock = std::function<double()>;
double monotone_seconds();

struct BenchResult {
  std::string endpoint_label;
  double tokens_per_s = 0.0;  // throughput runs only
  std::optional<double> latency_s_per_clip;
  double wall_clock_s = 0.0;  // measured (post-warmup) request time
  std::size_t request_count = 0;
  std::size_t failures = 0;
  bool token_count_estimated = false;  // endpoint sent no usage field
};

// Sequential prompt replay; the first `warmup` requests are excluded from
// both token and time totals. Token counts come from the endpoint usage
// field when present, else a whitespace-token fallback (flagged).
BenchResult measure_throughput(const ChatClient& mt, const std::vector<std::string>& prompts,
                               std::size_t warmup = 2, const Clock& clock = monotone_seconds);

// Median end-to-end seconds per clip over `repeats` sequential requests.
BenchResult measure_latency(const AsrClient& asr, const AudioClip& clip, std::size_t repeats,
                            const Clock& clock = monotone_seconds);

struct DegradationEntry {
  Metric metric = Metric::kBleu;
  double full_value = 0.0;
  double quant_value = 0.0;
  // Positive when the quantized endpoint is worse; antisymmetric under
  // swapping the two reports.
  double relative = 0.0;
};

// Relative per-metric deltas between a full-precision and a quantized run.
// Both reports must share fingerprint and target language.
std::vector<DegradationEntry> degradation(const MetricReport& full, const MetricReport& quant);

}  // namespace csteval

#endif  // CSTEVAL_BENCH_HPP_
