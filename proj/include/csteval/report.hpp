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

#ifndef CSTEVAL_REPORT_HPP_
#define CSTEVAL_REPORT_HPP_

#include <string>
#include <vector>

#include "csteval/bench.hpp"
#include "csteval/metrics.hpp"

namespace csteval {

// Wall-clock timestamp for the metadata block. All JSON artifacts are
// byte-stable across runs except for this one field.
std::string iso8601_utc_now();

std::string metric_display_name(Metric metric);

// Machine-facing artifacts: sorted-key JSON with a meta block carrying the
// fingerprint and timestamp.
std::string report_json(const MetricReport& report, const std::string& generated_at);
std::string leaderboard_json(const std::vector<LeaderboardRow>& rows, Metric key_metric,
                             const std::string& fingerprint, const std::string& generated_at);
std::string bench_json(const std::vector<BenchResult>& results, const std::string& fingerprint,
                       const std::string& generated_at);
std::string degradation_json(const std::vector<DegradationEntry>& entries,
                             const std::string& fingerprint, const std::string& generated_at);

// Reads back a report JSON artifact (for ranking and degradation across
// separately produced reports).
MetricReport report_from_json(const std::string& json_text);

// Human-facing tables; one row per system, fixed column order, "—" for
// metrics that are unavailable or not requested.
std::string report_markdown(const std::vector<MetricReport>& reports);
std::string leaderboard_markdown(const std::vector<LeaderboardRow>& rows, Metric key_metric);
std::string bench_markdown(const std::vector<BenchResult>& results);
std::string degradation_markdown(const std::vector<DegradationEntry>& entries);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace csteval

#endif  // CSTEVAL_REPORT_HPP_
