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

#include <filesystem>
#include <fstream>
#include <regex>
#include <string>
#include <vector>

#include "csteval/report.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace csteval;

namespace {

MetricReport sample_report() {
  MetricReport report;
  report.system_id = "cascade-demo";
  report.target_lang = "en";
  report.config_fingerprint = "00ff00ff00ff00ff";
  report.coverage = 0.75;
  report.segments_scored = 3;

  MetricScore bleu;
  bleu.metric = Metric::kBleu;
  bleu.corpus_value = 38.41;
  bleu.segment_values = {{"seg-1", 100.0}, {"seg-2", 12.5}};
  report.scores.push_back(bleu);

  MetricScore wer;
  wer.metric = Metric::kWer;
  wer.direction = Direction::kLowerBetter;
  wer.corpus_value = 0.31;
  report.scores.push_back(wer);

  MetricScore bert;
  bert.metric = Metric::kBertF1;
  bert.available = false;
  bert.note = "endpoint not configured";
  bert.excluded_segments = {"seg-9"};
  report.scores.push_back(bert);
  return report;
}

}  // namespace

TEST_CASE("report JSON round trips and stays byte-stable") {
  MetricReport report = sample_report();
  std::string first = report_json(report, "2026-01-01T00:00:00Z");
  std::string second = report_json(report, "2026-01-01T00:00:00Z");
  CHECK(first == second);
  // A different timestamp changes only the generated_at line.
  std::string later = report_json(report, "2026-01-02T09:30:00Z");
  nlohmann::json a = nlohmann::json::parse(first);
  nlohmann::json b = nlohmann::json::parse(later);
  CHECK(a["meta"]["generated_at"] != b["meta"]["generated_at"]);
  a["meta"].erase("generated_at");
  b["meta"].erase("generated_at");
  CHECK(a == b);

  MetricReport back = report_from_json(first);
  CHECK(back.system_id == report.system_id);
  CHECK(back.target_lang == report.target_lang);
  CHECK(back.config_fingerprint == report.config_fingerprint);
  CHECK(back.coverage == doctest::Approx(report.coverage));
  CHECK(back.segments_scored == report.segments_scored);
  const MetricScore* bleu = back.find(Metric::kBleu);
  REQUIRE(bleu != nullptr);
  CHECK(bleu->corpus_value == doctest::Approx(38.41));
  CHECK(bleu->segment_values.at("seg-2") == doctest::Approx(12.5));
  CHECK(bleu->direction == Direction::kHigherBetter);
  const MetricScore* bert = back.find(Metric::kBertF1);
  REQUIRE(bert != nullptr);
  CHECK_FALSE(bert->available);
  CHECK(bert->note == "endpoint not configured");
  CHECK(bert->excluded_segments == std::vector<std::string>{"seg-9"});
  const MetricScore* wer = back.find(Metric::kWer);
  CHECK(wer->direction == Direction::kLowerBetter);
}

TEST_CASE("malformed report JSON is rejected with context") {
  CHECK_THROWS_WITH_AS(report_from_json("nope"), doctest::Contains("parse error"),
                       MetricsError);
  CHECK_THROWS_WITH_AS(report_from_json("{\"meta\": {}}"), doctest::Contains("misses a field"),
                       MetricsError);
}

TEST_CASE("timestamps are ISO-8601 UTC") {
  std::string stamp = iso8601_utc_now();
  CHECK(std::regex_match(stamp,
                         std::regex(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)")));
}

TEST_CASE("report markdown keeps the fixed column order with placeholders") {
  MetricReport full = sample_report();
  MetricReport sparse;
  sparse.system_id = "asr-only";
  sparse.target_lang = "en";
  sparse.config_fingerprint = full.config_fingerprint;
  MetricScore cer;
  cer.metric = Metric::kCer;
  cer.direction = Direction::kLowerBetter;
  cer.corpus_value = 0.125;
  sparse.scores.push_back(cer);

  std::string md = report_markdown({full, sparse});
  // Requested columns appear in table order: BLEU, BERT-F1, WER, CER.
  CHECK(md.find("| Model | BLEU ↑ | BERT-F1 ↑ | WER ↓ | CER ↓ |") == 0);
  // Unavailable and missing cells render as the placeholder dash.
  CHECK(md.find("| cascade-demo | 38.41 | — | 0.310 | — |") != std::string::npos);
  CHECK(md.find("| asr-only | — | — | — | 0.125 |") != std::string::npos);
  // Metrics nobody carries produce no column.
  CHECK(md.find("METEOR") == std::string::npos);
  CHECK(md.find("EED") == std::string::npos);
}

TEST_CASE("leaderboard artifacts include rank, system, and key metric") {
  std::vector<LeaderboardRow> rows = {
      {1, "best", 53.64},
      {2, "second", 38.41},
  };
  std::string json_text = leaderboard_json(rows, Metric::kBleu, "fp", "2026-01-01T00:00:00Z");
  nlohmann::json doc = nlohmann::json::parse(json_text);
  CHECK(doc["leaderboard"]["key_metric"] == "bleu");
  CHECK(doc["leaderboard"]["entries"][0]["system_id"] == "best");
  CHECK(doc["leaderboard"]["entries"][0]["rank"] == 1);
  CHECK(doc["meta"]["fingerprint"] == "fp");

  std::string md = leaderboard_markdown(rows, Metric::kBleu);
  CHECK(md.find("| Rank | Model | BLEU ↑ |") == 0);
  CHECK(md.find("| 1 | best | 53.64 |") != std::string::npos);
  CHECK(md.find("| 2 | second | 38.41 |") != std::string::npos);
}

TEST_CASE("bench artifacts carry throughput and latency rows") {
  BenchResult throughput;
  throughput.endpoint_label = "mt-8b";
  throughput.tokens_per_s = 42.5;
  throughput.wall_clock_s = 12.0;
  throughput.request_count = 10;
  BenchResult latency;
  latency.endpoint_label = "asr-large";
  latency.latency_s_per_clip = 0.104;
  latency.request_count = 5;
  latency.failures = 1;

  std::string json_text = bench_json({throughput, latency}, "fp", "2026-01-01T00:00:00Z");
  nlohmann::json doc = nlohmann::json::parse(json_text);
  CHECK(doc["bench"][0]["tokens_per_s"] == doctest::Approx(42.5));
  CHECK(doc["bench"][0]["latency_s_per_clip"].is_null());
  CHECK(doc["bench"][1]["latency_s_per_clip"] == doctest::Approx(0.104));
  CHECK(doc["bench"][1]["failures"] == 1);

  std::string md = bench_markdown({throughput, latency});
  CHECK(md.find("| mt-8b | 42.50 | — | 10 | 0 |") != std::string::npos);
  CHECK(md.find("| asr-large | — | 0.104 | 5 | 1 |") != std::string::npos);
}

TEST_CASE("degradation artifacts format relative drops as percentages") {
  DegradationEntry entry;
  entry.metric = Metric::kBleu;
  entry.full_value = 53.64;
  entry.quant_value = 53.01;
  entry.relative = 0.63 / 53.64;

  std::string json_text = degradation_json({entry}, "fp", "2026-01-01T00:00:00Z");
  nlohmann::json doc = nlohmann::json::parse(json_text);
  CHECK(doc["degradation"][0]["metric"] == "bleu");
  CHECK(doc["degradation"][0]["relative"] == doctest::Approx(0.0117449));

  std::string md = degradation_markdown({entry});
  CHECK(md.find("| BLEU | 53.64 | 53.01 | 1.17% |") != std::string::npos);
}

TEST_CASE("text files are written atomically enough to read back") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "csteval-report-test";
  fs::create_directories(dir);
  std::string path = (dir / "report.md").string();
  write_text_file(path, "hello\nworld\n");
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "hello\nworld\n");
  CHECK_THROWS_AS(write_text_file((dir / "no-dir" / "x.md").string(), "x"),
                  std::runtime_error);
  fs::remove_all(dir);
}
