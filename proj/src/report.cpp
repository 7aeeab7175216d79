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

#include "csteval/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "json.hpp"

namespace csteval {
namespace {

constexpr const char* kUnavailable = "—";

// Fixed column order matching the translation tables first, ASR columns
// last.
constexpr Metric kColumnOrder[] = {Metric::kBleu,   Metric::kBertF1,  Metric::kEed,
                                   Metric::kMeteor, Metric::kLlmGrade, Metric::kWer,
                                   Metric::kCer};

std::string format_value(Metric metric, double value) {
  char buf[32];
  if (metric == Metric::kBleu) {
    std::snprintf(buf, sizeof(buf), "%.2f", value);
  } else {
    std::snprintf(buf, sizeof(buf), "%.3f", value);
  }
  return std::string(buf);
}

std::string arrow(Metric metric) {
  return direction_of(metric) == Direction::kHigherBetter ? "↑" : "↓";
}

nlohmann::json meta_block(const std::string& fingerprint, const std::string& generated_at) {
  return {{"fingerprint", fingerprint},
          {"generated_at", generated_at},
          {"generator", "csteval"}};
}

nlohmann::json score_to_json(const MetricScore& score) {
  nlohmann::json segments = nlohmann::json::object();
  for (const auto& [id, value] : score.segment_values) segments[id] = value;
  return {{"corpus", score.corpus_value},
          {"direction",
           score.direction == Direction::kHigherBetter ? "higher_better" : "lower_better"},
          {"available", score.available},
          {"segments", std::move(segments)},
          {"excluded_segments", score.excluded_segments},
          {"note", score.note}};
}

}  // namespace

std::string iso8601_utc_now() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return std::string(buf);
}

std::string metric_display_name(Metric metric) {
  switch (metric) {
    case Metric::kBleu: return "BLEU";
    case Metric::kMeteor: return "METEOR";
    case Metric::kWer: return "WER";
    case Metric::kCer: return "CER";
    case Metric::kEed: return "EED";
    case Metric::kBertF1: return "BERT-F1";
    case Metric::kLlmGrade: return "LLMG";
  }
  return "BLEU";
}

std::string report_json(const MetricReport& report, const std::string& generated_at) {
  nlohmann::json scores = nlohmann::json::object();
  for (const MetricScore& score : report.scores) {
    scores[to_string(score.metric)] = score_to_json(score);
  }
  nlohmann::json doc = {
      {"meta", meta_block(report.config_fingerprint, generated_at)},
      {"report",
       {{"system_id", report.system_id},
        {"target_lang", report.target_lang},
        {"coverage", report.coverage},
        {"segments_scored", report.segments_scored},
        {"scores", std::move(scores)}}},
  };
  return doc.dump(2) + "\n";
}

std::string leaderboard_json(const std::vector<LeaderboardRow>& rows, Metric key_metric,
                             const std::string& fingerprint, const std::string& generated_at) {
  nlohmann::json entries = nlohmann::json::array();
  for (const LeaderboardRow& row : rows) {
    entries.push_back(
        {{"rank", row.rank}, {"system_id", row.system_id}, {"value", row.value}});
  }
  nlohmann::json doc = {{"meta", meta_block(fingerprint, generated_at)},
                        {"leaderboard",
                         {{"key_metric", to_string(key_metric)}, {"entries", std::move(entries)}}}};
  return doc.dump(2) + "\n";
}

std::string bench_json(const std::vector<BenchResult>& results, const std::string& fingerprint,
                       const std::string& generated_at) {
  nlohmann::json entries = nlohmann::json::array();
  for (const BenchResult& r : results) {
    nlohmann::json entry = {{"endpoint_label", r.endpoint_label},
                            {"tokens_per_s", r.tokens_per_s},
                            {"wall_clock_s", r.wall_clock_s},
                            {"request_count", r.request_count},
                            {"failures", r.failures},
                            {"token_count_estimated", r.token_count_estimated}};
    if (r.latency_s_per_clip) {
      entry["latency_s_per_clip"] = *r.latency_s_per_clip;
    } else {
      entry["latency_s_per_clip"] = nullptr;
    }
    entries.push_back(std::move(entry));
  }
  nlohmann::json doc = {{"meta", meta_block(fingerprint, generated_at)},
                        {"bench", std::move(entries)}};
  return doc.dump(2) + "\n";
}

std::string degradation_json(const std::vector<DegradationEntry>& entries,
                             const std::string& fingerprint, const std::string& generated_at) {
  nlohmann::json list = nlohmann::json::array();
  for (const DegradationEntry& e : entries) {
    list.push_back({{"metric", to_string(e.metric)},
                    {"full", e.full_value},
                    {"quantized", e.quant_value},
                    {"relative", e.relative}});
  }
  nlohmann::json doc = {{"meta", meta_block(fingerprint, generated_at)},
                        {"degradation", std::move(list)}};
  return doc.dump(2) + "\n";
}

MetricReport report_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw MetricsError(std::string("report JSON parse error: ") + e.what());
  }
  MetricReport report;
  try {
    report.config_fingerprint = doc.at("meta").at("fingerprint").get<std::string>();
    const nlohmann::json& body = doc.at("report");
    report.system_id = body.at("system_id").get<std::string>();
    report.target_lang = body.at("target_lang").get<std::string>();
    report.coverage = body.at("coverage").get<double>();
    report.segments_scored = body.at("segments_scored").get<std::size_t>();
    for (const auto& [name, value] : body.at("scores").items()) {
      MetricScore score;
      score.metric = metric_from_string(name);
      score.direction = direction_of(score.metric);
      score.corpus_value = value.at("corpus").get<double>();
      score.available = value.at("available").get<bool>();
      if (value.contains("segments")) {
        for (const auto& [id, v] : value["segments"].items()) {
          score.segment_values[id] = v.get<double>();
        }
      }
      if (value.contains("excluded_segments")) {
        score.excluded_segments = value["excluded_segments"].get<std::vector<std::string>>();
      }
      score.note = value.value("note", "");
      report.scores.push_back(std::move(score));
    }
  } catch (const nlohmann::json::exception& e) {
    throw MetricsError(std::string("report JSON misses a field: ") + e.what());
  }
  return report;
}

std::string report_markdown(const std::vector<MetricReport>& reports) {
  // Only columns some report actually carries.
  std::vector<Metric> columns;
  for (Metric metric : kColumnOrder) {
    for (const MetricReport& r : reports) {
      if (r.find(metric) != nullptr) {
        columns.push_back(metric);
        break;
      }
    }
  }
  std::string out = "| Model |";
  for (Metric metric : columns) {
    out += " " + metric_display_name(metric) + " " + arrow(metric) + " |";
  }
  out += "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
  out += "\n";
  for (const MetricReport& r : reports) {
    out += "| " + r.system_id + " |";
    for (Metric metric : columns) {
      const MetricScore* score = r.find(metric);
      if (score == nullptr || !score->available) {
        out += std::string(" ") + kUnavailable + " |";
      } else {
        out += " " + format_value(metric, score->corpus_value) + " |";
      }
    }
    out += "\n";
  }
  return out;
}

std::string leaderboard_markdown(const std::vector<LeaderboardRow>& rows, Metric key_metric) {
  std::string out =
      "| Rank | Model | " + metric_display_name(key_metric) + " " + arrow(key_metric) + " |\n";
  out += "|---|---|---|\n";
  for (const LeaderboardRow& row : rows) {
    out += "| " + std::to_string(row.rank) + " | " + row.system_id + " | " +
           format_value(key_metric, row.value) + " |\n";
  }
  return out;
}

std::string bench_markdown(const std::vector<BenchResult>& results) {
  std::string out = "| Endpoint | tokens/s | latency s/clip | requests | failures |\n";
  out += "|---|---|---|---|---|\n";
  char buf[32];
  for (const BenchResult& r : results) {
    out += "| " + r.endpoint_label + " | ";
    if (r.tokens_per_s > 0.0) {
      std::snprintf(buf, sizeof(buf), "%.2f", r.tokens_per_s);
      out += buf;
    } else {
      out += kUnavailable;
    }
    out += " | ";
    if (r.latency_s_per_clip) {
      std::snprintf(buf, sizeof(buf), "%.3f", *r.latency_s_per_clip);
      out += buf;
    } else {
      out += kUnavailable;
    }
    out += " | " + std::to_string(r.request_count) + " | " + std::to_string(r.failures) + " |\n";
  }
  return out;
}

std::string degradation_markdown(const std::vector<DegradationEntry>& entries) {
  std::string out = "| Metric | Full | Quantized | Degradation % |\n|---|---|---|---|\n";
  char buf[32];
  for (const DegradationEntry& e : entries) {
    out += "| " + metric_display_name(e.metric) + " | " + format_value(e.metric, e.full_value) +
           " | " + format_value(e.metric, e.quant_value) + " | ";
    std::snprintf(buf, sizeof(buf), "%.2f%%", e.relative * 100.0);
    out += buf;
    out += " |\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

}  // namespace csteval
