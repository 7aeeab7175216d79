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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "csteval/bench.hpp"
#include "csteval/config.hpp"
#include "csteval/corpus.hpp"
#include "csteval/metrics.hpp"
#include "csteval/pipeline.hpp"
#include "csteval/report.hpp"
#include "csteval/tokenizer.hpp"
#include "json.hpp"

namespace {

using namespace csteval;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPartialFailure = 2;
constexpr int kExitEvaluation = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ensure_output_dir(const HarnessConfig& config) {
  std::filesystem::create_directories(config.output_dir);
}

std::optional<SplitExpectation> expectation_from_config(const HarnessConfig& config) {
  if (config.corpus.expected_splits.empty()) return std::nullopt;
  SplitExpectation exp;
  for (const auto& [name, count] : config.corpus.expected_splits) {
    exp.counts[split_from_string(name)] = count;
  }
  return exp;
}

LimiterPtr make_global_limiter(const HarnessConfig& config) {
  // One bound shared by every client in the process: the smallest
  // max_in_flight among the configured endpoints.
  int limit = 0;
  for (const auto& ep : {config.asr, config.mt, config.embeddings, config.grader}) {
    if (ep) limit = limit == 0 ? ep->max_in_flight : std::min(limit, ep->max_in_flight);
  }
  return std::make_shared<ConcurrencyLimiter>(limit == 0 ? 4 : limit);
}

int cmd_ingest(const std::string& config_path) {
  HarnessConfig config = load_config(config_path);
  validate_config_paths(config);
  ensure_output_dir(config);
  Corpus corpus = load_corpus(config.corpus.path, config.corpus.format);
  ValidationReport validation = validate_corpus(corpus, expectation_from_config(config));
  CodeSwitchStats stats = codeswitch_stats(corpus, true, config.normalization);

  nlohmann::json splits = nlohmann::json::object();
  for (const auto& [split, count] : validation.split_counts) splits[to_string(split)] = count;
  nlohmann::json mismatches = nlohmann::json::object();
  for (const auto& [name, pair] : validation.mismatches) {
    mismatches[name] = {{"expected", pair.first}, {"actual", pair.second}};
  }
  nlohmann::json doc = {
      {"meta",
       {{"fingerprint", config.fingerprint()},
        {"generated_at", iso8601_utc_now()},
        {"generator", "csteval"}}},
      {"validation",
       {{"total_segments", validation.total_segments},
        {"splits", std::move(splits)},
        {"empty_ref_en", validation.empty_ref_en},
        {"empty_ref_ar", validation.empty_ref_ar},
        {"missing_audio", validation.missing_audio},
        {"passed", validation.passed},
        {"mismatches", std::move(mismatches)}}},
      {"codeswitch",
       {{"arabic_token_fraction", stats.arabic_token_fraction},
        {"latin_token_fraction", stats.latin_token_fraction},
        {"other_fraction", stats.other_fraction},
        {"segments_with_switch", stats.segments_with_switch},
        {"word_overlap_src_to_ar", stats.word_overlap_src_to_ar},
        {"total_tokens", stats.total_tokens}}},
  };
  std::string json_path = config.output_dir + "/ingest.json";
  write_text_file(json_path, doc.dump(2) + "\n");

  std::ostringstream md;
  md << "| Split | Segments |\n|---|---|\n";
  for (const auto& [split, count] : validation.split_counts) {
    md << "| " << to_string(split) << " | " << count << " |\n";
  }
  char overlap[32];
  std::snprintf(overlap, sizeof(overlap), "%.4f", stats.word_overlap_src_to_ar);
  md << "\nSource words also present in the Arabic reference: " << overlap << "\n";
  write_text_file(config.output_dir + "/ingest.md", md.str());
  std::cout << md.str();
  if (!validation.passed) {
    std::cerr << "validation failed; see " << json_path << "\n";
    return kExitEvaluation;
  }
  return kExitOk;
}

int cmd_preprocess(const std::string& config_path, const std::string& text,
                   const std::string& audio_path) {
  HarnessConfig config = load_config(config_path);
  if (!text.empty()) {
    std::cout << normalize_text(text, config.normalization) << "\n";
    return kExitOk;
  }
  if (!audio_path.empty()) {
    AudioClip clip = read_wav(audio_path);
    AudioClip resampled = resample_audio(clip, kPipelineSampleRate);
    std::vector<AudioClip> clips = segment_audio(resampled);
    std::cout << "input: " << clip.samples.size() << " samples @ " << clip.sample_rate
              << " Hz\n";
    std::cout << "clips: " << clips.size() << "\n";
    for (std::size_t i = 0; i < clips.size(); ++i) {
      MelSpectrogram mel = mel_spectrogram(clips[i]);
      std::cout << "clip " << i << ": mel " << mel.frames() << " x " << mel.bins() << "\n";
    }
    return kExitOk;
  }
  std::cerr << "preprocess needs --text or --audio\n";
  return kExitUsage;
}

std::vector<std::pair<std::string, TokenizerModel>> load_tokenizer_models(
    const HarnessConfig& config) {
  if (config.tokenizers.empty()) {
    throw ConfigError("no tokenizer model paths configured");
  }
  std::vector<std::pair<std::string, TokenizerModel>> models;
  for (const auto& [label, path] : config.tokenizers) {
    models.emplace_back(label, load_tokenizer(path));
  }
  return models;
}

int cmd_tokenize(const std::string& config_path, const std::string& text,
                 const std::string& file, bool stats) {
  HarnessConfig config = load_config(config_path);
  auto models = load_tokenizer_models(config);
  std::vector<std::pair<std::string, const TokenizerModel*>> refs;
  refs.reserve(models.size());
  for (const auto& [label, model] : models) refs.emplace_back(label, &model);

  if (stats) {
    Corpus corpus = load_corpus(config.corpus.path, config.corpus.format);
    std::cout << "| Model | Tokens | Words | Fertility |\n|---|---|---|---|\n";
    for (const auto& [label, model] : refs) {
      std::size_t tokens = 0;
      std::size_t words = 0;
      for (const Segment& segment : corpus.segments()) {
        auto rows = compare_tokenizers({{label, model}}, segment.source_cs);
        tokens += rows[0].token_count;
        words += whitespace_tokens(segment.source_cs).size();
      }
      char fertility[32];
      std::snprintf(fertility, sizeof(fertility), "%.3f",
                    words == 0 ? 0.0 : static_cast<double>(tokens) / static_cast<double>(words));
      std::cout << "| " << label << " | " << tokens << " | " << words << " | " << fertility
                << " |\n";
    }
    return kExitOk;
  }

  std::string input = text;
  if (!file.empty()) input = read_file(file);
  auto rows = compare_tokenizers(refs, input);
  std::cout << "| Model | Tokens | Count | Fertility |\n|---|---|---|---|\n";
  for (const TokenizerComparisonRow& row : rows) {
    std::string pieces;
    for (const std::string& piece : row.pieces) {
      if (!pieces.empty()) pieces += ' ';
      pieces += piece;
    }
    char fertility[32];
    std::snprintf(fertility, sizeof(fertility), "%.3f", row.fertility);
    std::cout << "| " << row.model_name << " | " << pieces << " | " << row.token_count << " | "
              << fertility << " |\n";
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& config_path, const std::string& hyp_path,
                 const std::string& target, std::string system_id) {
  HarnessConfig config = load_config(config_path);
  validate_config_paths(config);
  ensure_output_dir(config);
  Corpus corpus = load_corpus(config.corpus.path, config.corpus.format);
  if (system_id.empty()) {
    system_id = std::filesystem::path(hyp_path).stem().string();
  }
  HypothesisSet hyps = load_hypotheses(hyp_path, system_id, target_lang_from_string(target));

  LimiterPtr limiter = make_global_limiter(config);
  std::optional<EmbeddingClient> embeddings;
  std::optional<ChatClient> grader;
  MetricClients clients;
  if (config.embeddings) {
    embeddings.emplace(*config.embeddings, limiter);
    clients.embeddings = &*embeddings;
  }
  if (config.grader) {
    grader.emplace(*config.grader, limiter);
    clients.grader = &*grader;
  }

  MetricReport report = score_system(corpus, hyps, config.metrics.set, clients,
                                     config.metric_options(), config.fingerprint());
  std::string base = config.output_dir + "/report_" + system_id;
  write_text_file(base + ".json", report_json(report, iso8601_utc_now()));
  std::string md = report_markdown({report});
  write_text_file(base + ".md", md);
  std::cout << md;
  std::cout << "fingerprint: " << report.config_fingerprint << "\n";
  return kExitOk;
}

int cmd_pipeline(const std::string& config_path, const std::string& target,
                 std::string checkpoint, std::string out_path) {
  HarnessConfig config = load_config(config_path);
  validate_config_paths(config);
  if (!config.asr) throw ConfigError("pipeline needs endpoints.asr");
  if (!config.mt) throw ConfigError("pipeline needs endpoints.mt");
  ensure_output_dir(config);
  Corpus corpus = load_corpus(config.corpus.path, config.corpus.format);
  TargetLang lang = target_lang_from_string(target);
  if (checkpoint.empty()) {
    checkpoint = config.output_dir + "/checkpoint_" + target + ".jsonl";
  }
  if (out_path.empty()) out_path = config.output_dir + "/hyps_" + target + ".jsonl";

  LimiterPtr limiter = make_global_limiter(config);
  AsrClient asr(*config.asr, limiter);
  ChatClient mt(*config.mt, limiter);

  BatchOptions options;
  options.checkpoint_path = checkpoint;
  options.audio_root = config.corpus.audio_root;
  options.norm = config.normalization;

  RunLog log;
  HypothesisSet hyps = batch_run(corpus, asr, mt, lang, options, &log);
  save_hypotheses(hyps, out_path);

  nlohmann::json failures = nlohmann::json::array();
  for (const RunFailure& f : log.failures) {
    failures.push_back({{"segment_id", f.segment_id}, {"error", f.error}});
  }
  nlohmann::json doc = {
      {"meta",
       {{"fingerprint", config.fingerprint()},
        {"generated_at", iso8601_utc_now()},
        {"generator", "csteval"}}},
      {"run",
       {{"completed", log.completed},
        {"resumed", log.resumed},
        {"skipped_no_audio", log.skipped_no_audio},
        {"failures", std::move(failures)},
        {"hypotheses_file", out_path},
        {"checkpoint_file", checkpoint}}},
  };
  write_text_file(config.output_dir + "/run_log.json", doc.dump(2) + "\n");
  std::cout << "completed " << log.completed << ", resumed " << log.resumed << ", failures "
            << log.failures.size() << "\n";
  std::cout << "hypotheses: " << out_path << "\n";
  return log.ok() ? kExitOk : kExitPartialFailure;
}

int cmd_bench(const std::string& config_path, const std::string& prompts_path,
              std::size_t warmup, std::size_t max_prompts, const std::string& clip_path,
              std::size_t repeats) {
  HarnessConfig config = load_config(config_path);
  ensure_output_dir(config);
  LimiterPtr limiter = std::make_shared<ConcurrencyLimiter>(1);  // benchmarks run sequentially
  std::vector<BenchResult> results;

  if (config.mt) {
    std::vector<std::string> prompts;
    if (!prompts_path.empty()) {
      std::ifstream in(prompts_path);
      if (!in) throw ConfigError("cannot open prompts file '" + prompts_path + "'");
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty()) prompts.push_back(line);
      }
    } else {
      Corpus corpus = load_corpus(config.corpus.path, config.corpus.format);
      for (const Segment& segment : corpus.segments()) prompts.push_back(segment.source_cs);
    }
    if (prompts.size() > max_prompts) prompts.resize(max_prompts);
    ChatClient mt(*config.mt, limiter);
    results.push_back(measure_throughput(mt, prompts, warmup));
  }
  if (config.asr) {
    AudioClip clip;
    if (!clip_path.empty()) {
      clip = resample_audio(read_wav(clip_path), kPipelineSampleRate);
    } else {
      clip.sample_rate = kPipelineSampleRate;
      clip.samples.assign(static_cast<std::size_t>(kClipSeconds * kPipelineSampleRate), 0.0f);
    }
    AsrClient asr(*config.asr, limiter);
    results.push_back(measure_latency(asr, clip, repeats));
  }
  if (results.empty()) {
    throw ConfigError("bench needs endpoints.mt (throughput) or endpoints.asr (latency)");
  }
  write_text_file(config.output_dir + "/bench.json",
                  bench_json(results, config.fingerprint(), iso8601_utc_now()));
  std::string md = bench_markdown(results);
  write_text_file(config.output_dir + "/bench.md", md);
  std::cout << md;
  return kExitOk;
}

int cmd_report(const std::string& config_path, const std::string& rank_metric,
               bool degradation_mode, const std::vector<std::string>& report_paths) {
  HarnessConfig config = load_config(config_path);
  ensure_output_dir(config);
  std::vector<MetricReport> reports;
  reports.reserve(report_paths.size());
  for (const std::string& path : report_paths) {
    reports.push_back(report_from_json(read_file(path)));
  }
  if (degradation_mode) {
    if (reports.size() != 2) {
      std::cerr << "--degradation takes exactly two report files (full, quantized)\n";
      return kExitUsage;
    }
    std::vector<DegradationEntry> entries = degradation(reports[0], reports[1]);
    write_text_file(config.output_dir + "/degradation.json",
                    degradation_json(entries, reports[0].config_fingerprint,
                                     iso8601_utc_now()));
    std::string md = degradation_markdown(entries);
    write_text_file(config.output_dir + "/degradation.md", md);
    std::cout << md;
    return kExitOk;
  }
  if (!rank_metric.empty()) {
    Metric key = metric_from_string(rank_metric);
    std::vector<LeaderboardRow> rows = rank_systems(reports, key);
    write_text_file(config.output_dir + "/leaderboard.json",
                    leaderboard_json(rows, key, reports[0].config_fingerprint,
                                     iso8601_utc_now()));
    std::string md = leaderboard_markdown(rows, key);
    write_text_file(config.output_dir + "/leaderboard.md", md);
    std::cout << md;
    return kExitOk;
  }
  std::string md = report_markdown(reports);
  write_text_file(config.output_dir + "/summary.md", md);
  std::cout << md;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation harness for code-switched Egyptian Arabic-English speech translation"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path, "harness config file (YAML)")->required();

  auto* ingest = app.add_subcommand("ingest", "load, validate, and profile the corpus");

  auto* preprocess = app.add_subcommand("preprocess", "normalize text or inspect audio");
  std::string pre_text;
  std::string pre_audio;
  preprocess->add_option("--text", pre_text, "text to normalize");
  preprocess->add_option("--audio", pre_audio, "WAV file to resample/segment");

  auto* tokenize = app.add_subcommand("tokenize", "compare configured tokenizers");
  std::string tok_text;
  std::string tok_file;
  bool tok_stats = false;
  tokenize->add_option("--text", tok_text, "text to tokenize");
  tokenize->add_option("--file", tok_file, "file with text to tokenize");
  tokenize->add_flag("--stats", tok_stats, "aggregate fertility over the corpus");

  auto* evaluate = app.add_subcommand("evaluate", "score a hypothesis file against references");
  std::string hyp_path;
  std::string eval_target = "en";
  std::string eval_system;
  evaluate->add_option("--hyp", hyp_path, "hypotheses JSONL {id, text}")->required();
  evaluate->add_option("--target", eval_target, "reference side: en, ar, or cs");
  evaluate->add_option("--system", eval_system, "system id (default: hyp file stem)");

  auto* pipeline = app.add_subcommand("pipeline", "run the cascaded ASR->MT pipeline");
  std::string pipe_target = "en";
  std::string pipe_checkpoint;
  std::string pipe_out;
  pipeline->add_option("--target", pipe_target, "translation target: en or ar");
  pipeline->add_option("--checkpoint", pipe_checkpoint, "checkpoint JSONL path");
  pipeline->add_option("--out", pipe_out, "hypotheses output path");

  auto* bench = app.add_subcommand("bench", "measure endpoint throughput and latency");
  std::string bench_prompts;
  std::size_t bench_warmup = 2;
  std::size_t bench_max_prompts = 16;
  std::string bench_clip;
  std::size_t bench_repeats = 5;
  bench->add_option("--prompts", bench_prompts, "prompt file, one per line");
  bench->add_option("--warmup", bench_warmup, "warmup requests excluded from totals");
  bench->add_option("--max-prompts", bench_max_prompts, "cap on replayed prompts");
  bench->add_option("--clip", bench_clip, "WAV clip for latency runs");
  bench->add_option("--repeats", bench_repeats, "latency repeats");

  auto* report = app.add_subcommand("report", "combine report JSON files");
  std::string rank_metric;
  bool degradation_mode = false;
  std::vector<std::string> report_paths;
  report->add_option("--rank", rank_metric, "key metric for the leaderboard");
  report->add_flag("--degradation", degradation_mode, "full-vs-quantized deltas");
  report->add_option("files", report_paths, "report JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // 0 for --help, nonzero for usage errors
  }

  try {
    if (ingest->parsed()) return cmd_ingest(config_path);
    if (preprocess->parsed()) return cmd_preprocess(config_path, pre_text, pre_audio);
    if (tokenize->parsed()) return cmd_tokenize(config_path, tok_text, tok_file, tok_stats);
    if (evaluate->parsed()) return cmd_evaluate(config_path, hyp_path, eval_target, eval_system);
    if (pipeline->parsed()) return cmd_pipeline(config_path, pipe_target, pipe_checkpoint,
                                                pipe_out);
    if (bench->parsed()) {
      return cmd_bench(config_path, bench_prompts, bench_warmup, bench_max_prompts, bench_clip,
                       bench_repeats);
    }
    if (report->parsed()) {
      return cmd_report(config_path, rank_metric, degradation_mode, report_paths);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TokenizerError& e) {
    std::cerr << "tokenizer error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CorpusError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return kExitEvaluation;
  } catch (const MetricsError& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return kExitEvaluation;
  } catch (const BenchError& e) {
    std::cerr << "bench error: " << e.what() << "\n";
    return kExitEvaluation;
  } catch (const PipelineError& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return kExitPartialFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
