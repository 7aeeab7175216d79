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

// Acceptance harness: one criterion per releasable behavior, one PASS/FAIL
// line each, nonzero exit when anything fails. Every check pins the exact
// tolerance it promises; nothing here is statistical beyond fixed seeds.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "csteval/audio.hpp"
#include "csteval/bench.hpp"
#include "csteval/clients.hpp"
#include "csteval/corpus.hpp"
#include "csteval/metrics.hpp"
#include "csteval/pipeline.hpp"
#include "csteval/text_normalize.hpp"
#include "csteval/tokenizer.hpp"
#include "csteval/unicode.hpp"
#include "mock_server.hpp"
#include "oracles.hpp"

using namespace csteval;
using csteval_test::MockServer;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string source_dir() {
  const char* dir = std::getenv("CSTEVAL_SOURCE_DIR");
  return dir != nullptr ? std::string(dir) : std::string(".");
}

// Appends `message` to `why` when `condition` fails; usable in chains.
bool expect(bool condition, const std::string& message, std::string* why) {
  if (!condition && why->empty()) *why = message;
  return condition;
}

EndpointConfig mock_endpoint(const MockServer& server, int max_in_flight = 4) {
  EndpointConfig cfg;
  cfg.base_url = server.base_url();
  cfg.model_id = "mock";
  cfg.retry_backoff_s = 0.01;
  cfg.max_in_flight = max_in_flight;
  return cfg;
}

AudioClip sine_clip(double seconds, double hz, int rate, double amplitude = 0.3) {
  AudioClip clip;
  clip.sample_rate = rate;
  std::size_t n = static_cast<std::size_t>(seconds * rate);
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] =
        static_cast<float>(amplitude * std::sin(2.0 * 3.141592653589793 * hz * i / rate));
  }
  return clip;
}

// --- criterion 1 -----------------------------------------------------------

bool criterion_edit_distance(std::string* why) {
  const double t0 = now_s();
  std::vector<std::string> all;
  all.emplace_back("");
  std::size_t start = 0;
  for (int len = 1; len <= 6; ++len) {
    std::size_t end = all.size();
    for (std::size_t i = start; i < end; ++i) {
      for (char c : {'a', 'b', 'c'}) all.push_back(all[i] + c);
    }
    start = end;
  }
  if (!expect(all.size() == 1093, "expected 1093 strings over a 3-symbol alphabet", why)) {
    return false;
  }
  std::vector<std::vector<std::string>> as_words(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (char c : all[i]) as_words[i].emplace_back(1, c);
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      std::size_t oracle = csteval_test::oracle_edit_distance(all[i], all[j]);
      if (levenshtein_chars(all[i], all[j]) != oracle) {
        *why = "char distance disagrees with the oracle on ('" + all[i] + "', '" + all[j] +
               "')";
        return false;
      }
      if (levenshtein(as_words[i], as_words[j]) != oracle) {
        *why = "word distance disagrees with the oracle on ('" + all[i] + "', '" + all[j] +
               "')";
        return false;
      }
    }
  }
  double elapsed = now_s() - t0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", elapsed);
  return expect(elapsed < 60.0,
                "all pairs agreed but took " + std::string(buf) + " s (budget 60 s)", why);
}

// --- criterion 2 -----------------------------------------------------------

bool criterion_bleu(std::string* why) {
  std::mt19937 rng(20260814);
  const std::vector<std::string> vocab = {"the", "cat",  "sat",  "on",  "mat", "قال",
                                          "بيت", "الله", "fast", "run", "ok",  "لا"};
  for (int corpus_no = 0; corpus_no < 100; ++corpus_no) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::uniform_int_distribution<int> n_seg(1, 8);
    std::uniform_int_distribution<int> n_tok(1, 15);
    int segs = n_seg(rng);
    for (int s = 0; s < segs; ++s) {
      std::string text;
      int toks = n_tok(rng);
      for (int t = 0; t < toks; ++t) {
        if (!text.empty()) text += ' ';
        text += vocab[rng() % vocab.size()];
      }
      pairs.emplace_back(text, text);
    }
    double self_bleu = corpus_bleu(pairs);
    if (!expect(std::abs(self_bleu - 100.0) < 1e-9,
                "self-BLEU of corpus " + std::to_string(corpus_no) + " is " +
                    std::to_string(self_bleu),
                why)) {
      return false;
    }
  }
  if (!expect(corpus_bleu({{"alpha beta gamma", "delta epsilon"}}) == 0.0,
              "disjoint hypothesis must score exactly 0", why)) {
    return false;
  }
  double hand = corpus_bleu({{"the cat sat", "the cat sat on the mat"}});
  double closed_form = 100.0 * std::exp(1.0 - 6.0 / 3.0);
  return expect(std::abs(hand - closed_form) < 1e-6,
                "short-hypothesis BLEU " + std::to_string(hand) + " differs from " +
                    std::to_string(closed_form),
                why);
}

// --- criterion 3 -----------------------------------------------------------

bool criterion_meteor(std::string* why) {
  double two_word = meteor("the cat", "the cat");
  if (!expect(std::abs(two_word - 0.9375) <= 1e-9,
              "two-word identity scored " + std::to_string(two_word), why)) {
    return false;
  }
  double one_word = meteor("hello", "hello");
  return expect(std::abs(one_word - 0.5) <= 1e-9,
                "single-word identity scored " + std::to_string(one_word), why);
}

// --- criterion 4 -----------------------------------------------------------

std::string random_unicode_string(std::mt19937* rng) {
  std::uniform_int_distribution<int> len(0, 40);
  std::uniform_int_distribution<int> pool(0, 6);
  std::vector<uint32_t> cps;
  int n = len(*rng);
  for (int i = 0; i < n; ++i) {
    uint32_t cp = 0;
    switch (pool(*rng)) {
      case 0: cp = 0x20 + (*rng)() % 0x5F; break;            // printable ASCII
      case 1: cp = 0x0600 + (*rng)() % 0xFF; break;          // Arabic block
      case 2: cp = 0x4E00 + (*rng)() % 0x100; break;         // CJK
      case 3: cp = 0x1F300 + (*rng)() % 0x100; break;        // emoji
      case 4: cp = 0x0300 + (*rng)() % 0x6F; break;          // combining marks
      case 5: cp = 1 + (*rng)() % 0x10FFFF; break;           // anything valid
      default: cp = (*rng)() % 2 ? 0x20 : 0x0A; break;       // whitespace
    }
    if (cp >= 0xD800 && cp <= 0xDFFF) cp = 0xFFFD;  // never emit surrogates
    if (cp == 0 || cp > 0x10FFFF) cp = 0x61;
    cps.push_back(cp);
  }
  return uni::encode_utf8(cps);
}

bool criterion_tokenizer(std::string* why) {
  const std::vector<std::string> corpus = {
      "أنا أحب التفاح",
      "i love apples",
      "النهارده فيه meeting مهم",
      "aaab abab the cat",
  };
  TokenizerModel model = train_bpe(corpus, 120, true);
  std::mt19937 rng(97);
  for (int i = 0; i < 10000; ++i) {
    std::string text = random_unicode_string(&rng);
    std::string back = decode(model, encode(model, text));
    if (back != text) {
      *why = "decode(encode(s)) changed string " + std::to_string(i);
      return false;
    }
  }

  std::string first = serialize_tokenizer(train_bpe(corpus, 120, true));
  for (int run = 1; run < 5; ++run) {
    if (serialize_tokenizer(train_bpe(corpus, 120, true)) != first) {
      *why = "training run " + std::to_string(run) + " produced a different model";
      return false;
    }
  }

  const std::string sentence = "أنا أحب التفاح";
  TokenizerModel char_model =
      load_tokenizer(source_dir() + "/data/tokenizers/char_fallback.json");
  TokenizerModel bpe_model = load_tokenizer(source_dir() + "/data/tokenizers/arabic_bpe.json");
  std::vector<TokenizerComparisonRow> rows = compare_tokenizers(
      {{"char_fallback", &char_model}, {"arabic_bpe", &bpe_model}}, sentence);
  if (!expect(rows[0].token_count == 12,
              "character model used " + std::to_string(rows[0].token_count) +
                  " content tokens, wanted 12",
              why)) {
    return false;
  }
  if (!expect(rows[1].token_count == 5,
              "merged model used " + std::to_string(rows[1].token_count) +
                  " content tokens, wanted 5",
              why)) {
    return false;
  }
  return expect(decode(char_model, encode(char_model, sentence)) == sentence &&
                    decode(bpe_model, encode(bpe_model, sentence)) == sentence,
                "bundled models are not lossless on the contrast sentence", why);
}

// --- criterion 5 -----------------------------------------------------------

bool criterion_preprocess(std::string* why) {
  const std::vector<std::string> atoms = {
      "Hello",     "WORLD",  "مرحبا",   "بيك",        "http://x.co/y", "WWW.SITE.COM",
      "[laughter]", "<noise>", ":)",   ":-D",        "👍🏽",          "👩‍👧",
      "  ",        "\t",     "\n",     "e\xCC\x81",   "cafe\xCC\x81",  "١٢٣",
      "mixed7up",  "،",      "!",      "don't",
  };
  std::mt19937 rng(5150);
  std::uniform_int_distribution<int> n_atoms(0, 12);
  const NormalizationConfig norm;
  for (int i = 0; i < 10000; ++i) {
    std::string text;
    int n = n_atoms(rng);
    for (int k = 0; k < n; ++k) {
      text += atoms[rng() % atoms.size()];
      if (rng() % 3 == 0) text += ' ';
    }
    std::string once = normalize_text(text, norm);
    if (normalize_text(once, norm) != once) {
      *why = "normalization is not idempotent on sample " + std::to_string(i);
      return false;
    }
  }

  MelSpectrogram mel = mel_spectrogram(sine_clip(30.0, 440.0, 16000));
  if (!expect(mel.frames() == 3000 && mel.bins() == 80,
              "30 s clip produced " + std::to_string(mel.frames()) + " x " +
                  std::to_string(mel.bins()) + " mel frames, wanted 3000 x 80",
              why)) {
    return false;
  }

  AudioClip silent;
  silent.sample_rate = 16000;
  silent.samples.assign(16000, 0.0f);
  MelSpectrogram quiet = mel_spectrogram(silent);
  double first = quiet.data.at(0).at(0);
  for (const auto& frame : quiet.data) {
    for (double v : frame) {
      if (v != first) {
        *why = "silence produced non-constant mel output";
        return false;
      }
    }
  }

  AudioClip resampled = resample_audio(sine_clip(1.0, 440.0, 44100, 0.5), 16000);
  if (!expect(resampled.sample_rate == 16000, "resampler kept the wrong rate", why)) {
    return false;
  }
  for (std::size_t k = 100; k + 100 < resampled.samples.size(); ++k) {
    double want = 0.5 * std::sin(2.0 * 3.141592653589793 * 440.0 * k / 16000.0);
    if (std::abs(resampled.samples[k] - want) >= 1e-3) {
      *why = "resampled 440 Hz tone deviates at sample " + std::to_string(k);
      return false;
    }
  }
  return true;
}

// --- criterion 6 -----------------------------------------------------------

bool criterion_corpus(std::string* why) {
  const char* real_path = std::getenv("CSTEVAL_ARZEN_PATH");
  if (real_path != nullptr && std::filesystem::exists(real_path)) {
    Corpus corpus = load_corpus(real_path, CorpusFormat::kJsonl);
    SplitExpectation expected;
    expected.counts[Split::kTest] = 1402;
    expected.counts[Split::kTrain] = 3344;
    ValidationReport report = validate_corpus(corpus, expected);
    return expect(report.passed, "published split sizes do not match the corpus", why);
  }

  Corpus fixture =
      load_corpus(source_dir() + "/data/fixtures/corpus.jsonl", CorpusFormat::kJsonl);
  if (!expect(fixture.size() == 20,
              "fixture has " + std::to_string(fixture.size()) + " segments, wanted 20", why)) {
    return false;
  }
  SplitExpectation expected;
  expected.counts[Split::kTest] = 6;
  expected.counts[Split::kTrain] = 14;
  ValidationReport report = validate_corpus(fixture, expected);
  if (!expect(report.passed && report.mismatches.empty(),
              "fixture split counts do not match 6 test / 14 train", why)) {
    return false;
  }
  // The same checker must flag a corpus that misses the published sizes.
  SplitExpectation published;
  published.counts[Split::kTest] = 1402;
  published.counts[Split::kTrain] = 3344;
  ValidationReport mismatch = validate_corpus(fixture, published);
  return expect(!mismatch.passed && mismatch.mismatches.size() == 2,
                "expectation checking failed to flag wrong split sizes", why);
}

// --- criterion 7 -----------------------------------------------------------

bool criterion_pipeline(std::string* why) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() /
                 ("csteval-acc-pipe-" + std::to_string(::getpid()));
  fs::create_directories(dir);

  MockServer server;
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(3);
  AsrClient asr(mock_endpoint(server, 3), limiter);
  ChatClient mt(mock_endpoint(server), limiter);

  bool ok = [&]() -> bool {
    // Clip order survives adversarial completion order.
    std::vector<AudioClip> clips;
    for (int i = 0; i < 5; ++i) clips.push_back(sine_clip(0.2 + 0.03 * i, 250.0 + 45.0 * i, 16000));
    std::vector<std::string> expected;
    for (const AudioClip& clip : clips) expected.push_back(transcribe({clip}, asr)[0]);
    int base = server.total_calls.load();
    server.delay_for_arrival = [base](int arrival) {
      int rel = arrival - base;
      return rel >= 0 && rel < 5 ? (5 - rel) * 50 : 0;
    };
    std::vector<std::string> ordered = transcribe(clips, asr);
    server.delay_for_arrival = nullptr;
    if (!expect(ordered == expected, "clip order changed under delayed completion", why)) {
      return false;
    }

    // The in-flight bound is never exceeded.
    server.max_in_flight.store(0);
    server.delay_ms.store(25);
    std::vector<AudioClip> many(9, sine_clip(0.2, 330.0, 16000));
    transcribe(many, asr);
    server.delay_ms.store(0);
    if (!expect(server.max_in_flight.load() <= 3,
                "observed " + std::to_string(server.max_in_flight.load()) +
                    " concurrent requests with a bound of 3",
                why)) {
      return false;
    }

    // 75 s of audio: exactly three transcription calls, one translation.
    write_wav((dir / "long.wav").string(), sine_clip(75.0, 440.0, 16000));
    Segment long_seg;
    long_seg.id = "long-audio";
    long_seg.split = Split::kTest;
    long_seg.source_cs = "مصدر طويل";
    long_seg.audio = AudioRef{(dir / "long.wav").string(), 75.0};
    int asr_before = server.asr_calls.load();
    int chat_before = server.chat_calls.load();
    cascade(long_seg, asr, mt, TargetLang::kEn);
    if (!expect(server.asr_calls.load() - asr_before == 3,
                "75 s segment issued " + std::to_string(server.asr_calls.load() - asr_before) +
                    " transcription calls, wanted 3",
                why)) {
      return false;
    }
    if (!expect(server.chat_calls.load() - chat_before == 1,
                "75 s segment issued " + std::to_string(server.chat_calls.load() - chat_before) +
                    " translation calls, wanted 1",
                why)) {
      return false;
    }

    // Kill-and-resume equals a single uninterrupted run.
    std::vector<Segment> segments;
    for (int i = 0; i < 4; ++i) {
      std::string name = "s" + std::to_string(i) + ".wav";
      write_wav((dir / name).string(), sine_clip(0.5, 280.0 + 60.0 * i, 16000));
      Segment seg;
      seg.id = "seg-" + std::to_string(i);
      seg.split = Split::kTest;
      seg.source_cs = "مصدر " + std::to_string(i);
      seg.audio = AudioRef{(dir / name).string(), 0.5};
      segments.push_back(seg);
    }
    Corpus corpus("resume", "acceptance", segments);

    std::atomic<int> budget{2};
    server.chat_reply = [&budget](const nlohmann::json& body) -> std::string {
      if (budget.fetch_sub(1) > 0) {
        return "reply to: " + body["messages"].back().value("content", "");
      }
      throw std::runtime_error("killed");
    };
    EndpointConfig fragile = mock_endpoint(server);
    fragile.max_retries = 0;
    ChatClient fragile_mt(fragile, std::make_shared<ConcurrencyLimiter>(1));
    BatchOptions interrupted;
    interrupted.checkpoint_path = (dir / "resume.jsonl").string();
    interrupted.worker_threads = 1;
    RunLog first_log;
    batch_run(corpus, asr, fragile_mt, TargetLang::kEn, interrupted, &first_log);
    if (!expect(first_log.completed == 2 && first_log.failures.size() == 2,
                "interrupted run completed " + std::to_string(first_log.completed) +
                    " and failed " + std::to_string(first_log.failures.size()),
                why)) {
      return false;
    }
    server.chat_reply = nullptr;

    RunLog resume_log;
    HypothesisSet resumed =
        batch_run(corpus, asr, mt, TargetLang::kEn, interrupted, &resume_log);
    BatchOptions fresh;
    fresh.checkpoint_path = (dir / "fresh.jsonl").string();
    HypothesisSet uninterrupted =
        batch_run(corpus, asr, mt, TargetLang::kEn, fresh, nullptr);
    if (!expect(resume_log.resumed == 2 && resume_log.completed == 2,
                "resume log counted " + std::to_string(resume_log.resumed) + " resumed / " +
                    std::to_string(resume_log.completed) + " completed",
                why)) {
      return false;
    }
    return expect(resumed.entries == uninterrupted.entries,
                  "resumed hypotheses differ from an uninterrupted run", why);
  }();

  std::error_code ec;
  fs::remove_all(dir, ec);
  return ok;
}

// --- criterion 8 -----------------------------------------------------------

bool criterion_degradation(std::string* why) {
  auto report_with = [](double value) {
    MetricReport report;
    report.system_id = "sys";
    report.target_lang = "en";
    report.config_fingerprint = "fp";
    MetricScore score;
    score.metric = Metric::kBleu;
    score.corpus_value = value;
    report.scores.push_back(score);
    return report;
  };
  std::vector<DegradationEntry> entries =
      degradation(report_with(53.64), report_with(53.01));
  if (!expect(entries.size() == 1, "expected one BLEU degradation entry", why)) return false;
  double pct = entries[0].relative * 100.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "relative drop %.4f%% not within 1.2%% +/- 0.1pp", pct);
  return expect(std::abs(pct - 1.2) <= 0.1, buf, why);
}

// --- criterion 9 -----------------------------------------------------------

bool criterion_bench(std::string* why) {
  MockServer server;
  server.delay_ms.store(500);
  server.completion_tokens.store(5);
  server.start();
  ChatClient mt(mock_endpoint(server), std::make_shared<ConcurrencyLimiter>(1));
  BenchResult throughput = measure_throughput(mt, {"w0", "w1", "m0", "m1", "m2"}, 2);
  if (!expect(std::abs(throughput.tokens_per_s - 10.0) / 10.0 <= 0.10,
              "mock throughput measured " + std::to_string(throughput.tokens_per_s) +
                  " tokens/s, wanted 10 within 10%",
              why)) {
    return false;
  }

  server.delay_ms.store(100);
  AsrClient asr(mock_endpoint(server), std::make_shared<ConcurrencyLimiter>(1));
  BenchResult latency = measure_latency(asr, sine_clip(0.2, 330.0, 16000), 5);
  double median = latency.latency_s_per_clip.value_or(-1.0);
  return expect(std::abs(median - 0.100) <= 0.020,
                "mock latency median " + std::to_string(median) +
                    " s, wanted 0.100 within 0.020",
                why);
}

// --- criterion 10 ----------------------------------------------------------

bool criterion_ranking(std::string* why) {
  auto report_with = [](const std::string& id, double value) {
    MetricReport report;
    report.system_id = id;
    report.target_lang = "en";
    report.config_fingerprint = "fp";
    MetricScore score;
    score.metric = Metric::kBleu;
    score.corpus_value = value;
    report.scores.push_back(score);
    return report;
  };

  std::mt19937 rng(1012);
  std::uniform_real_distribution<double> value(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<MetricReport> reports;
    for (int s = 0; s < 7; ++s) {
      reports.push_back(report_with("sys-" + std::to_string(s), value(rng)));
    }
    std::vector<LeaderboardRow> before = rank_systems(reports, Metric::kBleu);
    for (MetricReport& r : reports) {
      r.scores[0].corpus_value = 2.0 * r.scores[0].corpus_value + 1.0;
    }
    std::vector<LeaderboardRow> after = rank_systems(reports, Metric::kBleu);
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (before[i].system_id != after[i].system_id || before[i].rank != after[i].rank) {
        *why = "rank order changed under x -> 2x + 1 in trial " + std::to_string(trial);
        return false;
      }
    }
  }

  const std::vector<std::pair<std::string, double>> table = {
      {"asr-chain-small", 8.6},   {"asr-chain-base", 12.3}, {"cascade-medium", 23.59},
      {"cascade-large", 38.41},   {"cascade-best", 53.64},  {"e2e-large", 41.93},
      {"asr-chain-tiny", 9.8},
  };
  std::vector<MetricReport> reports;
  for (const auto& [id, value_] : table) reports.push_back(report_with(id, value_));
  std::vector<LeaderboardRow> rows = rank_systems(reports, Metric::kBleu);
  return expect(rows[0].system_id == "cascade-best" && rows[0].rank == 1 &&
                    std::abs(rows[0].value - 53.64) < 1e-12,
                "highest BLEU entry did not rank first", why);
}

// --- criterion 11 ----------------------------------------------------------

int run_cli(const std::string& command) {
  int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file_or_empty(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string without_timestamp(const std::string& json_text) {
  static const std::regex stamp("\"generated_at\": \"[^\"]*\"");
  return std::regex_replace(json_text, stamp, "\"generated_at\": \"\"");
}

bool criterion_cli(std::string* why) {
  const char* bin = std::getenv("CSTEVAL_BIN");
  if (bin == nullptr) {
    *why = "CSTEVAL_BIN is not set";
    return false;
  }
  namespace fs = std::filesystem;
  fs::path dir =
      fs::temp_directory_path() / ("csteval-acc-cli-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const double t0 = now_s();

  MockServer server;
  server.start();

  auto config_for = [&](const std::string& out_dir) {
    std::ostringstream yaml;
    yaml << "corpus:\n"
         << "  path: " << source_dir() << "/data/fixtures/corpus.jsonl\n"
         << "  audio_root: " << source_dir() << "/data/fixtures\n"
         << "  expected_splits:\n    train: 14\n    test: 6\n"
         << "metrics:\n  set: [bleu, meteor, wer, cer, eed, bert_f1, llm_grade]\n"
         << "endpoints:\n";
    for (const char* name : {"asr", "mt", "embeddings", "grader"}) {
      yaml << "  " << name << ":\n    base_url: " << server.base_url()
           << "\n    model_id: mock-" << name << "\n    max_in_flight: 4\n";
    }
    yaml << "tokenizers:\n  arabic: " << source_dir()
         << "/data/tokenizers/arabic_bpe.json\n"
         << "output_dir: " << out_dir << "\n";
    return yaml.str();
  };

  fs::path out1 = dir / "run1";
  fs::path out2 = dir / "run2";
  std::ofstream(dir / "cfg1.yaml") << config_for(out1.string());
  std::ofstream(dir / "cfg2.yaml") << config_for(out2.string());

  bool ok = [&]() -> bool {
    std::string base = std::string(bin) + " -c " + (dir / "cfg1.yaml").string();
    std::string log = " >> " + (dir / "cli.log").string() + " 2>&1";
    if (!expect(run_cli(base + " pipeline --target en" + log) == 0, "pipeline command failed",
                why)) {
      return false;
    }
    std::string hyp = (out1 / "hyps_en.jsonl").string();
    if (!expect(fs::exists(hyp), "pipeline produced no hypotheses file", why)) return false;
    if (!expect(run_cli(base + " evaluate --hyp " + hyp + " --target en --system cascade" +
                        log) == 0,
                "evaluate command failed", why)) {
      return false;
    }
    std::string base2 = std::string(bin) + " -c " + (dir / "cfg2.yaml").string();
    if (!expect(run_cli(base2 + " evaluate --hyp " + hyp + " --target en --system cascade" +
                        log) == 0,
                "second evaluate command failed", why)) {
      return false;
    }
    std::string report1 = read_file_or_empty((out1 / "report_cascade.json").string());
    std::string report2 = read_file_or_empty((out2 / "report_cascade.json").string());
    if (!expect(!report1.empty() && !report2.empty(), "evaluate wrote no report JSON", why)) {
      return false;
    }
    if (!expect(without_timestamp(report1) == without_timestamp(report2),
                "report JSON is not byte-stable modulo the timestamp", why)) {
      return false;
    }
    if (!expect(run_cli(base + " report --rank bleu " +
                        (out1 / "report_cascade.json").string() + log) == 0,
                "report command failed", why)) {
      return false;
    }
    if (!expect(fs::exists(out1 / "leaderboard.md"), "report wrote no leaderboard", why)) {
      return false;
    }
    double elapsed = now_s() - t0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "end-to-end run took %.1f s (budget 30 s)", elapsed);
    return expect(elapsed < 30.0, buf, why);
  }();

  std::error_code ec;
  fs::remove_all(dir, ec);
  return ok;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* description;
    std::function<bool(std::string*)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "edit distance matches an exhaustive edit-script oracle on all short strings",
       criterion_edit_distance},
      {2, "BLEU is 100 on self-pairs, 0 without overlap, and exact on the hand case",
       criterion_bleu},
      {3, "METEOR reproduces the closed-form hand cases", criterion_meteor},
      {4, "tokenizer round trips arbitrary text, trains deterministically, and compresses the "
          "contrast sentence 12 -> 5 tokens",
       criterion_tokenizer},
      {5, "normalization is idempotent and audio preprocessing hits the pinned shapes",
       criterion_preprocess},
      {6, "corpus loader reproduces the published split sizes (fixture fallback)",
       criterion_corpus},
      {7, "pipeline preserves clip order, honors the in-flight bound, resumes losslessly, and "
          "splits 75 s into 3 + 1 calls",
       criterion_pipeline},
      {8, "quantization hand case degrades by 1.2% relative within 0.1pp",
       criterion_degradation},
      {9, "bench harness recovers mock throughput within 10% and latency within 20 ms",
       criterion_bench},
      {10, "ranking is monotone-invariant and puts the best BLEU first", criterion_ranking},
      {11, "CLI pipeline -> evaluate -> report completes on the fixture under 30 s with "
           "byte-stable reports",
       criterion_cli},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    std::string why;
    bool passed = false;
    try {
      passed = criterion.run(&why);
    } catch (const std::exception& e) {
      why = std::string("unexpected exception: ") + e.what();
    }
    if (passed) {
      std::cout << "PASS criterion " << criterion.id << ": " << criterion.description << "\n";
    } else {
      ++failures;
      std::cout << "FAIL criterion " << criterion.id << ": " << criterion.description
                << " -- " << (why.empty() ? "unknown reason" : why) << "\n";
    }
    std::cout.flush();
  }
  if (failures > 0) {
    std::cout << failures << " of " << criteria.size() << " criteria failed\n";
    return 1;
  }
  std::cout << "all " << criteria.size() << " criteria passed\n";
  return 0;
}
