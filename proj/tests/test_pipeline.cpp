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

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "csteval/pipeline.hpp"
#include "doctest.h"
#include "mock_server.hpp"

using namespace csteval;
using csteval_test::MockServer;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("csteval-pipe-" + std::to_string(
                                  std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

AudioClip tone(double seconds, double hz, int rate = 16000) {
  AudioClip clip;
  clip.sample_rate = rate;
  std::size_t n = static_cast<std::size_t>(seconds * rate);
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] = 0.3f * std::sin(2.0 * 3.14159265358979 * hz * i / rate);
  }
  return clip;
}

EndpointConfig endpoint_for(const MockServer& server, int max_in_flight = 4) {
  EndpointConfig cfg;
  cfg.base_url = server.base_url();
  cfg.model_id = "mock";
  cfg.retry_backoff_s = 0.01;
  cfg.max_in_flight = max_in_flight;
  return cfg;
}

Segment audio_segment(const std::string& id, const std::string& wav_path, double duration_s) {
  Segment seg;
  seg.id = id;
  seg.split = Split::kTest;
  seg.source_cs = "مصدر " + id;
  seg.ref_en = "reference " + id;
  seg.audio = AudioRef{wav_path, duration_s};
  return seg;
}

// Deterministic fake clock: every read advances one second.
Clock counting_clock() {
  auto state = std::make_shared<double>(0.0);
  return [state] { return (*state)++; };
}

}  // namespace

TEST_CASE("prompt templates substitute every source slot") {
  PromptTemplate t;
  t.user_pattern = "Translate {src} -- again: {src}";
  CHECK(t.render("قال hi") == "Translate قال hi -- again: قال hi");
  CHECK_THROWS_WITH_AS(t.render(""), doctest::Contains("empty source"), PipelineError);
  PromptTemplate missing;
  missing.user_pattern = "no slot here";
  CHECK_THROWS_WITH_AS(missing.render("x"), doctest::Contains("{src}"), PipelineError);
}

TEST_CASE("default prompt templates name the target language") {
  PromptTemplate en = default_prompt_template(TargetLang::kEn);
  CHECK(en.user_pattern.find("English") != std::string::npos);
  CHECK(en.user_pattern.find("{src}") != std::string::npos);
  PromptTemplate ar = default_prompt_template(TargetLang::kAr);
  CHECK(ar.user_pattern.find("Egyptian Arabic") != std::string::npos);
  CHECK(ar.render("hello").find("hello") != std::string::npos);
}

TEST_CASE("pipeline results round trip through JSONL") {
  PipelineResult r;
  r.segment_id = "seg-9";
  r.transcript = "com transcript نص";
  r.translation = "some translation";
  r.target_lang = TargetLang::kAr;
  r.per_clip_transcripts = {"com transcript", "نص"};
  r.timing = StageTiming{1.25, 0.5, 2.0};
  r.asr_retries = 3;
  r.mt_retries = 1;
  PipelineResult back = pipeline_result_from_json(pipeline_result_to_json(r));
  CHECK(back.segment_id == r.segment_id);
  CHECK(back.transcript == r.transcript);
  CHECK(back.translation == r.translation);
  CHECK(back.target_lang == r.target_lang);
  CHECK(back.per_clip_transcripts == r.per_clip_transcripts);
  CHECK(back.timing.asr_s == doctest::Approx(1.25));
  CHECK(back.timing.total_s == doctest::Approx(2.0));
  CHECK(back.asr_retries == 3);
  CHECK(back.mt_retries == 1);
  CHECK_THROWS_AS(pipeline_result_from_json("not json"), PipelineError);
  CHECK_THROWS_AS(pipeline_result_from_json("{\"segment_id\": \"x\"}"), PipelineError);
}

TEST_CASE("transcription preserves clip order under adversarial completion order") {
  MockServer server;
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(4);
  AsrClient asr(endpoint_for(server), limiter);

  std::vector<AudioClip> clips;
  for (int i = 0; i < 4; ++i) clips.push_back(tone(0.2 + 0.05 * i, 200.0 + 60.0 * i));

  // Learn each clip's transcript with serial calls first.
  std::vector<std::string> expected;
  for (const AudioClip& clip : clips) expected.push_back(transcribe({clip}, asr)[0]);

  // Earlier arrivals sleep longer, so completions land in reverse order.
  int base = server.total_calls.load();
  server.delay_for_arrival = [base](int arrival) {
    int rel = arrival - base;
    return rel >= 0 && rel < 4 ? (4 - rel) * 60 : 0;
  };
  int retries = 0;
  std::vector<std::string> texts = transcribe(clips, asr, &retries);
  CHECK(texts == expected);
  CHECK(retries == 0);
}

TEST_CASE("transcription keeps the shared in-flight bound") {
  MockServer server;
  server.delay_ms.store(40);
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(2);
  AsrClient asr(endpoint_for(server), limiter);
  std::vector<AudioClip> clips(6, tone(0.2, 330.0));
  transcribe(clips, asr);
  CHECK(server.asr_calls.load() == 6);
  CHECK(server.max_in_flight.load() <= 2);
}

TEST_CASE("a failing clip fails the batch with its index") {
  MockServer server;
  server.fail_first.store(1000);
  server.start();
  EndpointConfig cfg = endpoint_for(server);
  cfg.max_retries = 0;
  AsrClient asr(cfg, std::make_shared<ConcurrencyLimiter>(1));
  std::vector<AudioClip> clips(3, tone(0.2, 330.0));
  CHECK_THROWS_WITH_AS(transcribe(clips, asr), doctest::Contains("clip 0 failed"),
                       PipelineError);
}

TEST_CASE("translation strips a leading prompt echo and trims whitespace") {
  MockServer server;
  server.start();
  ChatClient mt(endpoint_for(server), std::make_shared<ConcurrencyLimiter>(1));
  PromptTemplate prompt = default_prompt_template(TargetLang::kEn);

  SUBCASE("echoed prompt followed by the payload") {
    server.chat_reply = [](const nlohmann::json& body) {
      std::string rendered = body["messages"].back().value("content", "");
      return rendered + "\n  I am going now.  ";
    };
    CHECK(translate("انا ماشي now", mt, prompt) == "I am going now.");
  }
  SUBCASE("plain reply passes through trimmed") {
    server.chat_reply = [](const nlohmann::json&) { return std::string("  plain reply\n"); };
    CHECK(translate("نص", mt, prompt) == "plain reply");
  }
  SUBCASE("empty and echo-only replies are errors") {
    server.chat_reply = [](const nlohmann::json& body) {
      return body["messages"].back().value("content", "");
    };
    CHECK_THROWS_WITH_AS(translate("نص", mt, prompt), doctest::Contains("empty reply"),
                         PipelineError);
    CHECK_THROWS_AS(translate("", mt, prompt), PipelineError);
    CHECK(server.chat_calls.load() == 1);  // empty source never reaches the network
  }
}

TEST_CASE("cascade splits long audio into 30 s clips and translates once") {
  TempDir dir;
  write_wav(dir.file("long.wav"), tone(75.0, 440.0));
  MockServer server;
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(4);
  AsrClient asr(endpoint_for(server), limiter);
  ChatClient mt(endpoint_for(server), limiter);

  Segment seg = audio_segment("long-1", dir.file("long.wav"), 75.0);
  PipelineResult result = cascade(seg, asr, mt, TargetLang::kEn, CascadeOptions{},
                                  counting_clock());
  CHECK(server.asr_calls.load() == 3);
  CHECK(server.chat_calls.load() == 1);
  REQUIRE(result.per_clip_transcripts.size() == 3);
  std::string joined = result.per_clip_transcripts[0] + " " + result.per_clip_transcripts[1] +
                       " " + result.per_clip_transcripts[2];
  CHECK(result.transcript == joined);
  CHECK_FALSE(result.translation.empty());
  CHECK(result.target_lang == TargetLang::kEn);
  // Counting clock: one second per read, two reads per timed stage.
  CHECK(result.timing.asr_s == doctest::Approx(1.0));
  CHECK(result.timing.mt_s == doctest::Approx(1.0));
  CHECK(result.timing.total_s == doctest::Approx(5.0));
}

TEST_CASE("cascade resolves relative audio paths against the audio root") {
  TempDir dir;
  std::filesystem::create_directories(dir.path / "audio");
  write_wav(dir.file("audio/short.wav"), tone(1.0, 330.0));
  MockServer server;
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(2);
  AsrClient asr(endpoint_for(server), limiter);
  ChatClient mt(endpoint_for(server), limiter);

  Segment seg = audio_segment("rel-1", "audio/short.wav", 1.0);
  CascadeOptions options;
  options.audio_root = dir.path.string();
  PipelineResult result = cascade(seg, asr, mt, TargetLang::kEn, options);
  CHECK(result.per_clip_transcripts.size() == 1);
  CHECK(result.timing.total_s >= 0.0);
}

TEST_CASE("cascade names the failing stage") {
  TempDir dir;
  MockServer server;
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(2);
  AsrClient asr(endpoint_for(server), limiter);
  ChatClient mt(endpoint_for(server), limiter);

  SUBCASE("missing audio file") {
    Segment seg = audio_segment("gone", dir.file("missing.wav"), 1.0);
    CHECK_THROWS_WITH_AS(cascade(seg, asr, mt, TargetLang::kEn),
                         doctest::Contains("audio stage"), PipelineError);
  }
  SUBCASE("segment without audio") {
    Segment seg = audio_segment("none", dir.file("x.wav"), 1.0);
    seg.audio.reset();
    CHECK_THROWS_WITH_AS(cascade(seg, asr, mt, TargetLang::kEn),
                         doctest::Contains("no audio"), PipelineError);
  }
  SUBCASE("asr endpoint down") {
    write_wav(dir.file("ok.wav"), tone(1.0, 330.0));
    server.fail_first.store(1000);
    EndpointConfig cfg = endpoint_for(server);
    cfg.max_retries = 0;
    AsrClient failing(cfg, limiter);
    Segment seg = audio_segment("asr-down", dir.file("ok.wav"), 1.0);
    CHECK_THROWS_WITH_AS(cascade(seg, failing, mt, TargetLang::kEn),
                         doctest::Contains("asr stage"), PipelineError);
  }
  SUBCASE("mt endpoint empty reply") {
    write_wav(dir.file("ok2.wav"), tone(1.0, 330.0));
    server.chat_reply = [](const nlohmann::json&) { return std::string("   "); };
    Segment seg = audio_segment("mt-bad", dir.file("ok2.wav"), 1.0);
    CHECK_THROWS_WITH_AS(cascade(seg, asr, mt, TargetLang::kEn),
                         doctest::Contains("mt stage"), PipelineError);
  }
}

TEST_CASE("checkpoints tolerate a torn tail but not interior damage") {
  TempDir dir;
  MockServer server;
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(2);
  AsrClient asr(endpoint_for(server), limiter);
  ChatClient mt(endpoint_for(server), limiter);

  write_wav(dir.file("a.wav"), tone(0.6, 300.0));
  write_wav(dir.file("b.wav"), tone(0.6, 400.0));
  std::vector<Segment> segments = {audio_segment("seg-a", dir.file("a.wav"), 0.6),
                                   audio_segment("seg-b", dir.file("b.wav"), 0.6)};
  Corpus corpus("ck", "unit test", segments);

  BatchOptions options;
  options.checkpoint_path = dir.file("ck.jsonl");
  RunLog log;
  HypothesisSet first = batch_run(corpus, asr, mt, TargetLang::kEn, options, &log);
  CHECK(log.completed == 2);
  CHECK(log.resumed == 0);
  CHECK(log.ok());
  REQUIRE(first.entries.size() == 2);

  SUBCASE("torn tail is dropped and recomputed") {
    std::ofstream append(options.checkpoint_path, std::ios::binary | std::ios::app);
    append << "{\"segment_id\": \"seg-b\", \"trunca";  // crash mid-write
    append.close();
    RunLog second;
    HypothesisSet resumed = batch_run(corpus, asr, mt, TargetLang::kEn, options, &second);
    CHECK(second.resumed == 2);
    CHECK(second.completed == 0);
    CHECK(resumed.entries == first.entries);
  }
  SUBCASE("interior damage is a hard error") {
    std::string all;
    {
      std::ifstream in(options.checkpoint_path, std::ios::binary);
      std::string line;
      std::getline(in, line);
      all = "{broken}\n" + line + "\n";
    }
    std::ofstream out(options.checkpoint_path, std::ios::binary | std::ios::trunc);
    out << all;
    out.close();
    RunLog second;
    CHECK_THROWS_WITH_AS(batch_run(corpus, asr, mt, TargetLang::kEn, options, &second),
                         doctest::Contains("line 1 is corrupt"), PipelineError);
  }
}

TEST_CASE("batch runs resume from the checkpoint with identical hypotheses") {
  TempDir dir;
  MockServer server;
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(2);
  AsrClient asr(endpoint_for(server), limiter);
  ChatClient mt(endpoint_for(server), limiter);

  std::vector<Segment> segments;
  for (int i = 0; i < 5; ++i) {
    std::string name = "clip" + std::to_string(i) + ".wav";
    write_wav(dir.file(name), tone(0.4 + 0.1 * i, 250.0 + 70.0 * i));
    segments.push_back(audio_segment("seg-" + std::to_string(i), dir.file(name), 0.4));
  }
  Segment textual;
  textual.id = "text-only";
  textual.split = Split::kTest;
  textual.source_cs = "بدون صوت";
  textual.ref_en = "no audio";
  segments.push_back(textual);
  Corpus corpus("resume", "unit test", segments);

  BatchOptions options;
  options.checkpoint_path = dir.file("resume.jsonl");

  // First run dies partway: the MT endpoint fails after two translations.
  std::atomic<int> chat_ok{2};
  server.chat_reply = [&chat_ok](const nlohmann::json& body) -> std::string {
    if (chat_ok.fetch_sub(1) > 0) {
      return "reply to: " + body["messages"].back().value("content", "");
    }
    throw std::runtime_error("simulated crash");  // 500 from httplib
  };
  EndpointConfig strict = endpoint_for(server);
  strict.max_retries = 0;
  ChatClient strict_mt(strict, std::make_shared<ConcurrencyLimiter>(1));
  BatchOptions serial = options;
  serial.worker_threads = 1;
  RunLog first_log;
  HypothesisSet partial =
      batch_run(corpus, asr, strict_mt, TargetLang::kEn, serial, &first_log);
  CHECK(first_log.completed == 2);
  CHECK(first_log.failures.size() == 3);
  CHECK(first_log.skipped_no_audio == 1);
  CHECK(partial.entries.size() == 2);

  // Second run with a healthy endpoint completes the remainder.
  server.chat_reply = nullptr;
  RunLog second_log;
  HypothesisSet finished = batch_run(corpus, asr, mt, TargetLang::kEn, options, &second_log);
  CHECK(second_log.resumed == 2);
  CHECK(second_log.completed == 3);
  CHECK(second_log.skipped_no_audio == 1);
  CHECK(second_log.ok());
  CHECK(finished.entries.size() == 5);
  for (const auto& [id, text] : partial.entries) {
    CHECK(finished.entries.at(id) == text);
  }

  // A clean rerun reuses every checkpointed segment and calls no endpoint.
  int chat_before = server.chat_calls.load();
  RunLog third_log;
  HypothesisSet cached = batch_run(corpus, asr, mt, TargetLang::kEn, options, &third_log);
  CHECK(third_log.resumed == 5);
  CHECK(third_log.completed == 0);
  CHECK(cached.entries == finished.entries);
  CHECK(server.chat_calls.load() == chat_before);

  CHECK(finished.system_id == "mock");
  CHECK_THROWS_WITH_AS(
      batch_run(corpus, asr, mt, TargetLang::kEn, BatchOptions{}, nullptr),
      doctest::Contains("checkpoint path"), PipelineError);
}
