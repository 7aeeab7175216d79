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

#include "csteval/pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"

namespace csteval {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string join_with_spaces(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty() && !p.empty()) out += ' ';
    out += p;
  }
  return out;
}

}  // namespace

std::string PromptTemplate::render(const std::string& src) const {
  if (src.empty()) throw PipelineError("prompt template rendered with empty source");
  std::string out = user_pattern;
  std::size_t pos = out.find("{src}");
  if (pos == std::string::npos) {
    throw PipelineError("prompt template lacks the {src} slot");
  }
  while (pos != std::string::npos) {
    out.replace(pos, 5, src);
    pos = out.find("{src}", pos + src.size());
  }
  return out;
}

PromptTemplate default_prompt_template(TargetLang lang) {
  PromptTemplate t;
  t.target_lang = lang;
  t.system_text = "";
  const std::string target_name = lang == TargetLang::kAr ? "Egyptian Arabic" : "English";
  t.user_pattern = "Translate the following code-switched Egyptian Arabic-English sentence into " +
                   target_name + ". Reply with the translation only.\n\n{src}";
  return t;
}

std::string pipeline_result_to_json(const PipelineResult& result) {
  nlohmann::json doc = {
      {"segment_id", result.segment_id},
      {"transcript", result.transcript},
      {"translation", result.translation},
      {"target_lang", to_string(result.target_lang)},
      {"per_clip_transcripts", result.per_clip_transcripts},
      {"timing",
       {{"asr_s", result.timing.asr_s},
        {"mt_s", result.timing.mt_s},
        {"total_s", result.timing.total_s}}},
      {"asr_retries", result.asr_retries},
      {"mt_retries", result.mt_retries},
  };
  return doc.dump();
}

PipelineResult pipeline_result_from_json(const std::string& line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw PipelineError(std::string("checkpoint line is not valid JSON: ") + e.what());
  }
  PipelineResult r;
  try {
    r.segment_id = doc.at("segment_id").get<std::string>();
    r.transcript = doc.at("transcript").get<std::string>();
    r.translation = doc.at("translation").get<std::string>();
    r.target_lang = target_lang_from_string(doc.at("target_lang").get<std::string>());
    r.per_clip_transcripts = doc.at("per_clip_transcripts").get<std::vector<std::string>>();
    r.timing.asr_s = doc.at("timing").at("asr_s").get<double>();
    r.timing.mt_s = doc.at("timing").at("mt_s").get<double>();
    r.timing.total_s = doc.at("timing").at("total_s").get<double>();
    r.asr_retries = doc.value("asr_retries", 0);
    r.mt_retries = doc.value("mt_retries", 0);
  } catch (const nlohmann::json::exception& e) {
    throw PipelineError(std::string("checkpoint record misses a field: ") + e.what());
  }
  return r;
}

std::vector<std::string> transcribe(const std::vector<AudioClip>& clips, const AsrClient& asr,
                                    int* total_retries) {
  std::vector<std::string> out(clips.size());
  if (clips.empty()) return out;
  std::atomic<int> retries{0};
  std::vector<std::future<void>> futures;
  futures.reserve(clips.size());
  // One task per clip; the client's shared limiter bounds real concurrency.
  for (std::size_t i = 0; i < clips.size(); ++i) {
    futures.push_back(std::async(std::launch::async, [&, i] {
      AsrResult r = asr.transcribe(clips[i]);
      retries += r.retry_count;
      out[i] = r.text;
    }));
  }
  std::string first_error;
  std::size_t failed_clip = 0;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    try {
      futures[i].get();
    } catch (const std::exception& e) {
      if (first_error.empty()) {
        first_error = e.what();
        failed_clip = i;
      }
    }
  }
  if (!first_error.empty()) {
    throw PipelineError("clip " + std::to_string(failed_clip) + " failed: " + first_error);
  }
  if (total_retries) *total_retries += retries.load();
  return out;
}

std::string translate(const std::string& text, const ChatClient& mt,
                      const PromptTemplate& prompt_template, int* retries) {
  std::string rendered = prompt_template.render(text);  // throws on empty source
  ChatResult reply = mt.complete(prompt_template.system_text, rendered);
  if (retries) *retries += reply.retry_count;
  std::string out = reply.text;
  if (out.rfind(rendered, 0) == 0) out = out.substr(rendered.size());  // prompt echo
  out = trim(out);
  if (out.empty()) throw PipelineError("translation endpoint returned an empty reply");
  return out;
}

namespace {

AudioClip load_segment_audio(const Segment& segment, const std::string& audio_root) {
  if (!segment.audio) throw PipelineError("segment " + segment.id + " has no audio");
  std::filesystem::path path(segment.audio->path);
  if (path.is_relative() && !audio_root.empty()) {
    path = std::filesystem::path(audio_root) / path;
  }
  return read_wav(path.string());
}

}  // namespace

PipelineResult cascade(const Segment& segment, const AsrClient& asr, const ChatClient& mt,
                       TargetLang target, const CascadeOptions& options, const Clock& clock) {
  PipelineResult result;
  result.segment_id = segment.id;
  result.target_lang = target;
  const double t_start = clock();

  std::vector<AudioClip> clips;
  try {
    AudioClip audio = load_segment_audio(segment, options.audio_root);
    audio = resample_audio(audio, kPipelineSampleRate);
    clips = segment_audio(audio);
  } catch (const std::exception& e) {
    throw PipelineError("audio stage for segment " + segment.id + ": " + e.what());
  }

  const double t_asr = clock();
  try {
    result.per_clip_transcripts = transcribe(clips, asr, &result.asr_retries);
  } catch (const std::exception& e) {
    throw PipelineError("asr stage for segment " + segment.id + ": " + e.what());
  }
  result.transcript = join_with_spaces(result.per_clip_transcripts);
  result.timing.asr_s = clock() - t_asr;

  // The MT input is the normalized transcript, matching the text-side
  // preprocessing of the references.
  std::string mt_input = normalize_text(result.transcript, options.norm);
  if (mt_input.empty()) {
    throw PipelineError("mt stage for segment " + segment.id +
                        ": transcript is empty after normalization");
  }
  const PromptTemplate prompt_template =
      options.prompt ? *options.prompt : default_prompt_template(target);
  const double t_mt = clock();
  try {
    result.translation = translate(mt_input, mt, prompt_template, &result.mt_retries);
  } catch (const std::exception& e) {
    throw PipelineError("mt stage for segment " + segment.id + ": " + e.what());
  }
  result.timing.mt_s = clock() - t_mt;
  result.timing.total_s = clock() - t_start;
  return result;
}

namespace {

// Completed ids from an append-only checkpoint. A torn final line (crash
// mid-write) is dropped; damage anywhere else is an error.
std::map<std::string, PipelineResult> read_checkpoint(const std::string& path) {
  std::map<std::string, PipelineResult> done;
  std::ifstream in(path, std::ios::binary);
  if (!in) return done;
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      PipelineResult r = pipeline_result_from_json(lines[i]);
      done[r.segment_id] = std::move(r);
    } catch (const PipelineError&) {
      if (i + 1 == lines.size()) break;  // truncated tail
      throw PipelineError("checkpoint '" + path + "' line " + std::to_string(i + 1) +
                          " is corrupt");
    }
  }
  return done;
}

}  // namespace

HypothesisSet batch_run(const Corpus& corpus, const AsrClient& asr, const ChatClient& mt,
                        TargetLang target, const BatchOptions& options, RunLog* log,
                        const Clock& clock) {
  if (options.checkpoint_path.empty()) {
    throw PipelineError("batch_run needs a checkpoint path");
  }
  RunLog local_log;
  RunLog& run_log = log ? *log : local_log;
  run_log = RunLog{};

  std::map<std::string, PipelineResult> done = read_checkpoint(options.checkpoint_path);

  std::ofstream checkpoint(options.checkpoint_path, std::ios::binary | std::ios::app);
  if (!checkpoint) {
    throw PipelineError("cannot open checkpoint '" + options.checkpoint_path +
                        "' for appending");
  }

  HypothesisSet hyps;
  hyps.system_id = mt.config().model_id.empty() ? "cascade" : mt.config().model_id;
  hyps.target_lang = target;

  std::vector<const Segment*> todo;
  for (const Segment& segment : corpus.segments()) {
    auto it = done.find(segment.id);
    if (it != done.end()) {
      hyps.entries[segment.id] = it->second.translation;
      ++run_log.resumed;
      continue;
    }
    if (!segment.audio) {
      ++run_log.skipped_no_audio;
      continue;
    }
    todo.push_back(&segment);
  }

  CascadeOptions cascade_options;
  cascade_options.audio_root = options.audio_root;
  cascade_options.norm = options.norm;
  cascade_options.prompt = options.prompt;

  std::mutex mu;  // guards hyps, run_log, and the checkpoint appender
  std::atomic<std::size_t> next{0};
  std::size_t workers = options.worker_threads;
  if (workers == 0) workers = static_cast<std::size_t>(asr.config().max_in_flight);
  workers = std::max<std::size_t>(1, std::min(workers, todo.size() == 0 ? 1 : todo.size()));

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      const Segment& segment = *todo[i];
      try {
        PipelineResult result = cascade(segment, asr, mt, target, cascade_options, clock);
        std::lock_guard<std::mutex> lock(mu);
        hyps.entries[segment.id] = result.translation;
        ++run_log.completed;
        checkpoint << pipeline_result_to_json(result) << '\n';
        checkpoint.flush();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        run_log.failures.push_back(RunFailure{segment.id, e.what()});
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  return hyps;
}

}  // namespace csteval
