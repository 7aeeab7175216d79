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

#ifndef CSTEVAL_PIPELINE_HPP_
#define CSTEVAL_PIPELINE_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csteval/audio.hpp"
#include "csteval/bench.hpp"
#include "csteval/clients.hpp"
#include "csteval/corpus.hpp"
#include "csteval/text_normalize.hpp"

namespace csteval {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PromptTemplate {
  TargetLang target_lang = TargetLang::kEn;
  std::string system_text;
  std::string user_pattern;  // must contain the {src} slot

  // Throws on empty source text.
  std::string render(const std::string& src) const;
};

// The fixed per-language instruction used for cascade translation.
PromptTemplate default_prompt_template(TargetLang lang);

struct StageTiming {
  double asr_s = 0.0;
  double mt_s = 0.0;
  double total_s = 0.0;
};

struct PipelineResult {
  std::string segment_id;
  std::string transcript;  // per-clip transcripts joined with single spaces
  std::string translation;
  TargetLang target_lang = TargetLang::kEn;
  std::vector<std::string> per_clip_transcripts;
  StageTiming timing;
  int asr_retries = 0;
  int mt_retries = 0;
};

std::string pipeline_result_to_json(const PipelineResult& result);
PipelineResult pipeline_result_from_json(const std::string& line);

// Transcribes clips concurrently under the client's shared in-flight limit;
// output order follows clip order regardless of completion order. Any
// failed clip fails the whole call.
std::vector<std::string> transcribe(const std::vector<AudioClip>& clips, const AsrClient& asr,
                                    int* total_retries = nullptr);

// One chat completion at the endpoint's decode settings; strips a leading
// prompt echo and surrounding whitespace. Empty source is an error before
// any network call; empty reply is an error.
std::string translate(const std::string& text, const ChatClient& mt,
                      const PromptTemplate& prompt_template, int* retries = nullptr);

struct CascadeOptions {
  std::string audio_root;  // prefix for relative audio paths
  NormalizationConfig norm;
  std::optional<PromptTemplate> prompt;  // default template for target otherwise
};

// read audio -> resample 16 kHz -> 30 s clips -> transcribe -> join ->
// normalize -> translate. Stage failures are reported with the stage name.
PipelineResult cascade(const Segment& segment, const AsrClient& asr, const ChatClient& mt,
                       TargetLang target, const CascadeOptions& options = {},
                       const Clock& clock = monotone_seconds);

struct RunFailure {
  std::string segment_id;
  std::string error;
};

struct RunLog {
  std::size_t completed = 0;       // processed this run
  std::size_t resumed = 0;         // taken from the checkpoint
  std::size_t skipped_no_audio = 0;
  std::vector<RunFailure> failures;

  bool ok() const { return failures.empty(); }
};

struct BatchOptions {
  std::string checkpoint_path;  // required, append-only JSONL
  std::string audio_root;
  NormalizationConfig norm;
  std::optional<PromptTemplate> prompt;
  std::size_t worker_threads = 0;  // 0: use the ASR client's in-flight limit
};

// Runs the cascade over every audio segment, appending one checkpoint line
// per completed segment. Restart skips checkpointed ids; a truncated final
// checkpoint line is tolerated. Per-segment failures are logged, the run
// continues.
HypothesisSet batch_run(const Corpus& corpus, const AsrClient& asr, const ChatClient& mt,
                        TargetLang target, const BatchOptions& options, RunLog* log,
                        const Clock& clock = monotone_seconds);

}  // namespace csteval

#endif  // CSTEVAL_PIPELINE_HPP_
