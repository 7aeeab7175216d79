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

#ifndef CSTEVAL_CONFIG_HPP_
#define CSTEVAL_CONFIG_HPP_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csteval/clients.hpp"
#include "csteval/corpus.hpp"
#include "csteval/metrics.hpp"
#include "csteval/text_normalize.hpp"

namespace csteval {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusConfig {
  std::string path;
  CorpusFormat format = CorpusFormat::kJsonl;
  std::string audio_root;
  // Optional expected split sizes checked by `ingest`.
  std::map<std::string, std::size_t> expected_splits;
};

struct MetricsConfig {
  std::vector<Metric> set{Metric::kBleu, Metric::kMeteor, Metric::kWer, Metric::kCer,
                          Metric::kEed};
  int max_ngram = 4;
  bool normalize = true;
};

// Full harness configuration. Unknown keys anywhere in the file are
// rejected so typos fail fast.
struct HarnessConfig {
  CorpusConfig corpus;
  NormalizationConfig normalization;
  MetricsConfig metrics;
  std::optional<EndpointConfig> asr;
  std::optional<EndpointConfig> mt;
  std::optional<EndpointConfig> embeddings;
  std::optional<EndpointConfig> grader;
  std::map<std::string, std::string> tokenizers;  // label -> model path
  std::string output_dir = "out";

  // Sorted-key JSON of everything that influences scores (normalization,
  // metric parameters, model identities and decode settings, prompt
  // templates, rubric). Secrets and endpoint addresses stay out.
  std::string canonical_json() const;
  std::string fingerprint() const;

  MetricOptions metric_options() const;
};

HarnessConfig parse_config(const std::string& yaml_text);
HarnessConfig load_config(const std::string& path);

// Existence checks for every referenced path (corpus file, tokenizer
// models, audio root when set).
void validate_config_paths(const HarnessConfig& config);

}  // namespace csteval

#endif  // CSTEVAL_CONFIG_HPP_
