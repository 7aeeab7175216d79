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

#include "csteval/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "csteval/fingerprint.hpp"
#include "csteval/pipeline.hpp"
#include "json.hpp"
#include "yaml-cpp/yaml.h"

namespace csteval {
namespace {

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!node.IsMap()) return;
  for (const auto& kv : node) {
    std::string key = kv.first.as<std::string>();
    if (allowed.count(key) == 0) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

template <typename T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
  if (!node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("key '") + key + "' has the wrong type");
  }
}

EndpointConfig parse_endpoint(const YAML::Node& node, const std::string& context) {
  check_keys(node,
             {"base_url", "model_id", "api_key_env", "timeout_s", "max_retries",
              "max_in_flight", "retry_backoff_s", "temperature", "max_tokens"},
             context);
  EndpointConfig cfg;
  if (!node["base_url"]) throw ConfigError(context + " needs a base_url");
  cfg.base_url = node["base_url"].as<std::string>();
  cfg.model_id = get_or<std::string>(node, "model_id", "");
  cfg.timeout_s = get_or<double>(node, "timeout_s", cfg.timeout_s);
  cfg.max_retries = get_or<int>(node, "max_retries", cfg.max_retries);
  cfg.max_in_flight = get_or<int>(node, "max_in_flight", cfg.max_in_flight);
  cfg.retry_backoff_s = get_or<double>(node, "retry_backoff_s", cfg.retry_backoff_s);
  cfg.decode.temperature = get_or<double>(node, "temperature", cfg.decode.temperature);
  cfg.decode.max_tokens = get_or<int>(node, "max_tokens", cfg.decode.max_tokens);
  if (node["api_key_env"]) {
    std::string env_name = node["api_key_env"].as<std::string>();
    const char* value = std::getenv(env_name.c_str());
    if (value != nullptr && value[0] != '\0') cfg.api_key = std::string(value);
  }
  try {
    cfg.validate();
  } catch (const ClientError& e) {
    throw ConfigError(context + ": " + e.what());
  }
  return cfg;
}

nlohmann::json endpoint_fingerprint_json(const std::optional<EndpointConfig>& cfg) {
  if (!cfg) return nullptr;
  return {{"model_id", cfg->model_id},
          {"temperature", cfg->decode.temperature},
          {"max_tokens", cfg->decode.max_tokens}};
}

}  // namespace

std::string HarnessConfig::canonical_json() const {
  GraderRubric rubric;
  nlohmann::json doc = {
      {"corpus", {{"path", corpus.path}, {"format", corpus.format == CorpusFormat::kJsonl
                                                        ? "jsonl"
                                                        : "tsv"}}},
      {"normalization",
       {{"strip_urls", normalization.strip_urls},
        {"strip_emoticons", normalization.strip_emoticons},
        {"lowercase_latin", normalization.lowercase_latin},
        {"collapse_whitespace", normalization.collapse_whitespace},
        {"unicode_form", normalization.unicode_form},
        {"annotation_patterns", normalization.annotation_patterns}}},
      {"metrics",
       {{"set", [this] {
           std::vector<std::string> names;
           for (Metric m : metrics.set) names.push_back(to_string(m));
           return names;
         }()},
        {"max_ngram", metrics.max_ngram},
        {"normalize", metrics.normalize}}},
      {"endpoints",
       {{"asr", endpoint_fingerprint_json(asr)},
        {"mt", endpoint_fingerprint_json(mt)},
        {"embeddings", endpoint_fingerprint_json(embeddings)},
        {"grader", endpoint_fingerprint_json(grader)}}},
      {"prompts",
       {{"mt_en", default_prompt_template(TargetLang::kEn).user_pattern},
        {"mt_ar", default_prompt_template(TargetLang::kAr).user_pattern},
        {"rubric_system", rubric.system_text},
        {"rubric_user", rubric.user_pattern}}},
      {"tokenizers", tokenizers},
  };
  return doc.dump();
}

std::string HarnessConfig::fingerprint() const { return fingerprint_hex(canonical_json()); }

MetricOptions HarnessConfig::metric_options() const {
  MetricOptions opts;
  opts.normalize = metrics.normalize;
  opts.norm = normalization;
  opts.max_ngram = metrics.max_ngram;
  return opts;
}

HarnessConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config root must be a mapping");
  check_keys(root,
             {"corpus", "normalization", "metrics", "endpoints", "tokenizers", "output_dir"},
             "config root");

  HarnessConfig cfg;
  if (root["corpus"]) {
    const YAML::Node& c = root["corpus"];
    check_keys(c, {"path", "format", "audio_root", "expected_splits"}, "corpus");
    if (!c["path"]) throw ConfigError("corpus.path is required");
    cfg.corpus.path = c["path"].as<std::string>();
    cfg.corpus.format =
        corpus_format_from_string(get_or<std::string>(c, "format", "jsonl"));
    cfg.corpus.audio_root = get_or<std::string>(c, "audio_root", "");
    if (c["expected_splits"]) {
      check_keys(c["expected_splits"], {"train", "test", "other"}, "corpus.expected_splits");
      for (const auto& kv : c["expected_splits"]) {
        cfg.corpus.expected_splits[kv.first.as<std::string>()] = kv.second.as<std::size_t>();
      }
    }
  } else {
    throw ConfigError("config needs a corpus section");
  }

  if (root["normalization"]) {
    const YAML::Node& n = root["normalization"];
    check_keys(n,
               {"strip_urls", "strip_emoticons", "lowercase_latin", "collapse_whitespace",
                "unicode_form", "annotation_patterns"},
               "normalization");
    cfg.normalization.strip_urls = get_or<bool>(n, "strip_urls", true);
    cfg.normalization.strip_emoticons = get_or<bool>(n, "strip_emoticons", true);
    cfg.normalization.lowercase_latin = get_or<bool>(n, "lowercase_latin", true);
    cfg.normalization.collapse_whitespace = get_or<bool>(n, "collapse_whitespace", true);
    cfg.normalization.unicode_form = get_or<std::string>(n, "unicode_form", "NFC");
    if (cfg.normalization.unicode_form != "NFC") {
      throw ConfigError("normalization.unicode_form: only NFC is supported");
    }
    if (n["annotation_patterns"]) {
      cfg.normalization.annotation_patterns =
          n["annotation_patterns"].as<std::vector<std::string>>();
    }
  }

  if (root["metrics"]) {
    const YAML::Node& m = root["metrics"];
    check_keys(m, {"set", "max_ngram", "normalize"}, "metrics");
    if (m["set"]) {
      cfg.metrics.set.clear();
      for (const auto& name : m["set"]) {
        cfg.metrics.set.push_back(metric_from_string(name.as<std::string>()));
      }
      if (cfg.metrics.set.empty()) throw ConfigError("metrics.set must not be empty");
    }
    cfg.metrics.max_ngram = get_or<int>(m, "max_ngram", 4);
    if (cfg.metrics.max_ngram < 1 || cfg.metrics.max_ngram > 9) {
      throw ConfigError("metrics.max_ngram must be in 1..9");
    }
    cfg.metrics.normalize = get_or<bool>(m, "normalize", true);
  }

  if (root["endpoints"]) {
    const YAML::Node& e = root["endpoints"];
    check_keys(e, {"asr", "mt", "embeddings", "grader"}, "endpoints");
    if (e["asr"]) cfg.asr = parse_endpoint(e["asr"], "endpoints.asr");
    if (e["mt"]) cfg.mt = parse_endpoint(e["mt"], "endpoints.mt");
    if (e["embeddings"]) cfg.embeddings = parse_endpoint(e["embeddings"], "endpoints.embeddings");
    if (e["grader"]) cfg.grader = parse_endpoint(e["grader"], "endpoints.grader");
  }

  if (root["tokenizers"]) {
    if (!root["tokenizers"].IsMap()) {
      throw ConfigError("tokenizers must map labels to model paths");
    }
    for (const auto& kv : root["tokenizers"]) {
      cfg.tokenizers[kv.first.as<std::string>()] = kv.second.as<std::string>();
    }
  }

  cfg.output_dir = get_or<std::string>(root, "output_dir", "out");
  return cfg;
}

HarnessConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void validate_config_paths(const HarnessConfig& config) {
  auto must_exist = [](const std::string& path, const std::string& what) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
      throw ConfigError(what + " '" + path + "' does not exist");
    }
  };
  must_exist(config.corpus.path, "corpus file");
  if (!config.corpus.audio_root.empty()) must_exist(config.corpus.audio_root, "audio root");
  for (const auto& [label, path] : config.tokenizers) {
    must_exist(path, "tokenizer model for '" + label + "'");
  }
}

}  // namespace csteval
