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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "csteval/config.hpp"
#include "csteval/corpus.hpp"
#include "csteval/fingerprint.hpp"
#include "doctest.h"

using namespace csteval;

namespace {

const char* kFullYaml = R"(corpus:
  path: data/fixtures/corpus.jsonl
  format: jsonl
  audio_root: data/fixtures
  expected_splits:
    train: 14
    test: 6
normalization:
  strip_urls: true
  strip_emoticons: false
  lowercase_latin: true
  collapse_whitespace: true
  unicode_form: NFC
  annotation_patterns: ["\\[[^\\[\\]]*\\]"]
metrics:
  set: [bleu, meteor, wer]
  max_ngram: 4
  normalize: true
endpoints:
  asr:
    base_url: http://127.0.0.1:8801
    model_id: whisper-large-v3
    timeout_s: 20
    max_in_flight: 3
  mt:
    base_url: http://127.0.0.1:8802/v1x
    model_id: llama-3.1-8b
    temperature: 0.2
    max_tokens: 256
    api_key_env: CSTEVAL_TEST_KEY
tokenizers:
  arabic: data/tokenizers/arabic_bpe.json
output_dir: runs/demo
)";

std::string minimal_yaml(const std::string& extra = "") {
  return "corpus:\n  path: corpus.jsonl\n" + extra;
}

}  // namespace

TEST_CASE("full configs parse with every documented key") {
  setenv("CSTEVAL_TEST_KEY", "k-123", 1);
  HarnessConfig cfg = parse_config(kFullYaml);
  CHECK(cfg.corpus.path == "data/fixtures/corpus.jsonl");
  CHECK(cfg.corpus.format == CorpusFormat::kJsonl);
  CHECK(cfg.corpus.audio_root == "data/fixtures");
  CHECK(cfg.corpus.expected_splits.at("train") == 14);
  CHECK(cfg.corpus.expected_splits.at("test") == 6);
  CHECK_FALSE(cfg.normalization.strip_emoticons);
  CHECK(cfg.normalization.strip_urls);
  CHECK(cfg.normalization.annotation_patterns.size() == 1);
  CHECK(cfg.metrics.set ==
        std::vector<Metric>{Metric::kBleu, Metric::kMeteor, Metric::kWer});
  REQUIRE(cfg.asr.has_value());
  CHECK(cfg.asr->model_id == "whisper-large-v3");
  CHECK(cfg.asr->timeout_s == doctest::Approx(20.0));
  CHECK(cfg.asr->max_in_flight == 3);
  REQUIRE(cfg.mt.has_value());
  CHECK(cfg.mt->decode.temperature == doctest::Approx(0.2));
  CHECK(cfg.mt->decode.max_tokens == 256);
  REQUIRE(cfg.mt->api_key.has_value());
  CHECK(*cfg.mt->api_key == "k-123");
  CHECK_FALSE(cfg.embeddings.has_value());
  CHECK(cfg.tokenizers.at("arabic") == "data/tokenizers/arabic_bpe.json");
  CHECK(cfg.output_dir == "runs/demo");
  unsetenv("CSTEVAL_TEST_KEY");
}

TEST_CASE("defaults fill the optional sections") {
  HarnessConfig cfg = parse_config(minimal_yaml());
  CHECK(cfg.corpus.format == CorpusFormat::kJsonl);
  CHECK(cfg.normalization.strip_urls);
  CHECK(cfg.normalization.lowercase_latin);
  CHECK(cfg.normalization.unicode_form == "NFC");
  CHECK(cfg.metrics.set.size() == 5);
  CHECK(cfg.metrics.max_ngram == 4);
  CHECK(cfg.output_dir == "out");
  CHECK_FALSE(cfg.asr.has_value());
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_WITH_AS(parse_config(minimal_yaml("surprise: 1\n")),
                       doctest::Contains("unknown key 'surprise'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("corpus:\n  path: x\n  pathh: y\n"),
                       doctest::Contains("'pathh'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(minimal_yaml("normalization:\n  lower: true\n")),
                       doctest::Contains("'lower'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(minimal_yaml("metrics:\n  ngram: 2\n")),
                       doctest::Contains("'ngram'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(minimal_yaml("endpoints:\n  translator:\n    base_url: x\n")),
                       doctest::Contains("'translator'"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(minimal_yaml("endpoints:\n  mt:\n    base_url: http://h\n    apikey: x\n")),
      doctest::Contains("'apikey'"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config("corpus:\n  path: x\n  expected_splits:\n    dev: 3\n"),
      doctest::Contains("'dev'"), ConfigError);
}

TEST_CASE("structural and value errors carry precise messages") {
  CHECK_THROWS_WITH_AS(parse_config(": ["), doctest::Contains("not valid YAML"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("- a\n- b\n"), doctest::Contains("mapping"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("normalization: {}\n"),
                       doctest::Contains("corpus section"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("corpus:\n  format: tsv\n"),
                       doctest::Contains("corpus.path"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(minimal_yaml("normalization:\n  unicode_form: NFD\n")),
      doctest::Contains("only NFC"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(minimal_yaml("metrics:\n  max_ngram: 0\n")),
                       doctest::Contains("1..9"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(minimal_yaml("metrics:\n  max_ngram: 10\n")),
                       doctest::Contains("1..9"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(minimal_yaml("metrics:\n  set: []\n")),
                       doctest::Contains("must not be empty"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(minimal_yaml("metrics:\n  max_ngram: four\n")),
                       doctest::Contains("wrong type"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(minimal_yaml("endpoints:\n  mt: {model_id: m}\n")),
                       doctest::Contains("needs a base_url"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(
          minimal_yaml("endpoints:\n  mt:\n    base_url: http://h\n    timeout_s: 0\n")),
      doctest::Contains("timeout_s"), ConfigError);
  // Unknown metric and corpus format names come from their own parsers.
  CHECK_THROWS_AS(parse_config(minimal_yaml("metrics:\n  set: [rouge]\n")), MetricsError);
  CHECK_THROWS_AS(parse_config("corpus:\n  path: x\n  format: csv\n"), CorpusError);
}

TEST_CASE("api keys resolve through the environment only") {
  std::string yaml = minimal_yaml(
      "endpoints:\n  mt:\n    base_url: http://h\n    api_key_env: CSTEVAL_ABSENT_KEY\n");
  unsetenv("CSTEVAL_ABSENT_KEY");
  CHECK_FALSE(parse_config(yaml).mt->api_key.has_value());
  setenv("CSTEVAL_ABSENT_KEY", "", 1);
  CHECK_FALSE(parse_config(yaml).mt->api_key.has_value());
  setenv("CSTEVAL_ABSENT_KEY", "value", 1);
  CHECK(parse_config(yaml).mt->api_key == "value");
  unsetenv("CSTEVAL_ABSENT_KEY");
}

TEST_CASE("fnv1a64 matches the reference vectors") {
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fingerprint_hex("") == "cbf29ce484222325");
  CHECK(fingerprint_hex("a") == "af63dc4c8601ec8c");
  CHECK(fingerprint_hex("a") != fingerprint_hex("b"));
  CHECK(fingerprint_hex("x").size() == 16);
}

TEST_CASE("fingerprints ignore addresses and secrets but track scoring knobs") {
  setenv("CSTEVAL_FP_KEY", "secret-1", 1);
  std::string base = minimal_yaml(
      "endpoints:\n  mt:\n    base_url: http://a:1\n    model_id: m1\n");
  std::string moved = minimal_yaml(
      "endpoints:\n  mt:\n    base_url: http://b:2\n    model_id: m1\n"
      "    api_key_env: CSTEVAL_FP_KEY\n");
  CHECK(parse_config(base).fingerprint() == parse_config(moved).fingerprint());
  CHECK(parse_config(base).fingerprint() == parse_config(base).fingerprint());

  std::string other_model = minimal_yaml(
      "endpoints:\n  mt:\n    base_url: http://a:1\n    model_id: m2\n");
  CHECK(parse_config(base).fingerprint() != parse_config(other_model).fingerprint());

  std::string other_decode = minimal_yaml(
      "endpoints:\n  mt:\n    base_url: http://a:1\n    model_id: m1\n    temperature: 0.7\n");
  CHECK(parse_config(base).fingerprint() != parse_config(other_decode).fingerprint());

  CHECK(parse_config(minimal_yaml()).fingerprint() !=
        parse_config(minimal_yaml("metrics:\n  set: [bleu]\n")).fingerprint());
  CHECK(parse_config(minimal_yaml()).fingerprint() !=
        parse_config(minimal_yaml("normalization:\n  strip_urls: false\n")).fingerprint());
  CHECK(parse_config(minimal_yaml()).fingerprint() !=
        parse_config(minimal_yaml("tokenizers:\n  t: p.json\n")).fingerprint());
  // Retry plumbing does not affect scores.
  std::string retries = minimal_yaml(
      "endpoints:\n  mt:\n    base_url: http://a:1\n    model_id: m1\n    max_retries: 7\n");
  CHECK(parse_config(base).fingerprint() == parse_config(retries).fingerprint());
  unsetenv("CSTEVAL_FP_KEY");
}

TEST_CASE("metric options mirror the config") {
  HarnessConfig cfg = parse_config(minimal_yaml(
      "metrics:\n  max_ngram: 2\n  normalize: false\nnormalization:\n  strip_urls: false\n"));
  MetricOptions opts = cfg.metric_options();
  CHECK(opts.max_ngram == 2);
  CHECK_FALSE(opts.normalize);
  CHECK_FALSE(opts.norm.strip_urls);
}

TEST_CASE("configs load from disk with the path in error messages") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "csteval-config-test";
  fs::create_directories(dir);
  fs::path good = dir / "good.yaml";
  std::ofstream(good) << minimal_yaml();
  CHECK(load_config(good.string()).corpus.path == "corpus.jsonl");

  fs::path bad = dir / "bad.yaml";
  std::ofstream(bad) << "corpus:\n  path: x\n  bogus: 1\n";
  CHECK_THROWS_WITH_AS(load_config(bad.string()), doctest::Contains("bad.yaml"), ConfigError);
  CHECK_THROWS_WITH_AS(load_config((dir / "missing.yaml").string()),
                       doctest::Contains("cannot open"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("path validation names the missing artifact") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "csteval-paths-test";
  fs::create_directories(dir / "audio");
  std::ofstream(dir / "corpus.jsonl") << "";
  std::ofstream(dir / "tok.json") << "{}";

  HarnessConfig cfg;
  cfg.corpus.path = (dir / "corpus.jsonl").string();
  cfg.corpus.audio_root = (dir / "audio").string();
  cfg.tokenizers["t"] = (dir / "tok.json").string();
  CHECK_NOTHROW(validate_config_paths(cfg));

  HarnessConfig missing_corpus = cfg;
  missing_corpus.corpus.path = (dir / "absent.jsonl").string();
  CHECK_THROWS_WITH_AS(validate_config_paths(missing_corpus),
                       doctest::Contains("corpus file"), ConfigError);
  HarnessConfig missing_audio = cfg;
  missing_audio.corpus.audio_root = (dir / "no-audio").string();
  CHECK_THROWS_WITH_AS(validate_config_paths(missing_audio), doctest::Contains("audio root"),
                       ConfigError);
  HarnessConfig missing_tok = cfg;
  missing_tok.tokenizers["t"] = (dir / "absent.json").string();
  CHECK_THROWS_WITH_AS(validate_config_paths(missing_tok),
                       doctest::Contains("tokenizer model"), ConfigError);
  fs::remove_all(dir);
}
