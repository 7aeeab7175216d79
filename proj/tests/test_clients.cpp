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
#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "csteval/audio.hpp"
#include "csteval/clients.hpp"
#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "mock_server.hpp"

using namespace csteval;
using csteval_test::MockServer;

namespace {

EndpointConfig quick_endpoint(const std::string& base_url) {
  EndpointConfig cfg;
  cfg.base_url = base_url;
  cfg.model_id = "mock-model";
  cfg.retry_backoff_s = 0.01;
  return cfg;
}

AudioClip tone_clip(double seconds = 0.25) {
  AudioClip clip;
  clip.sample_rate = 16000;
  std::size_t n = static_cast<std::size_t>(seconds * clip.sample_rate);
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] = 0.3f * std::sin(2.0 * 3.14159265358979 * 440.0 * i / clip.sample_rate);
  }
  return clip;
}

}  // namespace

TEST_CASE("base64 follows the reference vectors") {
  auto enc = [](const std::string& s) {
    return base64_encode(std::vector<uint8_t>(s.begin(), s.end()));
  };
  CHECK(enc("") == "");
  CHECK(enc("f") == "Zg==");
  CHECK(enc("fo") == "Zm8=");
  CHECK(enc("foo") == "Zm9v");
  CHECK(enc("foob") == "Zm9vYg==");
  CHECK(enc("fooba") == "Zm9vYmE=");
  CHECK(enc("foobar") == "Zm9vYmFy");
  CHECK(base64_encode({0xFF, 0x00, 0xFE}) == "/wD+");
}

TEST_CASE("endpoint config validation rejects out-of-range fields") {
  EndpointConfig cfg = quick_endpoint("http://localhost:9");
  CHECK_NOTHROW(cfg.validate());
  CHECK_FALSE(EndpointConfig{}.configured());
  CHECK(cfg.configured());

  EndpointConfig bad = cfg;
  bad.base_url = "";
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("base_url"), ClientError);
  bad = cfg;
  bad.base_url = "localhost:8080";
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("scheme"), ClientError);
  bad = cfg;
  bad.timeout_s = 0.0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("timeout_s"), ClientError);
  bad = cfg;
  bad.max_in_flight = 0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("max_in_flight"), ClientError);
  bad = cfg;
  bad.max_retries = -1;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("max_retries"), ClientError);
  bad = cfg;
  bad.retry_backoff_s = -0.5;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("retry_backoff_s"), ClientError);
  CHECK_THROWS_AS(ConcurrencyLimiter(0), ClientError);
}

TEST_CASE("chat client sends the documented body and reads the first choice") {
  MockServer server;
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(4);
  EndpointConfig cfg = quick_endpoint(server.base_url());
  cfg.decode.temperature = 0.25;
  cfg.decode.max_tokens = 64;
  ChatClient client(cfg, limiter);

  ChatResult result = client.complete("be brief", "translate this");
  CHECK(result.text == "reply to: translate this");
  CHECK(result.retry_count == 0);
  REQUIRE(result.completion_tokens.has_value());
  CHECK(*result.completion_tokens == 4);

  std::vector<nlohmann::json> bodies = server.chat_bodies();
  REQUIRE(bodies.size() == 1);
  const nlohmann::json& body = bodies[0];
  CHECK(body.at("model") == "mock-model");
  CHECK(body.at("temperature").get<double>() == doctest::Approx(0.25));
  CHECK(body.at("max_tokens").get<int>() == 64);
  REQUIRE(body.at("messages").size() == 2);
  CHECK(body["messages"][0].at("role") == "system");
  CHECK(body["messages"][0].at("content") == "be brief");
  CHECK(body["messages"][1].at("role") == "user");
  CHECK(body["messages"][1].at("content") == "translate this");
}

TEST_CASE("chat client omits usage tokens when the endpoint does") {
  MockServer server;
  server.include_usage.store(false);
  server.start();
  ChatClient client(quick_endpoint(server.base_url()),
                    std::make_shared<ConcurrencyLimiter>(1));
  CHECK_FALSE(client.complete("s", "u").completion_tokens.has_value());
}

TEST_CASE("transient statuses are retried with the attempt budget") {
  MockServer server;
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(2);

  SUBCASE("500 twice then success") {
    server.fail_first.store(2);
    ChatClient client(quick_endpoint(server.base_url()), limiter);
    ChatResult result = client.complete("s", "hello");
    CHECK(result.text == "reply to: hello");
    CHECK(result.retry_count == 2);
    CHECK(server.chat_calls.load() == 3);
  }
  SUBCASE("429 once then success") {
    server.fail_first.store(1);
    server.fail_status.store(429);
    ChatClient client(quick_endpoint(server.base_url()), limiter);
    CHECK(client.complete("s", "hello").retry_count == 1);
    CHECK(server.chat_calls.load() == 2);
  }
  SUBCASE("budget exhausted") {
    server.fail_first.store(100);
    ChatClient client(quick_endpoint(server.base_url()), limiter);
    CHECK_THROWS_WITH_AS(client.complete("s", "hello"),
                         doctest::Contains("retries exhausted"), ClientError);
    // One initial attempt plus max_retries.
    CHECK(server.chat_calls.load() == 3);
  }
  SUBCASE("client errors are not retried") {
    server.fail_first.store(1);
    server.fail_status.store(400);
    ChatClient client(quick_endpoint(server.base_url()), limiter);
    CHECK_THROWS_WITH_AS(client.complete("s", "hello"), doctest::Contains("HTTP 400"),
                         ClientError);
    CHECK(server.chat_calls.load() == 1);
  }
}

TEST_CASE("connection failures surface after the retry budget") {
  // Nothing listens on the discard port.
  EndpointConfig cfg = quick_endpoint("http://127.0.0.1:9");
  cfg.max_retries = 1;
  cfg.timeout_s = 2.0;
  ChatClient client(cfg, std::make_shared<ConcurrencyLimiter>(1));
  CHECK_THROWS_WITH_AS(client.complete("s", "u"), doctest::Contains("retries exhausted"),
                       ClientError);
}

TEST_CASE("api key travels as a bearer token") {
  MockServer server;
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(1);
  EndpointConfig cfg = quick_endpoint(server.base_url());
  cfg.api_key = "sekret-token";
  ChatClient with_key(cfg, limiter);
  with_key.complete("s", "u");
  CHECK(server.last_authorization() == "Bearer sekret-token");
}

TEST_CASE("base url path prefixes are joined onto routes") {
  httplib::Server raw;
  raw.Post("/gateway/v1/chat/completions",
           [](const httplib::Request&, httplib::Response& res) {
             nlohmann::json reply = {
                 {"choices",
                  {{{"message", {{"role", "assistant"}, {"content", "prefixed"}}}}}}};
             res.set_content(reply.dump(), "application/json");
           });
  int port = raw.bind_to_any_port("127.0.0.1");
  std::thread thread([&raw] { raw.listen_after_bind(); });
  raw.wait_until_ready();

  ChatClient client(quick_endpoint("http://127.0.0.1:" + std::to_string(port) + "/gateway"),
                    std::make_shared<ConcurrencyLimiter>(1));
  CHECK(client.complete("s", "u").text == "prefixed");
  raw.stop();
  thread.join();
}

TEST_CASE("asr client ships base64 wav audio with a language tag") {
  MockServer server;
  server.start();
  AsrClient client(quick_endpoint(server.base_url()), std::make_shared<ConcurrencyLimiter>(2));
  AudioClip clip = tone_clip();
  AsrResult result = client.transcribe(clip);
  CHECK_FALSE(result.text.empty());

  std::vector<nlohmann::json> bodies = server.asr_bodies();
  REQUIRE(bodies.size() == 1);
  CHECK(bodies[0].at("model") == "mock-model");
  CHECK(bodies[0].at("language") == "ar-en");
  const std::string audio_b64 = bodies[0].at("audio").get<std::string>();
  CHECK(audio_b64 == base64_encode(wav_pcm16_bytes(clip)));

  AsrResult tagged = client.transcribe(clip, "ar");
  CHECK(server.asr_bodies()[1].at("language") == "ar");
  // Identical payloads transcribe identically under the mock.
  CHECK(tagged.text == result.text);
}

TEST_CASE("embedding client preserves input order and size") {
  MockServer server;
  server.start();
  EmbeddingClient client(quick_endpoint(server.base_url()),
                         std::make_shared<ConcurrencyLimiter>(2));
  std::vector<std::vector<double>> first = client.embed({"alpha", "beta", "alpha"});
  REQUIRE(first.size() == 3);
  CHECK(first[0].size() == 8);
  CHECK(first[0] == first[2]);
  CHECK(first[0] != first[1]);
  // Deterministic across calls.
  CHECK(client.embed({"alpha"})[0] == first[0]);
  CHECK(client.embed({}).empty());
}

TEST_CASE("embedding client rejects malformed replies") {
  httplib::Server raw;
  std::atomic<int> mode{0};
  raw.Post("/v1/embeddings", [&mode](const httplib::Request&, httplib::Response& res) {
    nlohmann::json reply;
    if (mode.load() == 0) {
      reply = {{"data", nlohmann::json::array()}};  // wrong count
    } else {
      reply = {{"data", {{{"vector", {1.0, 2.0}}}}}};  // missing key
    }
    res.set_content(reply.dump(), "application/json");
  });
  int port = raw.bind_to_any_port("127.0.0.1");
  std::thread thread([&raw] { raw.listen_after_bind(); });
  raw.wait_until_ready();

  EmbeddingClient client(quick_endpoint("http://127.0.0.1:" + std::to_string(port)),
                         std::make_shared<ConcurrencyLimiter>(1));
  CHECK_THROWS_WITH_AS(client.embed({"x"}), doctest::Contains("one data entry per input"),
                       ClientError);
  mode.store(1);
  CHECK_THROWS_WITH_AS(client.embed({"x"}), doctest::Contains("embedding array"), ClientError);
  raw.stop();
  thread.join();
}

TEST_CASE("a shared limiter bounds concurrency across clients") {
  MockServer server;
  server.delay_ms.store(40);
  server.start();
  auto limiter = std::make_shared<ConcurrencyLimiter>(2);
  CHECK(limiter->limit() == 2);
  ChatClient chat(quick_endpoint(server.base_url()), limiter);
  EmbeddingClient embed(quick_endpoint(server.base_url()), limiter);

  std::vector<std::future<void>> jobs;
  for (int i = 0; i < 4; ++i) {
    jobs.push_back(std::async(std::launch::async, [&chat, i] {
      chat.complete("s", "job " + std::to_string(i));
    }));
    jobs.push_back(std::async(std::launch::async, [&embed] { embed.embed({"x", "y"}); }));
  }
  for (auto& job : jobs) job.get();
  CHECK(server.total_calls.load() == 8);
  CHECK(server.max_in_flight.load() <= 2);
}
