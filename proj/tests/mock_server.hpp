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

// Instrumented in-process HTTP endpoint for client, pipeline, and bench
// tests. Serves the chat, transcription, and embedding routes with
// configurable failures, delays, and reply bodies, and records request
// bodies plus a concurrent-request high-water mark.

#ifndef CSTEVAL_TESTS_MOCK_SERVER_HPP_
#define CSTEVAL_TESTS_MOCK_SERVER_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace csteval_test {

class MockServer {
 public:
  MockServer() { install_routes(); }
  ~MockServer() { stop(); }

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  void start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int port() const { return port_; }

  // Failure injection: the first `fail_first` requests (across all routes)
  // get `fail_status` with an empty body.
  std::atomic<int> fail_first{0};
  std::atomic<int> fail_status{500};

  // Fixed handler delay, applied to every request.
  std::atomic<int> delay_ms{0};
  // Per-arrival delay override, keyed by 0-based arrival index; takes
  // precedence over delay_ms when set.
  std::function<int(int)> delay_for_arrival;

  // Reply customization. The argument is the parsed request body.
  std::function<std::string(const nlohmann::json&)> chat_reply;
  std::function<std::string(const nlohmann::json&)> asr_reply;
  std::atomic<bool> include_usage{true};
  std::atomic<long long> completion_tokens{4};
  std::atomic<int> embedding_dim{8};

  // Instrumentation.
  std::atomic<int> total_calls{0};
  std::atomic<int> chat_calls{0};
  std::atomic<int> asr_calls{0};
  std::atomic<int> embed_calls{0};
  std::atomic<int> in_flight{0};
  std::atomic<int> max_in_flight{0};

  std::vector<nlohmann::json> chat_bodies() {
    std::lock_guard<std::mutex> lock(mu_);
    return chat_bodies_;
  }
  std::vector<nlohmann::json> asr_bodies() {
    std::lock_guard<std::mutex> lock(mu_);
    return asr_bodies_;
  }
  std::string last_authorization() {
    std::lock_guard<std::mutex> lock(mu_);
    return last_authorization_;
  }

 private:
  // Tracks arrival order and the high-water mark; returns the arrival index.
  int enter(const httplib::Request& req) {
    int arrival = total_calls.fetch_add(1);
    int now = in_flight.fetch_add(1) + 1;
    int seen = max_in_flight.load();
    while (now > seen && !max_in_flight.compare_exchange_weak(seen, now)) {
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (req.has_header("Authorization")) {
        last_authorization_ = req.get_header_value("Authorization");
      }
    }
    int sleep_ms = delay_for_arrival ? delay_for_arrival(arrival) : delay_ms.load();
    if (sleep_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
    return arrival;
  }

  void leave() { in_flight.fetch_sub(1); }

  bool maybe_fail(httplib::Response& res) {
    int remaining = fail_first.load();
    while (remaining > 0) {
      if (fail_first.compare_exchange_weak(remaining, remaining - 1)) {
        res.status = fail_status.load();
        res.set_content("injected failure", "text/plain");
        return true;
      }
    }
    return false;
  }

  void install_routes() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      enter(req);
      chat_calls.fetch_add(1);
      if (!maybe_fail(res)) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        {
          std::lock_guard<std::mutex> lock(mu_);
          chat_bodies_.push_back(body);
        }
        std::string content =
            chat_reply ? chat_reply(body) : "reply to: " + last_user_message(body);
        nlohmann::json reply = {
            {"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
        if (include_usage.load()) {
          reply["usage"] = {{"completion_tokens", completion_tokens.load()}};
        }
        res.set_content(reply.dump(), "application/json");
      }
      leave();
    });

    server_.Post("/v1/audio/transcriptions", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
      enter(req);
      asr_calls.fetch_add(1);
      if (!maybe_fail(res)) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        {
          std::lock_guard<std::mutex> lock(mu_);
          asr_bodies_.push_back(body);
        }
        std::string text = asr_reply ? asr_reply(body)
                                     : default_asr_text(body.value("audio", std::string()));
        nlohmann::json reply = {{"text", text}};
        res.set_content(reply.dump(), "application/json");
      }
      leave();
    });

    server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
      enter(req);
      embed_calls.fetch_add(1);
      if (!maybe_fail(res)) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        nlohmann::json data = nlohmann::json::array();
        for (const auto& item : body.at("input")) {
          data.push_back({{"embedding", embed_text(item.get<std::string>())}});
        }
        nlohmann::json reply = {{"data", data}};
        res.set_content(reply.dump(), "application/json");
      }
      leave();
    });
  }

  static std::string last_user_message(const nlohmann::json& body) {
    if (!body.contains("messages") || body["messages"].empty()) return "";
    return body["messages"].back().value("content", "");
  }

  // Distinct payloads map to distinct transcripts, so clip-order tests can
  // tell responses apart by content alone.
  static std::string default_asr_text(const std::string& audio_b64) {
    return "t" + std::to_string(fnv1a(audio_b64) % 100000) + "n" +
           std::to_string(audio_b64.size());
  }

  // Deterministic pseudo-embedding: identical strings map to identical
  // vectors, distinct strings to (almost surely) non-parallel ones.
  std::vector<double> embed_text(const std::string& text) const {
    std::vector<double> v(static_cast<std::size_t>(embedding_dim.load()));
    std::uint64_t h = fnv1a(text);
    for (double& x : v) {
      h = h * 6364136223846793005ull + 1442695040888963407ull;
      x = static_cast<double>(static_cast<std::int64_t>(h >> 11)) / 9.0e18 + 0.1;
    }
    return v;
  }

  static std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::vector<nlohmann::json> chat_bodies_;
  std::vector<nlohmann::json> asr_bodies_;
  std::string last_authorization_;
};

}  // namespace csteval_test

#endif  // CSTEVAL_TESTS_MOCK_SERVER_HPP_
