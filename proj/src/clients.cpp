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

#include "csteval/clients.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace csteval {
namespace {

struct ParsedUrl {
  std::string host_port;     // scheme://host:port, as httplib::Client wants it
  std::string path_prefix;   // "" or "/prefix" with no trailing slash
};

ParsedUrl split_base_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ClientError("base_url '" + base_url + "' must include a scheme");
  }
  auto path_start = base_url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.host_port = base_url;
  } else {
    out.host_port = base_url.substr(0, path_start);
    out.path_prefix = base_url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
      out.path_prefix.pop_back();
    }
  }
  return out;
}

bool transient_status(int status) { return status == 429 || status >= 500; }

// Runs one POST attempt; retries transient failures (connect errors, 429,
// 5xx) with exponential backoff. The in-flight ticket covers only the
// network call, never the backoff sleep.
nlohmann::json post_json(const EndpointConfig& cfg, ConcurrencyLimiter* limiter,
                         const std::string& route, const nlohmann::json& body,
                         int* retry_count) {
  ParsedUrl url = split_base_url(cfg.base_url);
  const std::string payload = body.dump();
  const std::string path = url.path_prefix + route;
  double backoff = cfg.retry_backoff_s;
  std::string last_error;

  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      if (retry_count) ++*retry_count;
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2;
    }
    httplib::Result res;
    {
      std::optional<ConcurrencyLimiter::Ticket> ticket;
      if (limiter) ticket.emplace(limiter->acquire());
      httplib::Client cli(url.host_port);
      const auto timeout = std::chrono::duration<double>(cfg.timeout_s);
      cli.set_connection_timeout(timeout);
      cli.set_read_timeout(timeout);
      cli.set_write_timeout(timeout);
      httplib::Headers headers;
      if (cfg.api_key) headers.emplace("Authorization", "Bearer " + *cfg.api_key);
      res = cli.Post(path, headers, payload, "application/json");
    }
    if (!res) {
      last_error = "connection to " + cfg.base_url + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw ClientError("endpoint " + cfg.base_url + route +
                          " returned unparseable JSON: " + e.what());
      }
    }
    std::string detail = res->body.substr(0, 200);
    if (transient_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status) + " from " + route + ": " + detail;
      continue;
    }
    throw ClientError("HTTP " + std::to_string(res->status) + " from " + cfg.base_url + route +
                      ": " + detail);
  }
  throw ClientError("retries exhausted for " + cfg.base_url + route + ": " + last_error);
}

}  // namespace

void EndpointConfig::validate() const {
  if (base_url.empty()) throw ClientError("endpoint base_url is empty");
  split_base_url(base_url);
  if (timeout_s <= 0) throw ClientError("endpoint timeout_s must be > 0");
  if (max_in_flight < 1) throw ClientError("endpoint max_in_flight must be >= 1");
  if (max_retries < 0) throw ClientError("endpoint max_retries must be >= 0");
  if (retry_backoff_s < 0) throw ClientError("endpoint retry_backoff_s must be >= 0");
}

ConcurrencyLimiter::ConcurrencyLimiter(int limit) : limit_(limit), available_(limit) {
  if (limit < 1) throw ClientError("concurrency limit must be >= 1");
}

ConcurrencyLimiter::Ticket ConcurrencyLimiter::acquire() {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [this] { return available_ > 0; });
  --available_;
  return Ticket(this);
}

void ConcurrencyLimiter::release() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++available_;
  }
  cv_.notify_one();
}

ConcurrencyLimiter::Ticket::~Ticket() {
  if (limiter_) limiter_->release();
}

ChatClient::ChatClient(EndpointConfig config, LimiterPtr limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
  config_.validate();
}

ChatResult ChatClient::complete(const std::string& system_text,
                                const std::string& user_text) const {
  nlohmann::json body = {
      {"model", config_.model_id},
      {"messages",
       {{{"role", "system"}, {"content", system_text}},
        {{"role", "user"}, {"content", user_text}}}},
      {"temperature", config_.decode.temperature},
      {"max_tokens", config_.decode.max_tokens},
  };
  ChatResult out;
  nlohmann::json reply =
      post_json(config_, limiter_.get(), "/v1/chat/completions", body, &out.retry_count);
  try {
    out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ClientError("chat reply from " + config_.base_url +
                      " lacks choices[0].message.content");
  }
  if (reply.contains("usage") && reply["usage"].contains("completion_tokens") &&
      reply["usage"]["completion_tokens"].is_number_integer()) {
    out.completion_tokens = reply["usage"]["completion_tokens"].get<long long>();
  }
  return out;
}

AsrClient::AsrClient(EndpointConfig config, LimiterPtr limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
  config_.validate();
}

AsrResult AsrClient::transcribe(const AudioClip& clip, const std::string& language) const {
  nlohmann::json body = {
      {"model", config_.model_id},
      {"audio", base64_encode(wav_pcm16_bytes(clip))},
      {"language", language},
  };
  AsrResult out;
  nlohmann::json reply =
      post_json(config_, limiter_.get(), "/v1/audio/transcriptions", body, &out.retry_count);
  if (!reply.contains("text") || !reply["text"].is_string()) {
    throw ClientError("transcription reply from " + config_.base_url + " lacks a text field");
  }
  out.text = reply["text"].get<std::string>();
  return out;
}

EmbeddingClient::EmbeddingClient(EndpointConfig config, LimiterPtr limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
  config_.validate();
}

std::vector<std::vector<double>> EmbeddingClient::embed(
    const std::vector<std::string>& input) const {
  if (input.empty()) return {};
  nlohmann::json body = {{"model", config_.model_id}, {"input", input}};
  nlohmann::json reply = post_json(config_, limiter_.get(), "/v1/embeddings", body, nullptr);
  if (!reply.contains("data") || !reply["data"].is_array() ||
      reply["data"].size() != input.size()) {
    throw ClientError("embedding reply from " + config_.base_url +
                      " must carry one data entry per input");
  }
  std::vector<std::vector<double>> out;
  out.reserve(input.size());
  for (const auto& item : reply["data"]) {
    if (!item.contains("embedding") || !item["embedding"].is_array()) {
      throw ClientError("embedding reply entry lacks an embedding array");
    }
    out.push_back(item["embedding"].get<std::vector<double>>());
  }
  return out;
}

std::string base64_encode(const std::vector<uint8_t>& bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    uint32_t n = (static_cast<uint32_t>(bytes[i]) << 16) |
                 (static_cast<uint32_t>(bytes[i + 1]) << 8) | bytes[i + 2];
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(kAlphabet[(n >> 6) & 63]);
    out.push_back(kAlphabet[n & 63]);
  }
  if (i + 1 == bytes.size()) {
    uint32_t n = static_cast<uint32_t>(bytes[i]) << 16;
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (i + 2 == bytes.size()) {
    uint32_t n = (static_cast<uint32_t>(bytes[i]) << 16) |
                 (static_cast<uint32_t>(bytes[i + 1]) << 8);
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(kAlphabet[(n >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

}  // namespace csteval
