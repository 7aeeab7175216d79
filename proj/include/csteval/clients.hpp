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

#ifndef CSTEVAL_CLIENTS_HPP_
#define CSTEVAL_CLIENTS_HPP_

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csteval/audio.hpp"

namespace csteval {

class ClientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DecodeParams {
  double temperature = 0.0;
  int max_tokens = 512;
};

struct EndpointConfig {
  std::string base_url;  // scheme://host:port[/path-prefix]
  std::string model_id;
  std::optional<std::string> api_key;
  double timeout_s = 30.0;
  int max_retries = 2;        // additional attempts after the first
  int max_in_flight = 4;
  double retry_backoff_s = 0.1;  // doubles per retry
  DecodeParams decode;

  bool configured() const { return !base_url.empty(); }
  void validate() const;  // throws ClientError on out-of-range fields
};

// Counting semaphore bounding concurrent requests across all clients that
// share it.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(int limit);

  class Ticket {
   public:
    Ticket(Ticket&& other) noexcept : limiter_(other.limiter_) { other.limiter_ = nullptr; }
    Ticket(const Ticket&) = delete;
    Ticket& operator=(const Ticket&) = delete;
    Ticket& operator=(Ticket&&) = delete;
    ~Ticket();

   private:
    friend class ConcurrencyLimiter;
    explicit Ticket(ConcurrencyLimiter* limiter) : limiter_(limiter) {}
    ConcurrencyLimiter* limiter_;
  };

  Ticket acquire();
  int limit() const { return limit_; }

 private:
  void release();

  const int limit_;
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

using LimiterPtr = std::shared_ptr<ConcurrencyLimiter>;

struct ChatResult {
  std::string text;
  std::optional<long long> completion_tokens;  // from the usage field when present
  int retry_count = 0;
};

// Chat-completion client: POST {base}/v1/chat/completions with
// {model, messages, temperature, max_tokens}; reads the first choice.
class ChatClient {
 public:
  ChatClient(EndpointConfig config, LimiterPtr limiter);

  ChatResult complete(const std::string& system_text, const std::string& user_text) const;
  const EndpointConfig& config() const { return config_; }

 private:
  EndpointConfig config_;
  LimiterPtr limiter_;
};

struct AsrResult {
  std::string text;
  int retry_count = 0;
};

// Audio-transcription client: POST {base}/v1/audio/transcriptions with
// {model, audio: base64 WAV, language}; reads {text}.
class AsrClient {
 public:
  AsrClient(EndpointConfig config, LimiterPtr limiter);

  AsrResult transcribe(const AudioClip& clip, const std::string& language = "ar-en") const;
  const EndpointConfig& config() const { return config_; }

 private:
  EndpointConfig config_;
  LimiterPtr limiter_;
};

// Embedding client: POST {base}/v1/embeddings with {model, input: [...]};
// reads data[i].embedding in input order.
class EmbeddingClient {
 public:
  EmbeddingClient(EndpointConfig config, LimiterPtr limiter);

  std::vector<std::vector<double>> embed(const std::vector<std::string>& input) const;
  const EndpointConfig& config() const { return config_; }

 private:
  EndpointConfig config_;
  LimiterPtr limiter_;
};

std::string base64_encode(const std::vector<uint8_t>& bytes);

}  // namespace csteval

#endif  // CSTEVAL_CLIENTS_HPP_
