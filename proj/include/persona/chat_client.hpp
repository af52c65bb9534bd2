// Copyright 2026 The Persona Engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal client for OpenAI-compatible chat-completions endpoints.

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace persona {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);

/// Connection refused, DNS failure, timeout.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request could not be completed: transport failure after retries,
/// non-2xx status, or a body without a completion.
class ChatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Raw JSON POST. Swapped for a recording mock in tests.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  /// `path` is relative to the configured base URL, e.g. "/chat/completions".
  /// Throws TransportError when no HTTP response was obtained.
  virtual HttpResponse post_json(const std::string& path,
                                 const std::string& body) const = 0;
};

struct EndpointSettings {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string api_key;
  std::string model;
  std::chrono::milliseconds timeout{30000};

  /// PERSONA_LLM_BASE_URL, PERSONA_LLM_API_KEY, PERSONA_LLM_MODEL.
  static EndpointSettings from_env();
};

/// cpp-httplib transport. A fresh connection per request keeps it safe to
/// share between threads.
class HttpTransport final : public ChatTransport {
 public:
  explicit HttpTransport(EndpointSettings settings);

  HttpResponse post_json(const std::string& path,
                         const std::string& body) const override;

 private:
  EndpointSettings settings_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // e.g. /v1
};

struct ChatOptions {
  std::string model;
  int max_retries = 1;
  std::optional<double> temperature;
};

class ChatClient {
 public:
  ChatClient(std::shared_ptr<const ChatTransport> transport, ChatOptions options);

  /// POSTs {model, messages} to /chat/completions and returns
  /// choices[0].message.content. Transport failures, 429 and 5xx are retried
  /// up to max_retries times. Throws ChatError.
  std::string complete(const std::vector<ChatMessage>& messages) const;

  nlohmann::json request_body(const std::vector<ChatMessage>& messages) const;

  const std::string& model() const noexcept { return options_.model; }

 private:
  std::shared_ptr<const ChatTransport> transport_;
  ChatOptions options_;
};

}  // namespace persona
