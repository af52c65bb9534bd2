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

#include "persona/chat_client.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace persona {

void to_json(nlohmann::json& j, const ChatMessage& m) {
  j = nlohmann::json{{"role", m.role}, {"content", m.content}};
}

void from_json(const nlohmann::json& j, ChatMessage& m) {
  j.at("role").get_to(m.role);
  j.at("content").get_to(m.content);
}

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return (v != nullptr && *v != '\0') ? std::string(v) : std::move(fallback);
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

EndpointSettings EndpointSettings::from_env() {
  EndpointSettings s;
  s.base_url = env_or("PERSONA_LLM_BASE_URL", "http://localhost:8000/v1");
  s.api_key = env_or("PERSONA_LLM_API_KEY", "");
  s.model = env_or("PERSONA_LLM_MODEL", "");
  return s;
}

HttpTransport::HttpTransport(EndpointSettings settings)
    : settings_(std::move(settings)) {
  std::string_view url = settings_.base_url;
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  origin_ = std::string(url.substr(0, path_start));
  path_prefix_ =
      path_start == std::string_view::npos ? "" : std::string(url.substr(path_start));
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

HttpResponse HttpTransport::post_json(const std::string& path,
                                      const std::string& body) const {
  httplib::Client client(origin_);
  const auto seconds =
      std::chrono::duration_cast<std::chrono::seconds>(settings_.timeout).count();
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(settings_.timeout)
          .count() %
      1000000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Headers headers;
  if (!settings_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + settings_.api_key);
  }
  auto result = client.Post(path_prefix_ + path, headers, body, "application/json");
  if (!result) {
    throw TransportError("POST " + origin_ + path_prefix_ + path + " failed: " +
                         httplib::to_string(result.error()));
  }
  return {result->status, result->body};
}

ChatClient::ChatClient(std::shared_ptr<const ChatTransport> transport,
                       ChatOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {}

nlohmann::json ChatClient::request_body(
    const std::vector<ChatMessage>& messages) const {
  nlohmann::json body{{"model", options_.model}, {"messages", messages}};
  if (options_.temperature) body["temperature"] = *options_.temperature;
  return body;
}

std::string ChatClient::complete(const std::vector<ChatMessage>& messages) const {
  const std::string body = request_body(messages).dump();
  std::string last_failure;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    HttpResponse response;
    try {
      response = transport_->post_json("/chat/completions", body);
    } catch (const TransportError& e) {
      last_failure = e.what();
      continue;
    }
    if (retryable_status(response.status)) {
      last_failure = "HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status < 200 || response.status >= 300) {
      throw ChatError("HTTP " + std::to_string(response.status) + ": " +
                      response.body.substr(0, 200));
    }
    const auto parsed = nlohmann::json::parse(response.body, nullptr, false);
    if (parsed.is_discarded()) throw ChatError("completion body is not JSON");
    try {
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw ChatError("completion body has no choices[0].message.content");
    }
  }
  throw ChatError("giving up after " + std::to_string(options_.max_retries + 1) +
                  " attempts: " + last_failure);
}

}  // namespace persona
