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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "persona/errors.hpp"
#include "persona/generation.hpp"
#include "support.hpp"

using namespace persona;
using persona::testing::RecordingTransport;

namespace {

GenerationRequest request_with_history(std::size_t turns) {
  GenerationRequest r;
  r.system_prompt = "ROLE\n\nSTATE A\n\nSTATE C";
  for (std::size_t i = 0; i < turns; ++i) {
    r.conversation.push_back({"user", "u" + std::to_string(i)});
    r.conversation.push_back({"assistant", "a" + std::to_string(i)});
  }
  r.conversation.push_back({"user", "current"});
  r.assistant_states = {{"agency", 4}, {"communion", 0}};
  return r;
}

}  // namespace

TEST_CASE("echo reply names the assistant states") {
  EchoGenerationBackend echo;
  const auto reply = generate_reply(echo, request_with_history(0));
  CHECK(reply.find("agency:4 communion:0") != std::string::npos);
}

TEST_CASE("remote request: system prompt first, then the whole transcript") {
  for (std::size_t n = 0; n <= 12; ++n) {
    auto transport = std::make_shared<RecordingTransport>(
        std::vector<HttpResponse>{RecordingTransport::completion("Guten Tag.")});
    RemoteGenerationBackend backend(
        std::make_shared<ChatClient>(transport, ChatOptions{"gen-model", 1, 0.7}));
    const auto request = request_with_history(n);
    CHECK(generate_reply(backend, request) == "Guten Tag.");

    const auto body = transport->calls().at(0).body;
    const auto& messages = body.at("messages");
    // system + n (user, assistant) pairs + the current user message
    REQUIRE(messages.size() == 2 * n + 2);
    CHECK(messages[0].at("role") == "system");
    CHECK(messages[0].at("content") == request.system_prompt);
    for (std::size_t i = 1; i < messages.size(); ++i) {
      CHECK(messages[i].at("role") == (i % 2 == 1 ? "user" : "assistant"));
      CHECK(messages[i].at("content") == request.conversation[i - 1].content);
    }
    CHECK(body.at("model") == "gen-model");
    CHECK(body.at("temperature") == 0.7);
  }
}

TEST_CASE("generation_messages matches what the remote backend sends") {
  const auto request = request_with_history(3);
  const auto messages = generation_messages(request);
  REQUIRE(messages.size() == 8);
  CHECK(messages.front() == ChatMessage{"system", request.system_prompt});
  CHECK(messages.back() == ChatMessage{"user", "current"});
}

TEST_CASE("transport failure becomes a generation error") {
  auto transport = std::make_shared<RecordingTransport>(std::vector<HttpResponse>{{-1, ""}});
  RemoteGenerationBackend backend(
      std::make_shared<ChatClient>(transport, ChatOptions{"m", 1, std::nullopt}));
  CHECK_THROWS_AS(generate_reply(backend, request_with_history(1)), GenerationError);
  CHECK(transport->calls().size() == 2);
  CHECK_FALSE(transport->calls()[0].body.contains("temperature"));
}

TEST_CASE("conversation must alternate and end on the user") {
  EchoGenerationBackend echo;
  auto r = request_with_history(1);
  r.conversation.pop_back();
  CHECK_THROWS_AS(generate_reply(echo, r), ContractError);

  r = request_with_history(1);
  r.conversation[1].role = "user";
  CHECK_THROWS_AS(generate_reply(echo, r), ContractError);

  r = request_with_history(0);
  r.conversation.clear();
  CHECK_THROWS_AS(generate_reply(echo, r), ContractError);
}

TEST_CASE("replay replies by turn") {
  ReplayGenerationBackend replay({"first", "second"});
  CHECK(generate_reply(replay, request_with_history(0)) == "first");
  CHECK(generate_reply(replay, request_with_history(1)) == "second");
  CHECK_THROWS_AS(generate_reply(replay, request_with_history(2)), GenerationError);
}

TEST_CASE("chat request body") {
  ChatClient client(std::make_shared<RecordingTransport>(std::vector<HttpResponse>{}),
                    ChatOptions{"m", 0, std::nullopt});
  const auto body = client.request_body({{"system", "s"}, {"user", "u"}});
  CHECK(body.dump() ==
        R"({"messages":[{"content":"s","role":"system"},{"content":"u","role":"user"}],"model":"m"})");
}

TEST_CASE("endpoint settings from the environment") {
  ::setenv("PERSONA_LLM_BASE_URL", "http://example.invalid:9000/v1", 1);
  ::setenv("PERSONA_LLM_API_KEY", "k", 1);
  ::setenv("PERSONA_LLM_MODEL", "m1", 1);
  auto s = EndpointSettings::from_env();
  CHECK(s.base_url == "http://example.invalid:9000/v1");
  CHECK(s.api_key == "k");
  CHECK(s.model == "m1");
  ::unsetenv("PERSONA_LLM_BASE_URL");
  ::unsetenv("PERSONA_LLM_API_KEY");
  ::unsetenv("PERSONA_LLM_MODEL");
  s = EndpointSettings::from_env();
  CHECK(s.base_url == "http://localhost:8000/v1");
  CHECK(s.model.empty());
}
