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

#include "persona/generation.hpp"

#include <algorithm>

#include "persona/errors.hpp"

namespace persona {

std::vector<ChatMessage> generation_messages(const GenerationRequest& request) {
  std::vector<ChatMessage> out;
  out.reserve(request.conversation.size() + 1);
  out.push_back({"system", request.system_prompt});
  out.insert(out.end(), request.conversation.begin(), request.conversation.end());
  return out;
}

std::string generate_reply(const GenerationBackend& backend,
                           const GenerationRequest& request) {
  const auto& conv = request.conversation;
  if (conv.empty() || conv.size() % 2 == 0) {
    throw ContractError("conversation must end with the current user message");
  }
  for (std::size_t i = 0; i < conv.size(); ++i) {
    const char* expected = i % 2 == 0 ? "user" : "assistant";
    if (conv[i].role != expected) {
      throw ContractError("conversation must alternate user and assistant");
    }
  }
  return backend.generate(request);
}

std::string EchoGenerationBackend::generate(const GenerationRequest& request) const {
  std::string reply = "[echo]";
  for (const auto& s : request.assistant_states) {
    reply += " " + s.axis + ":" + std::to_string(s.state);
  }
  return reply;
}

ReplayGenerationBackend::ReplayGenerationBackend(std::vector<std::string> replies)
    : replies_(std::move(replies)) {}

std::string ReplayGenerationBackend::generate(const GenerationRequest& request) const {
  const auto user_turns = static_cast<std::size_t>(
      std::count_if(request.conversation.begin(), request.conversation.end(),
                    [](const ChatMessage& m) { return m.role == "user"; }));
  if (user_turns == 0 || user_turns > replies_.size()) {
    throw GenerationError("no recorded reply for turn " + std::to_string(user_turns));
  }
  return replies_[user_turns - 1];
}

RemoteGenerationBackend::RemoteGenerationBackend(std::shared_ptr<const ChatClient> client)
    : client_(std::move(client)) {}

std::string RemoteGenerationBackend::generate(const GenerationRequest& request) const {
  try {
    return client_->complete(generation_messages(request));
  } catch (const ChatError& e) {
    throw GenerationError(e.what());
  }
}

}  // namespace persona
