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

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "persona/chat_client.hpp"

namespace persona {

struct AxisStateLabel {
  std::string axis;
  std::size_t state = 0;
};

struct GenerationRequest {
  std::string system_prompt;
  /// Alternating user/assistant messages ending with the current user message.
  std::vector<ChatMessage> conversation;
  /// Assistant axis states the system prompt was assembled from.
  std::vector<AxisStateLabel> assistant_states;
};

/// Produces the assistant reply. Throws GenerationError on failure.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string name() const = 0;
  virtual std::string generate(const GenerationRequest& request) const = 0;
};

/// System message followed by the conversation.
std::vector<ChatMessage> generation_messages(const GenerationRequest& request);

/// Checks the conversation alternates user/assistant and ends on a user
/// message (ContractError otherwise), then calls the backend.
std::string generate_reply(const GenerationBackend& backend,
                           const GenerationRequest& request);

/// Reply is "[echo] <axis>:<state> ..." for the assistant states.
class EchoGenerationBackend final : public GenerationBackend {
 public:
  std::string name() const override { return "echo"; }
  std::string generate(const GenerationRequest& request) const override;
};

/// Returns replies[i] for the i-th user message of the conversation.
class ReplayGenerationBackend final : public GenerationBackend {
 public:
  explicit ReplayGenerationBackend(std::vector<std::string> replies);
  std::string name() const override { return "replay"; }
  std::string generate(const GenerationRequest& request) const override;

 private:
  std::vector<std::string> replies_;
};

class RemoteGenerationBackend final : public GenerationBackend {
 public:
  explicit RemoteGenerationBackend(std::shared_ptr<const ChatClient> client);
  std::string name() const override { return "remote:" + client_->model(); }
  std::string generate(const GenerationRequest& request) const override;

 private:
  std::shared_ptr<const ChatClient> client_;
};

}  // namespace persona
