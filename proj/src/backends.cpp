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

#include "persona/backends.hpp"

#include "persona/errors.hpp"
#include "persona/lexicon.hpp"

namespace persona {

namespace {

std::shared_ptr<const ChatClient> remote_client(
    EndpointSettings settings, const std::optional<std::string>& base_url,
    const std::optional<std::string>& model, std::optional<double> temperature) {
  if (base_url) settings.base_url = *base_url;
  if (model) settings.model = *model;
  if (settings.model.empty()) {
    throw ConfigError("remote backend needs a model (PERSONA_LLM_MODEL)");
  }
  ChatOptions options{settings.model, 1, temperature};
  return std::make_shared<ChatClient>(std::make_shared<HttpTransport>(settings),
                                      std::move(options));
}

Backends build(const Scenario& scenario, const EndpointSettings* defaults) {
  Backends b;
  const auto& an = scenario.analyzer;
  if (an.backend == "lexicon") {
    b.analyzer = std::make_shared<LexiconBackend>(Lexicon::load(an.lexicon));
  } else if (an.backend == "replay") {
    b.analyzer =
        std::make_shared<ReplayAnalyzerBackend>(ReplayAnalyzerBackend::load(an.replay));
  } else if (an.backend == "remote" && defaults != nullptr) {
    b.analyzer = std::make_shared<RemoteAnalyzerBackend>(
        remote_client(*defaults, an.base_url, an.model, 0.0), an.supports_prefix);
  } else {
    throw ConfigError("analyzer backend '" + an.backend + "' is not available here");
  }

  const auto& gen = scenario.generation;
  if (gen.backend == "echo") {
    b.generation = std::make_shared<EchoGenerationBackend>();
  } else if (gen.backend == "replay") {
    b.generation = std::make_shared<ReplayGenerationBackend>(gen.replies);
  } else if (gen.backend == "remote" && defaults != nullptr) {
    b.generation = std::make_shared<RemoteGenerationBackend>(
        remote_client(*defaults, gen.base_url, gen.model, gen.temperature));
  } else {
    throw ConfigError("generation backend '" + gen.backend + "' is not available here");
  }
  return b;
}

}  // namespace

Backends make_backends(const Scenario& scenario, const EndpointSettings& defaults) {
  return build(scenario, &defaults);
}

Backends hermetic_backends(const Scenario& scenario) { return build(scenario, nullptr); }

}  // namespace persona
