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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "persona/axis_engine.hpp"

namespace persona {

class ChatClient;

/// Inclusive integer score scale. The canonical scale is [0, 10].
struct ScoreRange {
  int min = 0;
  int max = 10;

  int points() const noexcept { return max - min + 1; }
  int clamp(int score) const noexcept {
    return score < min ? min : (score > max ? max : score);
  }
  bool operator==(const ScoreRange&) const = default;
};

enum class PromptVariant { short_prompt, long_prompt };

std::string_view to_string(PromptVariant variant);
PromptVariant parse_prompt_variant(std::string_view text);

struct ScorePrompt {
  std::string axis;
  std::string text;
  PromptVariant variant = PromptVariant::long_prompt;
  ScoreRange range;
  std::optional<std::string> answer_prefix;

  void validate() const;
};

/// Scoring prompts used for the IPC axes ("agency", "communion").
/// Throws ConfigError for any other axis name.
ScorePrompt default_prompt(std::string_view axis, PromptVariant variant);
std::vector<ScorePrompt> default_prompts();

struct ScoreOk {
  int score = 0;
  bool clamped = false;
  bool operator==(const ScoreOk&) const = default;
};
struct ParseError {
  std::string raw_text;
  bool operator==(const ParseError&) const = default;
};
struct BackendError {
  std::string detail;
  bool operator==(const BackendError&) const = default;
};

/// Exactly one of ok / unparseable / backend failure.
struct ScoreResult {
  std::variant<ScoreOk, ParseError, BackendError> outcome;

  bool ok() const noexcept { return std::holds_alternative<ScoreOk>(outcome); }
  bool parse_error() const noexcept {
    return std::holds_alternative<ParseError>(outcome);
  }
  bool backend_error() const noexcept {
    return std::holds_alternative<BackendError>(outcome);
  }
  /// Precondition: ok().
  int score() const { return std::get<ScoreOk>(outcome).score; }

  bool operator==(const ScoreResult&) const = default;
};

/// Takes the first maximal decimal token ("8.6" in "Score: 8.6/10"), rounds
/// half away from zero and clamps into range. No token yields ParseError
/// carrying the raw text.
ScoreResult parse_score(std::string_view raw, ScoreRange range);

/// Equal-width binning of the integer lattice onto k states.
std::size_t score_to_state(int score, ScoreRange range, std::size_t k);

ProbVector score_to_distribution(int score, ScoreRange range, std::size_t k);

struct BackendInfo {
  std::string name;
  bool supports_prefix = false;
};

/// Maps one message to a score for one axis. Implementations must be safe to
/// call concurrently and must always return (transport timeouts included).
class AnalyzerBackend {
 public:
  virtual ~AnalyzerBackend() = default;
  virtual BackendInfo info() const = 0;
  virtual ScoreResult score(const ScorePrompt& prompt,
                            std::string_view message) const = 0;
};

/// Rejects blank messages with ContractError before reaching the backend.
ScoreResult score_message(const AnalyzerBackend& backend,
                          const ScorePrompt& prompt, std::string_view message);

/// Prompted chat model: {system: prompt, user: message[, assistant: prefix]}.
class RemoteAnalyzerBackend final : public AnalyzerBackend {
 public:
  RemoteAnalyzerBackend(std::shared_ptr<const ChatClient> client,
                        bool supports_prefix);

  BackendInfo info() const override;
  ScoreResult score(const ScorePrompt& prompt,
                    std::string_view message) const override;

 private:
  std::shared_ptr<const ChatClient> client_;
  bool supports_prefix_;
};

/// Serves recorded completions keyed by (axis, message text). Missing entries
/// are reported as backend errors.
class ReplayAnalyzerBackend final : public AnalyzerBackend {
 public:
  ReplayAnalyzerBackend() = default;

  /// JSON lines: {"text": ..., "<axis>": "raw completion" | number | null}.
  static ReplayAnalyzerBackend load(const std::filesystem::path& path);

  void add(std::string axis, std::string text, std::string raw_completion);

  BackendInfo info() const override;
  ScoreResult score(const ScorePrompt& prompt,
                    std::string_view message) const override;

 private:
  std::map<std::pair<std::string, std::string>, std::string, std::less<>>
      completions_;
};

}  // namespace persona
