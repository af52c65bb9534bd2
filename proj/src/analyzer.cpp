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

#include "persona/analyzer.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "persona/chat_client.hpp"
#include "persona/errors.hpp"
#include "persona/text.hpp"

namespace persona {

namespace {

constexpr std::string_view kShortAgency =
    "Give a score between 0 and 10 where 0 is very submissive and 10 is very "
    "dominant. The score should be a single number.";

constexpr std::string_view kLongAgency =
    "You are a helpful assistant that analyzes the dominance of a sentence "
    "according to the interpersonal circumplex model. You will do this by "
    "giving a score between 0 and 10 where 0 is very submissive and 10 is "
    "very dominant. The score should be a single number. For example, 'Nein, "
    "Sie machen das so!' should be scored as 10.";

constexpr std::string_view kShortCommunion =
    "Give a score between 0 and 10 where 0 is very hostile and 10 is very "
    "friendly. The score should be a single number.";

constexpr std::string_view kLongCommunion =
    "You are a helpful assistant that analyzes the friendliness of a sentence "
    "according to the interpersonal circumplex model. You will do this by "
    "giving a score between 0 and 10 where 0 is very hostile and 10 is very "
    "friendly. The score should be a single number. For example, 'Ich hasse "
    "dich!' should be scored as 0.";

constexpr std::string_view kDefaultAnswerPrefix = "Score: ";

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view to_string(PromptVariant variant) {
  return variant == PromptVariant::short_prompt ? "short" : "long";
}

PromptVariant parse_prompt_variant(std::string_view text) {
  if (text == "short") return PromptVariant::short_prompt;
  if (text == "long") return PromptVariant::long_prompt;
  throw ConfigError("unknown prompt variant '" + std::string(text) + "'");
}

void ScorePrompt::validate() const {
  if (axis.empty()) throw ConfigError("score prompt without axis name");
  if (trim(text).empty()) throw ConfigError("empty score prompt for axis " + axis);
  if (range.min >= range.max) {
    throw ConfigError("score range must satisfy min < max for axis " + axis);
  }
}

ScorePrompt default_prompt(std::string_view axis, PromptVariant variant) {
  const bool is_short = variant == PromptVariant::short_prompt;
  std::string_view text;
  if (axis == "agency") {
    text = is_short ? kShortAgency : kLongAgency;
  } else if (axis == "communion") {
    text = is_short ? kShortCommunion : kLongCommunion;
  } else {
    throw ConfigError("no built-in scoring prompt for axis '" +
                      std::string(axis) + "'");
  }
  return {std::string(axis), std::string(text), variant, ScoreRange{0, 10},
          std::string(kDefaultAnswerPrefix)};
}

std::vector<ScorePrompt> default_prompts() {
  std::vector<ScorePrompt> out;
  for (auto axis : {"agency", "communion"}) {
    for (auto v : {PromptVariant::short_prompt, PromptVariant::long_prompt}) {
      out.push_back(default_prompt(axis, v));
    }
  }
  return out;
}

ScoreResult parse_score(std::string_view raw, ScoreRange range) {
  std::size_t i = 0;
  while (i < raw.size() && !is_digit(raw[i])) ++i;
  if (i == raw.size()) return {ParseError{std::string(raw)}};

  std::size_t begin = i;
  if (begin > 0 && raw[begin - 1] == '-' &&
      (begin == 1 || !is_alnum(raw[begin - 2]))) {
    --begin;
  }
  while (i < raw.size() && is_digit(raw[i])) ++i;
  if (i + 1 < raw.size() && raw[i] == '.' && is_digit(raw[i + 1])) {
    ++i;
    while (i < raw.size() && is_digit(raw[i])) ++i;
  }

  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(raw.data() + begin, raw.data() + i, value);
  if (ec == std::errc::result_out_of_range) {
    value = raw[begin] == '-' ? -HUGE_VAL : HUGE_VAL;
  } else if (ec != std::errc{}) {
    return {ParseError{std::string(raw)}};
  }

  const double rounded = std::round(value);  // half away from zero
  if (rounded < range.min) return {ScoreOk{range.min, true}};
  if (rounded > range.max) return {ScoreOk{range.max, true}};
  return {ScoreOk{static_cast<int>(rounded), false}};
}

std::size_t score_to_state(int score, ScoreRange range, std::size_t k) {
  const long long offset = range.clamp(score) - range.min;
  const auto bin = static_cast<std::size_t>(offset * static_cast<long long>(k) /
                                            range.points());
  return bin < k ? bin : k - 1;
}

ProbVector score_to_distribution(int score, ScoreRange range, std::size_t k) {
  return ProbVector::one_hot(k, score_to_state(score, range, k));
}

ScoreResult score_message(const AnalyzerBackend& backend,
                          const ScorePrompt& prompt, std::string_view message) {
  if (trim(message).empty()) {
    throw ContractError("cannot score an empty message");
  }
  return backend.score(prompt, message);
}

RemoteAnalyzerBackend::RemoteAnalyzerBackend(
    std::shared_ptr<const ChatClient> client, bool supports_prefix)
    : client_(std::move(client)), supports_prefix_(supports_prefix) {}

BackendInfo RemoteAnalyzerBackend::info() const {
  return {"remote:" + client_->model(), supports_prefix_};
}

ScoreResult RemoteAnalyzerBackend::score(const ScorePrompt& prompt,
                                         std::string_view message) const {
  std::vector<ChatMessage> messages{{"system", prompt.text},
                                    {"user", std::string(message)}};
  if (supports_prefix_ && prompt.answer_prefix) {
    messages.push_back({"assistant", *prompt.answer_prefix});
  }
  try {
    return parse_score(client_->complete(messages), prompt.range);
  } catch (const ChatError& e) {
    return {BackendError{e.what()}};
  }
}

ReplayAnalyzerBackend ReplayAnalyzerBackend::load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open replay file " + path.string());
  ReplayAnalyzerBackend backend;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
    if (!row.contains("text") || !row["text"].is_string()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": missing \"text\"");
    }
    const std::string text = row["text"];
    for (const auto& [key, value] : row.items()) {
      if (key == "text" || value.is_null()) continue;
      backend.add(key, text, value.is_string() ? value.get<std::string>()
                                               : value.dump());
    }
  }
  return backend;
}

void ReplayAnalyzerBackend::add(std::string axis, std::string text,
                                std::string raw_completion) {
  completions_[{std::move(axis), std::move(text)}] = std::move(raw_completion);
}

BackendInfo ReplayAnalyzerBackend::info() const { return {"replay", false}; }

ScoreResult ReplayAnalyzerBackend::score(const ScorePrompt& prompt,
                                         std::string_view message) const {
  const auto it = completions_.find(
      std::pair<std::string, std::string>{prompt.axis, std::string(message)});
  if (it == completions_.end()) {
    return {BackendError{"no recorded completion for axis " + prompt.axis}};
  }
  return parse_score(it->second, prompt.range);
}

}  // namespace persona
