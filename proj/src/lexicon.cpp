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

#include "persona/lexicon.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "persona/errors.hpp"
#include "persona/text.hpp"

namespace persona {

Lexicon Lexicon::from_json(const nlohmann::json& j) {
  Lexicon lexicon;
  try {
    for (const auto& [name, spec] : j.at("axes").items()) {
      AxisLexicon axis;
      if (spec.contains("range")) {
        axis.range = {spec["range"].at(0).get<int>(), spec["range"].at(1).get<int>()};
      }
      if (axis.range.min >= axis.range.max) {
        throw ConfigError("lexicon axis " + name + ": range must satisfy min < max");
      }
      axis.neutral = spec.value("neutral", (axis.range.min + axis.range.max) / 2);
      const auto terms = spec.value("terms", nlohmann::json::object());
      for (const auto& [term, weight] : terms.items()) {
        const auto folded = words(term);
        if (folded.size() != 1) {
          throw ConfigError("lexicon axis " + name + ": term '" + term +
                            "' must be a single word");
        }
        axis.terms[folded.front()] = weight.get<int>();
      }
      const auto punctuation = spec.value("punctuation", nlohmann::json::object());
      for (const auto& [mark, weight] : punctuation.items()) {
        if (mark.size() != 1) {
          throw ConfigError("lexicon axis " + name +
                            ": punctuation keys must be single characters");
        }
        axis.punctuation[mark.front()] = weight.get<int>();
      }
      lexicon.axes_.emplace(name, std::move(axis));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed lexicon: ") + e.what());
  }
  return lexicon;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

const AxisLexicon& Lexicon::axis(std::string_view name) const {
  const auto it = axes_.find(name);
  if (it == axes_.end()) {
    throw ConfigError("lexicon has no axis '" + std::string(name) + "'");
  }
  return it->second;
}

bool Lexicon::has_axis(std::string_view name) const {
  return axes_.find(name) != axes_.end();
}

int lexicon_score(std::string_view message, const AxisLexicon& lexicon) {
  long long total = lexicon.neutral;
  for (const auto& word : words(message)) {
    if (const auto it = lexicon.terms.find(word); it != lexicon.terms.end()) {
      total += it->second;
    }
  }
  for (char c : message) {
    if (const auto it = lexicon.punctuation.find(c); it != lexicon.punctuation.end()) {
      total += it->second;
    }
  }
  if (total < lexicon.range.min) return lexicon.range.min;
  if (total > lexicon.range.max) return lexicon.range.max;
  return static_cast<int>(total);
}

LexiconBackend::LexiconBackend(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

BackendInfo LexiconBackend::info() const { return {"lexicon", false}; }

ScoreResult LexiconBackend::score(const ScorePrompt& prompt,
                                  std::string_view message) const {
  if (!lexicon_.has_axis(prompt.axis)) {
    return {BackendError{"lexicon has no axis '" + prompt.axis + "'"}};
  }
  const auto& axis = lexicon_.axis(prompt.axis);
  if (axis.range != prompt.range) {
    return {BackendError{"lexicon range for axis " + prompt.axis +
                         " differs from the prompt's score range"}};
  }
  return {ScoreOk{lexicon_score(message, axis), false}};
}

}  // namespace persona
