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

// Offline cue-word scorer. Deterministic and dependency-free, used for
// hermetic tests and scripted simulations.
//
// Lexicon file layout:
//
//   {
//     "axes": {
//       "agency": {
//         "range": [0, 10],
//         "neutral": 5,
//         "terms": {"must": 2, "sorry": -2},
//         "punctuation": {"!": 3}
//       }
//     }
//   }
//
// score = clamp(neutral + sum(term weight * occurrences)
//                       + sum(punctuation weight * occurrences), range)

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "persona/analyzer.hpp"

namespace persona {

struct AxisLexicon {
  ScoreRange range;
  int neutral = 5;
  std::map<std::string, int, std::less<>> terms;  // case-folded single words
  std::map<char, int> punctuation;
};

class Lexicon {
 public:
  static Lexicon from_json(const nlohmann::json& j);
  static Lexicon load(const std::filesystem::path& path);

  /// Throws ConfigError for unknown axes.
  const AxisLexicon& axis(std::string_view name) const;
  bool has_axis(std::string_view name) const;

 private:
  std::map<std::string, AxisLexicon, std::less<>> axes_;
};

int lexicon_score(std::string_view message, const AxisLexicon& lexicon);

class LexiconBackend final : public AnalyzerBackend {
 public:
  explicit LexiconBackend(Lexicon lexicon);

  BackendInfo info() const override;
  /// Unknown axes and a prompt range that differs from the lexicon's range
  /// come back as BackendError.
  ScoreResult score(const ScorePrompt& prompt,
                    std::string_view message) const override;

 private:
  Lexicon lexicon_;
};

}  // namespace persona
