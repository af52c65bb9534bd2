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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "persona/analyzer.hpp"
#include "persona/axis_engine.hpp"

namespace persona {

/// One axis of one personality model: static parameters, live state, and the
/// prompt fragment emitted for each state.
struct PersonaAxis {
  std::string name;
  AxisConfig config;
  AxisState state;
  std::vector<std::string> state_prompts;  // k entries; empty on tracked models
  AxisRng rng;
  std::optional<ProbVector> last_transition;
};

/// `tracked` models follow the user and are driven by the analyzer;
/// the `assistant` model steers the reply generator.
enum class ModelRole { tracked, assistant };

struct PersonaModel {
  std::string name;
  ModelRole role = ModelRole::tracked;
  std::vector<PersonaAxis> axes;

  const PersonaAxis* find_axis(std::string_view axis) const;
  PersonaAxis* find_axis(std::string_view axis);
};

enum class Correlation { positive, negative };

struct AxisRef {
  std::string model;
  std::string axis;
  bool operator==(const AxisRef&) const = default;
};

/// The target axis takes the source axis' new carried probabilities as its
/// outside influence, reversed for negative correlation.
struct AxisLink {
  AxisRef source;
  AxisRef target;
  Correlation correlation = Correlation::positive;
};

struct AnalyzerSettings {
  std::string backend = "lexicon";  // lexicon | remote | replay
  PromptVariant variant = PromptVariant::long_prompt;
  std::vector<ScorePrompt> prompts;
  std::filesystem::path lexicon;  // resolved against the scenario directory
  std::filesystem::path replay;
  std::optional<std::string> base_url;
  std::optional<std::string> model;
  bool supports_prefix = false;
};

struct GenerationSettings {
  std::string backend = "echo";  // echo | remote | replay
  std::optional<std::string> base_url;
  std::optional<std::string> model;
  std::optional<double> temperature;
  std::vector<std::string> replies;
};

/// Immutable once loaded.
struct Scenario {
  std::string id;
  std::string title;
  std::string role_description;
  std::vector<PersonaModel> models;  // initial states, unseeded generators
  std::vector<AxisLink> links;
  AnalyzerSettings analyzer;
  GenerationSettings generation;

  /// Relative file references are resolved against `base_dir`.
  static Scenario from_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir = {});
  static Scenario load(const std::filesystem::path& path);

  /// Throws ConfigError when an invariant is broken: unknown link endpoints,
  /// mismatched state counts, missing state prompts, duplicate names.
  void validate() const;

  /// Prompt for `axis` in the configured variant; falls back to the built-in
  /// prompts for agency and communion.
  ScorePrompt prompt_for(std::string_view axis) const;

  const PersonaModel& assistant() const;
  const PersonaModel* find_model(std::string_view name) const;
  /// Link whose target is (model, axis), if any.
  const AxisLink* link_into(std::string_view model, std::string_view axis) const;
};

/// Models ready for a session: generators seeded per axis, either from the
/// axis' own rng_seed or derived from the session seed.
std::vector<PersonaModel> instantiate_models(const Scenario& scenario,
                                             std::uint64_t session_seed);

std::uint64_t derive_axis_seed(std::uint64_t session_seed, std::size_t model_index,
                               std::size_t axis_index);

}  // namespace persona
