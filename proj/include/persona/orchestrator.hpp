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

// Per-turn pipeline: analyze the user message, step the tracked (user)
// axes, step the assistant axes from their links, assemble the system prompt
// and generate the reply.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "persona/analyzer.hpp"
#include "persona/generation.hpp"
#include "persona/scenario.hpp"

namespace persona {

using Clock = std::chrono::system_clock;

struct AxisScore {
  std::string axis;
  ScoreResult result;
};

/// Where an axis' outside influence came from this turn.
enum class InfluenceSource { analyzer, link, none };

struct AxisStep {
  std::string model;
  std::string axis;
  std::size_t sequence = 0;  // order of application within the turn
  std::size_t previous_state = 0;
  InfluenceSource source = InfluenceSource::none;
  std::string link_source;  // "model.axis" when source == link
  bool mirrored = false;
  /// Absent when the analyzer failed; the step then ran without the outside
  /// term and with the remaining weights rescaled.
  std::optional<ProbVector> outside;
  TransitionTrace trace;
  std::uint64_t rng_draws = 0;  // generator position after the step
  Clock::time_point applied_at;
};

struct TurnTrace {
  std::size_t turn = 0;  // 1-based
  std::string user_message;
  std::vector<AxisScore> scores;
  std::vector<AxisStep> user_steps;
  std::vector<AxisStep> assistant_steps;
  std::string system_prompt;
  std::string assistant_reply;
  Clock::time_point started_at;
  Clock::time_point finished_at;
};

struct Backends {
  std::shared_ptr<const AnalyzerBackend> analyzer;
  std::shared_ptr<const GenerationBackend> generation;
};

/// Role description followed by each axis' prompt for its current state,
/// separated by one blank line.
std::string assemble_system_prompt(std::string_view role_description,
                                   std::span<const PersonaAxis> axes);

/// A computed turn that has not been applied yet.
struct PendingTurn {
  TurnTrace trace;
  std::vector<PersonaModel> models;  // state after the turn
};

/// One conversation. Not thread-safe: callers serialize access.
class PersonaSession {
 public:
  PersonaSession(std::shared_ptr<const Scenario> scenario, Backends backends,
                 std::uint64_t seed);

  /// Runs one turn. On any failure the personality state is left exactly as
  /// it was before the call. Throws ContractError for blank text and
  /// GenerationError when the reply could not be produced.
  TurnTrace process_user_message(std::string_view text);

  /// The two halves of process_user_message. prepare_turn does not touch the
  /// session; commit applies a turn prepared against the current state.
  PendingTurn prepare_turn(std::string_view text) const;
  const TurnTrace& commit(PendingTurn turn);

  /// Replaces live state with persisted state (models after the last turn,
  /// and the turns themselves).
  void restore(std::vector<PersonaModel> models, std::vector<TurnTrace> turns);

  const Scenario& scenario() const noexcept { return *scenario_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<PersonaModel>& models() const noexcept { return models_; }
  const std::vector<TurnTrace>& turns() const noexcept { return turns_; }

  /// Alternating user/assistant transcript of completed turns.
  std::vector<ChatMessage> history() const;
  std::string current_system_prompt() const;

 private:
  std::shared_ptr<const Scenario> scenario_;
  Backends backends_;
  std::uint64_t seed_;
  std::vector<PersonaModel> models_;
  std::vector<TurnTrace> turns_;
};

/// Applies persisted turns to freshly instantiated models: states, carried
/// probabilities, last transitions and generator positions.
std::vector<PersonaModel> replay_state(const Scenario& scenario, std::uint64_t seed,
                                       std::span<const TurnTrace> turns);

/// One user message per non-blank line.
std::vector<std::string> load_script(const std::filesystem::path& path);

std::vector<TurnTrace> run_scripted_session(std::shared_ptr<const Scenario> scenario,
                                            std::span<const std::string> script,
                                            std::uint64_t seed,
                                            const Backends& backends);

/// One row per (turn, model, axis). Turn 0 holds the initial states.
struct TrajectoryRow {
  std::size_t turn = 0;
  std::string model;
  std::string axis;
  std::size_t state = 0;
  std::vector<double> probs;  // carried probabilities after the turn
};

std::vector<TrajectoryRow> trajectory_rows(const Scenario& scenario,
                                           std::span<const TurnTrace> turns);

/// Header `turn,model,axis,state,prob_0..prob_{k-1}` (k = widest axis).
std::string trajectory_csv(std::span<const TrajectoryRow> rows);

}  // namespace persona
