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

// JSON forms of engine values, shared by persistence and the HTTP API.

#pragma once

#include <span>

#include <nlohmann/json.hpp>

#include "persona/orchestrator.hpp"

namespace persona {

void to_json(nlohmann::json& j, const ProbVector& p);
ProbVector prob_vector_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const ScoreResult& r);
ScoreResult score_result_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const TransitionTrace& t);
TransitionTrace transition_trace_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const AxisStep& s);
AxisStep axis_step_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const TurnTrace& t);
TurnTrace turn_trace_from_json(const nlohmann::json& j);

/// Live state of every axis: current state, carried probabilities and the
/// most recent transition probabilities (null before the first turn).
nlohmann::json state_snapshot(std::span<const PersonaModel> models);

/// Milliseconds since the Unix epoch.
std::int64_t to_millis(Clock::time_point t);
Clock::time_point from_millis(std::int64_t ms);

}  // namespace persona
