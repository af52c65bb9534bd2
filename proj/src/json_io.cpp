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

#include "persona/json_io.hpp"

#include "persona/errors.hpp"

namespace persona {

using nlohmann::json;

std::int64_t to_millis(Clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch())
      .count();
}

Clock::time_point from_millis(std::int64_t ms) {
  return Clock::time_point(std::chrono::duration_cast<Clock::duration>(
      std::chrono::milliseconds(ms)));
}

void to_json(json& j, const ProbVector& p) {
  j = json(std::vector<double>(p.begin(), p.end()));
}

ProbVector prob_vector_from_json(const json& j) {
  return ProbVector(j.get<std::vector<double>>());
}

void to_json(json& j, const ScoreResult& r) {
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ScoreOk>) {
          j = json{{"status", "ok"}, {"score", v.score}, {"clamped", v.clamped}};
        } else if constexpr (std::is_same_v<T, ParseError>) {
          j = json{{"status", "parse_error"}, {"raw_text", v.raw_text}};
        } else {
          j = json{{"status", "backend_error"}, {"detail", v.detail}};
        }
      },
      r.outcome);
}

ScoreResult score_result_from_json(const json& j) {
  const auto status = j.at("status").get<std::string>();
  if (status == "ok") {
    return {ScoreOk{j.at("score").get<int>(), j.value("clamped", false)}};
  }
  if (status == "parse_error") return {ParseError{j.at("raw_text").get<std::string>()}};
  if (status == "backend_error") return {BackendError{j.at("detail").get<std::string>()}};
  throw ConfigError("unknown score status '" + status + "'");
}

void to_json(json& j, const TransitionTrace& t) {
  j = json{{"transition_probs", t.transition_probs},
           {"new_state", t.new_state},
           {"new_carried", t.new_carried},
           {"components",
            {{"default_state", t.components.default_state},
             {"current_state", t.components.current_state},
             {"carried", t.components.carried},
             {"outside", t.components.outside}}}};
}

TransitionTrace transition_trace_from_json(const json& j) {
  const auto& c = j.at("components");
  return {prob_vector_from_json(j.at("transition_probs")),
          j.at("new_state").get<std::size_t>(),
          prob_vector_from_json(j.at("new_carried")),
          {c.at("default_state").get<std::vector<double>>(),
           c.at("current_state").get<std::vector<double>>(),
           c.at("carried").get<std::vector<double>>(),
           c.at("outside").get<std::vector<double>>()}};
}

namespace {

const char* source_name(InfluenceSource s) {
  switch (s) {
    case InfluenceSource::analyzer:
      return "analyzer";
    case InfluenceSource::link:
      return "link";
    case InfluenceSource::none:
      break;
  }
  return "none";
}

InfluenceSource parse_source(const std::string& s) {
  if (s == "analyzer") return InfluenceSource::analyzer;
  if (s == "link") return InfluenceSource::link;
  return InfluenceSource::none;
}

}  // namespace

void to_json(json& j, const AxisStep& s) {
  j = json{{"model", s.model},
           {"axis", s.axis},
           {"sequence", s.sequence},
           {"previous_state", s.previous_state},
           {"source", source_name(s.source)},
           {"link_source", s.link_source},
           {"mirrored", s.mirrored},
           {"outside", s.outside ? json(*s.outside) : json(nullptr)},
           {"trace", s.trace},
           {"rng_draws", s.rng_draws},
           {"applied_at_ms", to_millis(s.applied_at)}};
}

AxisStep axis_step_from_json(const json& j) {
  std::optional<ProbVector> outside;
  if (!j.at("outside").is_null()) outside = prob_vector_from_json(j["outside"]);
  return {.model = j.at("model").get<std::string>(),
          .axis = j.at("axis").get<std::string>(),
          .sequence = j.at("sequence").get<std::size_t>(),
          .previous_state = j.at("previous_state").get<std::size_t>(),
          .source = parse_source(j.at("source").get<std::string>()),
          .link_source = j.value("link_source", ""),
          .mirrored = j.value("mirrored", false),
          .outside = std::move(outside),
          .trace = transition_trace_from_json(j.at("trace")),
          .rng_draws = j.at("rng_draws").get<std::uint64_t>(),
          .applied_at = from_millis(j.at("applied_at_ms").get<std::int64_t>())};
}

void to_json(json& j, const TurnTrace& t) {
  json scores = json::array();
  for (const auto& s : t.scores) {
    json entry = s.result;
    entry["axis"] = s.axis;
    scores.push_back(std::move(entry));
  }
  j = json{{"turn", t.turn},
           {"user_message", t.user_message},
           {"scores", std::move(scores)},
           {"user_steps", t.user_steps},
           {"assistant_steps", t.assistant_steps},
           {"system_prompt", t.system_prompt},
           {"assistant_reply", t.assistant_reply},
           {"started_at_ms", to_millis(t.started_at)},
           {"finished_at_ms", to_millis(t.finished_at)}};
}

TurnTrace turn_trace_from_json(const json& j) {
  TurnTrace t;
  t.turn = j.at("turn").get<std::size_t>();
  t.user_message = j.at("user_message").get<std::string>();
  for (const auto& s : j.at("scores")) {
    t.scores.push_back({s.at("axis").get<std::string>(), score_result_from_json(s)});
  }
  for (const auto& s : j.at("user_steps")) t.user_steps.push_back(axis_step_from_json(s));
  for (const auto& s : j.at("assistant_steps")) {
    t.assistant_steps.push_back(axis_step_from_json(s));
  }
  t.system_prompt = j.at("system_prompt").get<std::string>();
  t.assistant_reply = j.at("assistant_reply").get<std::string>();
  t.started_at = from_millis(j.at("started_at_ms").get<std::int64_t>());
  t.finished_at = from_millis(j.at("finished_at_ms").get<std::int64_t>());
  return t;
}

json state_snapshot(std::span<const PersonaModel> models) {
  json out = json::array();
  for (const auto& m : models) {
    json axes = json::array();
    for (const auto& a : m.axes) {
      axes.push_back({{"name", a.name},
                      {"states", a.config.states},
                      {"current", a.state.current},
                      {"carried_probs", a.state.carried},
                      {"transition_probs", a.last_transition
                                               ? json(*a.last_transition)
                                               : json(nullptr)}});
    }
    out.push_back({{"name", m.name},
                   {"role", m.role == ModelRole::assistant ? "assistant" : "user"},
                   {"axes", std::move(axes)}});
  }
  return json{{"models", std::move(out)}};
}

}  // namespace persona
