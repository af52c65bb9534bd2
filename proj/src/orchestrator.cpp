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

#include "persona/orchestrator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>

#include "persona/errors.hpp"
#include "persona/text.hpp"

namespace persona {

std::string assemble_system_prompt(std::string_view role_description,
                                   std::span<const PersonaAxis> axes) {
  std::string prompt(role_description);
  for (const auto& axis : axes) {
    if (axis.state.current >= axis.state_prompts.size()) {
      throw ContractError("axis " + axis.name + " has no prompt for state " +
                          std::to_string(axis.state.current));
    }
    if (!prompt.empty()) prompt += "\n\n";
    prompt += axis.state_prompts[axis.state.current];
  }
  return prompt;
}

PersonaSession::PersonaSession(std::shared_ptr<const Scenario> scenario,
                               Backends backends, std::uint64_t seed)
    : scenario_(std::move(scenario)),
      backends_(std::move(backends)),
      seed_(seed),
      models_(instantiate_models(*scenario_, seed)) {
  if (!backends_.analyzer || !backends_.generation) {
    throw ConfigError("session needs an analyzer and a generation backend");
  }
}

std::vector<ChatMessage> PersonaSession::history() const {
  std::vector<ChatMessage> out;
  out.reserve(turns_.size() * 2);
  for (const auto& t : turns_) {
    out.push_back({"user", t.user_message});
    out.push_back({"assistant", t.assistant_reply});
  }
  return out;
}

std::string PersonaSession::current_system_prompt() const {
  for (const auto& m : models_) {
    if (m.role == ModelRole::assistant) {
      return assemble_system_prompt(scenario_->role_description, m.axes);
    }
  }
  throw ConfigError("no assistant model");
}

void PersonaSession::restore(std::vector<PersonaModel> models,
                             std::vector<TurnTrace> turns) {
  models_ = std::move(models);
  turns_ = std::move(turns);
}

namespace {

std::vector<std::string> analyzed_axes(const Scenario& scenario) {
  std::vector<std::string> names;
  for (const auto& m : scenario.models) {
    for (const auto& a : m.axes) {
      const bool analyzer_driven = m.role == ModelRole::tracked ||
                                   scenario.link_into(m.name, a.name) == nullptr;
      if (analyzer_driven &&
          std::find(names.begin(), names.end(), a.name) == names.end()) {
        names.push_back(a.name);
      }
    }
  }
  return names;
}

}  // namespace

TurnTrace PersonaSession::process_user_message(std::string_view text) {
  return commit(prepare_turn(text));
}

const TurnTrace& PersonaSession::commit(PendingTurn turn) {
  if (turn.trace.turn != turns_.size() + 1) {
    throw ContractError("turn was prepared against a different state");
  }
  models_ = std::move(turn.models);
  turns_.push_back(std::move(turn.trace));
  return turns_.back();
}

PendingTurn PersonaSession::prepare_turn(std::string_view text) const {
  if (trim(text).empty()) throw ContractError("user message must not be empty");

  TurnTrace trace;
  trace.turn = turns_.size() + 1;
  trace.user_message = std::string(text);
  trace.started_at = Clock::now();

  // Scoring runs concurrently; state updates are applied sequentially.
  const auto names = analyzed_axes(*scenario_);
  std::vector<ScorePrompt> prompts;
  std::vector<std::future<ScoreResult>> pending;
  for (const auto& name : names) prompts.push_back(scenario_->prompt_for(name));
  for (const auto& prompt : prompts) {
    pending.push_back(std::async(std::launch::async, [this, &prompt, text] {
      try {
        return score_message(*backends_.analyzer, prompt, text);
      } catch (const std::exception& e) {
        return ScoreResult{BackendError{e.what()}};
      }
    }));
  }
  std::map<std::string, std::pair<ScoreResult, ScoreRange>, std::less<>> scores;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto result = pending[i].get();
    trace.scores.push_back({names[i], result});
    scores.emplace(names[i], std::make_pair(std::move(result), prompts[i].range));
  }

  auto next = models_;
  std::size_t sequence = 0;

  auto apply = [&](const PersonaModel& model, PersonaAxis& axis,
                   std::optional<ProbVector> outside, InfluenceSource source,
                   std::string link_source, bool mirrored) {
    AxisConfig config = axis.config;
    if (!outside) config.weights = config.weights.without_outside();
    const ProbVector& input = outside ? *outside : axis.state.carried;
    auto transition = persona::step(config, axis.state, input, axis.rng);

    const std::size_t previous = axis.state.current;
    axis.state = {transition.new_state, transition.new_carried};
    axis.last_transition = transition.transition_probs;
    const auto effective = outside ? source : InfluenceSource::none;
    AxisStep s{.model = model.name,
               .axis = axis.name,
               .sequence = sequence++,
               .previous_state = previous,
               .source = effective,
               .link_source = std::move(link_source),
               .mirrored = mirrored,
               .outside = std::move(outside),
               .trace = std::move(transition),
               .rng_draws = axis.rng.draws(),
               .applied_at = Clock::now()};
    return s;
  };

  auto analyzer_outside = [&](const PersonaAxis& axis) -> std::optional<ProbVector> {
    const auto& [result, range] = scores.at(axis.name);
    if (!result.ok()) return std::nullopt;
    return score_to_distribution(result.score(), range, axis.config.states);
  };

  for (auto& model : next) {
    if (model.role != ModelRole::tracked) continue;
    for (auto& axis : model.axes) {
      trace.user_steps.push_back(apply(model, axis, analyzer_outside(axis),
                                       InfluenceSource::analyzer, {}, false));
    }
  }

  PersonaModel* assistant = nullptr;
  for (auto& model : next) {
    if (model.role != ModelRole::assistant) continue;
    assistant = &model;
    for (auto& axis : model.axes) {
      const auto* link = scenario_->link_into(model.name, axis.name);
      if (link == nullptr) {
        trace.assistant_steps.push_back(apply(model, axis, analyzer_outside(axis),
                                              InfluenceSource::analyzer, {}, false));
        continue;
      }
      const PersonaAxis* source = nullptr;
      for (const auto& m : next) {
        if (m.name == link->source.model) source = m.find_axis(link->source.axis);
      }
      const bool negative = link->correlation == Correlation::negative;
      ProbVector influence =
          negative ? mirror(source->state.carried) : source->state.carried;
      trace.assistant_steps.push_back(
          apply(model, axis, std::move(influence), InfluenceSource::link,
                link->source.model + "." + link->source.axis, negative));
    }
  }

  trace.system_prompt =
      assemble_system_prompt(scenario_->role_description, assistant->axes);

  GenerationRequest request;
  request.system_prompt = trace.system_prompt;
  request.conversation = history();
  request.conversation.push_back({"user", trace.user_message});
  for (const auto& axis : assistant->axes) {
    request.assistant_states.push_back({axis.name, axis.state.current});
  }
  trace.assistant_reply = generate_reply(*backends_.generation, request);
  trace.finished_at = Clock::now();

  return {std::move(trace), std::move(next)};
}

std::vector<PersonaModel> replay_state(const Scenario& scenario, std::uint64_t seed,
                                       std::span<const TurnTrace> turns) {
  auto models = instantiate_models(scenario, seed);
  auto apply = [&](const AxisStep& s) {
    for (auto& m : models) {
      if (m.name != s.model) continue;
      auto* axis = m.find_axis(s.axis);
      if (axis == nullptr) break;
      axis->state = {s.trace.new_state, s.trace.new_carried};
      axis->last_transition = s.trace.transition_probs;
      axis->rng = AxisRng::restore(axis->rng.seed(), s.rng_draws);
      return;
    }
    throw ConfigError("persisted step refers to unknown axis " + s.model + "." + s.axis);
  };
  for (const auto& t : turns) {
    for (const auto& s : t.user_steps) apply(s);
    for (const auto& s : t.assistant_steps) apply(s);
  }
  return models;
}

std::vector<std::string> load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open script " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<TurnTrace> run_scripted_session(std::shared_ptr<const Scenario> scenario,
                                            std::span<const std::string> script,
                                            std::uint64_t seed,
                                            const Backends& backends) {
  PersonaSession session(std::move(scenario), backends, seed);
  std::vector<TurnTrace> out;
  out.reserve(script.size());
  for (const auto& message : script) {
    out.push_back(session.process_user_message(message));
  }
  return out;
}

std::vector<TrajectoryRow> trajectory_rows(const Scenario& scenario,
                                           std::span<const TurnTrace> turns) {
  std::vector<TrajectoryRow> rows;
  const auto initial = instantiate_models(scenario, 0);
  for (const auto& m : initial) {
    for (const auto& a : m.axes) {
      rows.push_back({0, m.name, a.name, a.state.current,
                      {a.state.carried.begin(), a.state.carried.end()}});
    }
  }
  for (const auto& t : turns) {
    for (const auto& m : scenario.models) {
      for (const auto& a : m.axes) {
        const AxisStep* found = nullptr;
        for (const auto* steps : {&t.user_steps, &t.assistant_steps}) {
          for (const auto& s : *steps) {
            if (s.model == m.name && s.axis == a.name) found = &s;
          }
        }
        if (found == nullptr) {
          throw ContractError("turn " + std::to_string(t.turn) + " has no step for " +
                              m.name + "." + a.name);
        }
        rows.push_back({t.turn, m.name, a.name, found->trace.new_state,
                        {found->trace.new_carried.begin(),
                         found->trace.new_carried.end()}});
      }
    }
  }
  return rows;
}

std::string trajectory_csv(std::span<const TrajectoryRow> rows) {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.probs.size());

  std::string out = "turn,model,axis,state";
  for (std::size_t i = 0; i < width; ++i) out += ",prob_" + std::to_string(i);
  out += '\n';
  char buf[32];
  for (const auto& r : rows) {
    out += std::to_string(r.turn) + ',' + r.model + ',' + r.axis + ',' +
           std::to_string(r.state);
    for (std::size_t i = 0; i < width; ++i) {
      out += ',';
      if (i < r.probs.size()) {
        std::snprintf(buf, sizeof buf, "%.6f", r.probs[i]);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace persona
