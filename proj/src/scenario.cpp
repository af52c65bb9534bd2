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

#include "persona/scenario.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "persona/errors.hpp"

namespace persona {

using nlohmann::json;

const PersonaAxis* PersonaModel::find_axis(std::string_view axis) const {
  for (const auto& a : axes) {
    if (a.name == axis) return &a;
  }
  return nullptr;
}

PersonaAxis* PersonaModel::find_axis(std::string_view axis) {
  for (auto& a : axes) {
    if (a.name == axis) return &a;
  }
  return nullptr;
}

namespace {

AxisRef parse_ref(const std::string& dotted) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size()) {
    throw ConfigError("axis reference '" + dotted + "' must look like model.axis");
  }
  return {dotted.substr(0, dot), dotted.substr(dot + 1)};
}

std::string to_string(const AxisRef& ref) { return ref.model + "." + ref.axis; }

PersonaAxis parse_axis(const json& j) {
  AxisConfig config;
  config.states = j.at("states").get<std::size_t>();
  config.default_state = j.at("default_state").get<std::size_t>();
  config.sigma = j.at("sigma").get<double>();
  config.mode = parse_selection_mode(j.at("mode").get<std::string>());
  const auto& w = j.at("weights");
  config.weights = {w.at("default").get<double>(), w.at("current").get<double>(),
                    w.at("carried").get<double>(), w.at("outside").get<double>()};
  if (j.contains("rng_seed") && !j["rng_seed"].is_null()) {
    config.rng_seed = j["rng_seed"].get<std::uint64_t>();
  }
  const auto name = j.at("name").get<std::string>();
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("axis " + name + ": " + e.what());
  }
  return {name, config, AxisState::initial(config),
          j.value("state_prompts", std::vector<std::string>{}), AxisRng(0),
          std::nullopt};
}

ScoreRange parse_range(const json& j) {
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Scenario Scenario::from_json(const json& j, const std::filesystem::path& base_dir) {
  Scenario s;
  try {
    s.id = j.at("scenario_id").get<std::string>();
    s.title = j.value("title", s.id);
    s.role_description = j.at("role_description").get<std::string>();

    for (const auto& m : j.at("models")) {
      PersonaModel model;
      model.name = m.at("name").get<std::string>();
      const auto role = m.at("role").get<std::string>();
      if (role == "assistant") {
        model.role = ModelRole::assistant;
      } else if (role == "user" || role == "tracked") {
        model.role = ModelRole::tracked;
      } else {
        throw ConfigError("model " + model.name + ": unknown role '" + role + "'");
      }
      for (const auto& a : m.at("axes")) model.axes.push_back(parse_axis(a));
      s.models.push_back(std::move(model));
    }

    for (const auto& l : j.value("links", json::array())) {
      const auto corr = l.at("correlation").get<std::string>();
      if (corr != "positive" && corr != "negative") {
        throw ConfigError("unknown correlation '" + corr + "'");
      }
      s.links.push_back({parse_ref(l.at("source").get<std::string>()),
                         parse_ref(l.at("target").get<std::string>()),
                         corr == "negative" ? Correlation::negative
                                            : Correlation::positive});
    }

    const auto& an = j.value("analyzer", json::object());
    s.analyzer.backend = an.value("backend", "lexicon");
    s.analyzer.variant = parse_prompt_variant(an.value("variant", "long"));
    if (an.contains("lexicon")) {
      s.analyzer.lexicon = resolve(base_dir, an["lexicon"].get<std::string>());
    }
    if (an.contains("replay")) {
      s.analyzer.replay = resolve(base_dir, an["replay"].get<std::string>());
    }
    s.analyzer.base_url = optional_string(an, "base_url");
    s.analyzer.model = optional_string(an, "model");
    s.analyzer.supports_prefix = an.value("supports_prefix", false);
    for (const auto& p : an.value("prompts", json::array())) {
      ScorePrompt prompt;
      prompt.axis = p.at("axis").get<std::string>();
      prompt.variant = parse_prompt_variant(p.at("variant").get<std::string>());
      prompt.text = p.at("text").get<std::string>();
      if (p.contains("range")) prompt.range = parse_range(p["range"]);
      prompt.answer_prefix = optional_string(p, "answer_prefix");
      s.analyzer.prompts.push_back(std::move(prompt));
    }

    const auto& gen = j.value("generation", json::object());
    s.generation.backend = gen.value("backend", "echo");
    s.generation.base_url = optional_string(gen, "base_url");
    s.generation.model = optional_string(gen, "model");
    if (gen.contains("temperature") && !gen["temperature"].is_null()) {
      s.generation.temperature = gen["temperature"].get<double>();
    }
    s.generation.replies = gen.value("replies", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

void Scenario::validate() const {
  if (id.empty()) throw ConfigError("scenario_id must not be empty");
  if (models.empty()) throw ConfigError("scenario " + id + " defines no models");

  std::set<std::string> model_names;
  int assistants = 0;
  for (const auto& m : models) {
    if (!model_names.insert(m.name).second) {
      throw ConfigError("duplicate model name " + m.name);
    }
    if (m.role == ModelRole::assistant) ++assistants;
    std::set<std::string> axis_names;
    for (const auto& a : m.axes) {
      if (!axis_names.insert(a.name).second) {
        throw ConfigError("duplicate axis " + a.name + " in model " + m.name);
      }
      a.config.validate();
      const bool needs_prompts = m.role == ModelRole::assistant;
      if ((needs_prompts || !a.state_prompts.empty()) &&
          a.state_prompts.size() != a.config.states) {
        throw ConfigError("axis " + m.name + "." + a.name + " needs exactly " +
                          std::to_string(a.config.states) + " state prompts");
      }
      for (const auto& p : a.state_prompts) {
        if (p.empty()) {
          throw ConfigError("empty state prompt on axis " + m.name + "." + a.name);
        }
      }
    }
  }
  if (assistants != 1) {
    throw ConfigError("scenario " + id + " needs exactly one assistant model");
  }

  std::set<std::string> targets;
  for (const auto& link : links) {
    if (link.source == link.target) {
      throw ConfigError("link source and target are both " + to_string(link.source));
    }
    const auto* src_model = find_model(link.source.model);
    const auto* dst_model = find_model(link.target.model);
    const auto* src = src_model ? src_model->find_axis(link.source.axis) : nullptr;
    const auto* dst = dst_model ? dst_model->find_axis(link.target.axis) : nullptr;
    if (src == nullptr) throw ConfigError("unknown link source " + to_string(link.source));
    if (dst == nullptr) throw ConfigError("unknown link target " + to_string(link.target));
    if (src_model->role != ModelRole::tracked || dst_model->role != ModelRole::assistant) {
      throw ConfigError("links run from a tracked model into the assistant model");
    }
    if (src->config.states != dst->config.states) {
      throw ConfigError("linked axes " + to_string(link.source) + " and " +
                        to_string(link.target) + " differ in state count");
    }
    if (!targets.insert(to_string(link.target)).second) {
      throw ConfigError("axis " + to_string(link.target) + " has more than one link");
    }
  }

  for (const auto& p : analyzer.prompts) p.validate();

  // Every analyzer-driven axis needs a scoring prompt.
  for (const auto& m : models) {
    for (const auto& a : m.axes) {
      if (m.role == ModelRole::tracked || link_into(m.name, a.name) == nullptr) {
        prompt_for(a.name);
      }
    }
  }
}

ScorePrompt Scenario::prompt_for(std::string_view axis) const {
  for (const auto& p : analyzer.prompts) {
    if (p.axis == axis && p.variant == analyzer.variant) return p;
  }
  return default_prompt(axis, analyzer.variant);
}

const PersonaModel& Scenario::assistant() const {
  for (const auto& m : models) {
    if (m.role == ModelRole::assistant) return m;
  }
  throw ConfigError("scenario " + id + " has no assistant model");
}

const PersonaModel* Scenario::find_model(std::string_view name) const {
  for (const auto& m : models) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

const AxisLink* Scenario::link_into(std::string_view model, std::string_view axis) const {
  for (const auto& l : links) {
    if (l.target.model == model && l.target.axis == axis) return &l;
  }
  return nullptr;
}

std::uint64_t derive_axis_seed(std::uint64_t session_seed, std::size_t model_index,
                               std::size_t axis_index) {
  return splitmix64(splitmix64(splitmix64(session_seed) ^ model_index) ^ axis_index);
}

std::vector<PersonaModel> instantiate_models(const Scenario& scenario,
                                             std::uint64_t session_seed) {
  std::vector<PersonaModel> models = scenario.models;
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t a = 0; a < models[m].axes.size(); ++a) {
      auto& axis = models[m].axes[a];
      axis.state = AxisState::initial(axis.config);
      axis.rng = AxisRng(axis.config.rng_seed.value_or(
          derive_axis_seed(session_seed, m, a)));
      axis.last_transition.reset();
    }
  }
  return models;
}

}  // namespace persona
