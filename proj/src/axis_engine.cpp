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

#include "persona/axis_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "persona/errors.hpp"

namespace persona {

namespace {

void require_same_size(std::size_t k, const ProbVector& p, const char* what) {
  if (p.size() != k) {
    throw ContractError(std::string(what) + " has " + std::to_string(p.size()) +
                        " entries, axis has " + std::to_string(k));
  }
}

bool in_unit_interval(double w) { return w >= 0.0 && w <= 1.0; }

std::vector<double> scaled(std::span<const double> v, double w) {
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x *= w;
  return out;
}

}  // namespace

ProbVector::ProbVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.size() < 2) {
    throw ContractError("probability vector needs at least 2 states");
  }
  double total = 0.0;
  for (double x : entries_) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ContractError("probability entries must be finite and >= 0");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    throw ContractError("probability entries sum to " + std::to_string(total));
  }
}

ProbVector ProbVector::one_hot(std::size_t k, std::size_t index) {
  if (index >= k) throw ContractError("one-hot index out of range");
  std::vector<double> v(k, 0.0);
  v[index] = 1.0;
  return ProbVector(std::move(v));
}

ProbVector ProbVector::uniform(std::size_t k) {
  if (k < 2) throw ContractError("probability vector needs at least 2 states");
  return ProbVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

std::string_view to_string(SelectionMode mode) {
  return mode == SelectionMode::deterministic ? "deterministic" : "probabilistic";
}

SelectionMode parse_selection_mode(std::string_view text) {
  if (text == "deterministic") return SelectionMode::deterministic;
  if (text == "probabilistic") return SelectionMode::probabilistic;
  throw ConfigError("unknown selection mode '" + std::string(text) + "'");
}

TransitionWeights TransitionWeights::without_outside() const {
  const double rest = default_state + current_state + carried;
  if (rest <= 0.0) return {0.0, 0.0, 1.0, 0.0};
  return {default_state / rest, current_state / rest, carried / rest, 0.0};
}

void AxisConfig::validate() const {
  if (states < 2) throw ConfigError("an axis needs at least 2 states");
  if (default_state >= states) throw ConfigError("default state out of range");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be positive");
  }
  const auto& w = weights;
  if (!in_unit_interval(w.default_state) || !in_unit_interval(w.current_state) ||
      !in_unit_interval(w.carried) || !in_unit_interval(w.outside)) {
    throw ConfigError("transition weights must lie in [0, 1]");
  }
  if (std::abs(w.sum() - 1.0) > kProbTolerance) {
    throw ConfigError("transition weights sum to " + std::to_string(w.sum()) +
                      ", expected 1");
  }
}

AxisState AxisState::initial(const AxisConfig& config) {
  config.validate();
  return {config.default_state,
          discretized_normal(config.default_state, config.sigma, config.states)};
}

AxisRng::AxisRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

AxisRng AxisRng::restore(std::uint64_t seed, std::uint64_t draws) {
  AxisRng rng(seed);
  rng.engine_.discard(draws);
  rng.draws_ = draws;
  return rng;
}

double AxisRng::next_unit() {
  ++draws_;
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

ProbVector discretized_normal(std::size_t center, double sigma, std::size_t k) {
  if (k < 2) throw ConfigError("an axis needs at least 2 states");
  if (center >= k) throw ConfigError("Gaussian center out of range");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be positive");
  }
  std::vector<double> v(k);
  const double denom = 2.0 * sigma * sigma;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(center);
    v[i] = std::exp(-(d * d) / denom);
  }
  // v[center] == 1, so the total never underflows.
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
  return ProbVector(std::move(v));
}

ProbVector mirror(const ProbVector& p) {
  std::vector<double> v(p.begin(), p.end());
  std::reverse(v.begin(), v.end());
  return ProbVector(std::move(v));
}

std::size_t argmax(const ProbVector& p) {
  return static_cast<std::size_t>(
      std::distance(p.begin(), std::max_element(p.begin(), p.end())));
}

namespace {

TransitionComponents weighted_components(const AxisConfig& config,
                                         const AxisState& state,
                                         const ProbVector& outside) {
  const std::size_t k = config.states;
  require_same_size(k, state.carried, "carried probabilities");
  require_same_size(k, outside, "outside influence");
  if (state.current >= k) throw ContractError("current state out of range");

  const auto& w = config.weights;
  const auto around_default =
      discretized_normal(config.default_state, config.sigma, k);
  const auto around_current = discretized_normal(state.current, config.sigma, k);
  return {scaled(around_default.values(), w.default_state),
          scaled(around_current.values(), w.current_state),
          scaled(state.carried.values(), w.carried),
          scaled(outside.values(), w.outside)};
}

ProbVector sum_of(const TransitionComponents& c) {
  std::vector<double> v(c.default_state.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = c.default_state[i] + c.current_state[i] + c.carried[i] + c.outside[i];
  }
  return ProbVector(std::move(v));
}

}  // namespace

ProbVector transition_probs(const AxisConfig& config, const AxisState& state,
                            const ProbVector& outside) {
  return sum_of(weighted_components(config, state, outside));
}

ProbVector updated_carried_probs(const AxisConfig& config,
                                 const AxisState& state,
                                 const ProbVector& outside) {
  const std::size_t k = config.states;
  require_same_size(k, state.carried, "carried probabilities");
  require_same_size(k, outside, "outside influence");

  const auto& w = config.weights;
  const double rest = w.default_state + w.carried + w.outside;
  if (rest <= 0.0) {
    throw ConfigError(
        "carried probabilities undefined: w_d + w_q + w_o is zero");
  }
  const double wd = w.default_state / rest;
  const double wq = w.carried / rest;
  const double wo = w.outside / rest;

  const auto around_default =
      discretized_normal(config.default_state, config.sigma, k);
  std::vector<double> v(k);
  for (std::size_t i = 0; i < k; ++i) {
    v[i] = wd * around_default[i] + wq * state.carried[i] + wo * outside[i];
  }
  return ProbVector(std::move(v));
}

std::size_t select_next_state(const ProbVector& probs, SelectionMode mode,
                              AxisRng& rng) {
  if (mode == SelectionMode::deterministic) return argmax(probs);

  const double u = rng.next_unit();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left the cumulative sum a hair below u.
  return last_positive;
}

TransitionTrace step(const AxisConfig& config, const AxisState& state,
                     const ProbVector& outside, AxisRng& rng) {
  auto components = weighted_components(config, state, outside);
  auto probs = sum_of(components);
  const std::size_t next = select_next_state(probs, config.mode, rng);

  const auto& w = config.weights;
  ProbVector carried = (w.default_state + w.carried + w.outside > 0.0)
                           ? updated_carried_probs(config, state, outside)
                           : state.carried;
  return {std::move(probs), next, std::move(carried), std::move(components)};
}

}  // namespace persona
