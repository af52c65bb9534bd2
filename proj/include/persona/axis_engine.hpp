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

// Per-axis probabilistic state machine.
//
// Every personality axis has k ordered states. Each turn the transition
// distribution is rebuilt as a convex combination of four vectors: a
// discretized Gaussian around the default state, one around the current
// state, the carried state probabilities from the previous turn, and an
// outside influence (analyzer one-hot or a linked axis' probabilities).
// The carried probabilities for the next turn use the same combination
// without the current-state term, with the remaining weights rescaled.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace persona {

inline constexpr double kProbTolerance = 1e-9;

/// Discrete distribution over the ordered states of one axis.
class ProbVector {
 public:
  /// Throws ContractError unless there are >= 2 non-negative entries summing
  /// to one within kProbTolerance.
  explicit ProbVector(std::vector<double> entries);

  static ProbVector one_hot(std::size_t k, std::size_t index);
  static ProbVector uniform(std::size_t k);

  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> values() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  bool operator==(const ProbVector&) const = default;

 private:
  std::vector<double> entries_;
};

enum class SelectionMode { probabilistic, deterministic };

std::string_view to_string(SelectionMode mode);
SelectionMode parse_selection_mode(std::string_view text);

struct TransitionWeights {
  double default_state = 0.0;  // w_d
  double current_state = 0.0;  // w_c
  double carried = 0.0;        // w_q
  double outside = 0.0;        // w_o

  double sum() const noexcept {
    return default_state + current_state + carried + outside;
  }

  /// Drops the outside term and rescales the other three by 1 / (1 - w_o).
  /// When nothing but the outside term carries weight, the result is a pure
  /// pass-through of the carried probabilities.
  TransitionWeights without_outside() const;

  bool operator==(const TransitionWeights&) const = default;
};

struct AxisConfig {
  std::size_t states = 5;
  std::size_t default_state = 0;
  double sigma = 1.0;  // in state-index units
  TransitionWeights weights;
  SelectionMode mode = SelectionMode::probabilistic;
  std::optional<std::uint64_t> rng_seed;

  /// Throws ConfigError on k < 2, out-of-range default state, sigma <= 0,
  /// weights outside [0,1] or not summing to one.
  void validate() const;

  bool operator==(const AxisConfig&) const = default;
};

struct AxisState {
  std::size_t current = 0;
  ProbVector carried;

  /// Start of a session: current = default state, carried = the default-state
  /// Gaussian.
  static AxisState initial(const AxisConfig& config);

  bool operator==(const AxisState&) const = default;
};

/// The four weighted addends of a transition, kept for inspection.
struct TransitionComponents {
  std::vector<double> default_state;
  std::vector<double> current_state;
  std::vector<double> carried;
  std::vector<double> outside;
};

struct TransitionTrace {
  ProbVector transition_probs;
  std::size_t new_state = 0;
  ProbVector new_carried;
  TransitionComponents components;
};

/// Seedable generator owned by one axis. Only probabilistic state selection
/// draws from it, one 64-bit word per draw, so its position is fully
/// described by (seed, draws) and can be persisted and restored.
class AxisRng {
 public:
  explicit AxisRng(std::uint64_t seed = 0);
  static AxisRng restore(std::uint64_t seed, std::uint64_t draws);

  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double next_unit();

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

/// Gaussian pdf evaluated at the integer states and renormalized over them.
ProbVector discretized_normal(std::size_t center, double sigma, std::size_t k);

/// Reverses the state order; realizes a negative correlation between axes.
ProbVector mirror(const ProbVector& p);

/// Lowest index attaining the maximum.
std::size_t argmax(const ProbVector& p);

ProbVector transition_probs(const AxisConfig& config, const AxisState& state,
                            const ProbVector& outside);

/// Throws ConfigError when w_d + w_q + w_o == 0.
ProbVector updated_carried_probs(const AxisConfig& config,
                                 const AxisState& state,
                                 const ProbVector& outside);

std::size_t select_next_state(const ProbVector& probs, SelectionMode mode,
                              AxisRng& rng);

/// One full transition. The caller replaces its AxisState with
/// {trace.new_state, trace.new_carried}. If the configuration puts all of
/// its weight on the current state, carried probabilities pass through
/// unchanged.
TransitionTrace step(const AxisConfig& config, const AxisState& state,
                     const ProbVector& outside, AxisRng& rng);

}  // namespace persona
