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

// Reference evaluation of the axis update, written independently of the
// library code paths.

#pragma once

#include <cmath>
#include <vector>

#include "persona/axis_engine.hpp"

namespace persona::testing {

// Straight loops over the formula, kept apart from the library code paths.
inline std::vector<double> naive_gaussian(double center, double sigma, std::size_t k) {
  std::vector<double> g(k);
  double z = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = static_cast<double>(i) - center;
    g[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    z += g[i];
  }
  for (auto& x : g) x /= z;
  return g;
}

inline std::vector<double> naive_transition(const AxisConfig& c, const AxisState& s,
                                     const ProbVector& outside) {
  const auto gd = naive_gaussian(static_cast<double>(c.default_state), c.sigma, c.states);
  const auto gc = naive_gaussian(static_cast<double>(s.current), c.sigma, c.states);
  std::vector<double> t(c.states);
  for (std::size_t i = 0; i < c.states; ++i) {
    t[i] = c.weights.default_state * gd[i] + c.weights.current_state * gc[i] +
           c.weights.carried * s.carried[i] + c.weights.outside * outside[i];
  }
  return t;
}

inline std::vector<double> naive_carried(const AxisConfig& c, const AxisState& s,
                                  const ProbVector& outside) {
  const auto gd = naive_gaussian(static_cast<double>(c.default_state), c.sigma, c.states);
  const double rest = c.weights.default_state + c.weights.carried + c.weights.outside;
  std::vector<double> q(c.states);
  for (std::size_t i = 0; i < c.states; ++i) {
    q[i] = (c.weights.default_state / rest) * gd[i] +
           (c.weights.carried / rest) * s.carried[i] +
           (c.weights.outside / rest) * outside[i];
  }
  return q;
}

}  // namespace persona::testing
