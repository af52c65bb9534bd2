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

// Shared helpers for the test binaries: fixture paths, a seeded case
// generator, a recording chat transport and scratch directories.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "persona/axis_engine.hpp"
#include "persona/chat_client.hpp"

namespace persona::testing {

inline std::filesystem::path source_path(const std::string& relative) {
  return std::filesystem::path(PERSONA_SOURCE_DIR) / relative;
}

/// Seeded generator for property cases.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double real(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool chance(double p) { return unit() < p; }
  std::uint64_t bits() { return engine_(); }

  /// Mix of smooth, sparse and one-hot distributions.
  ProbVector prob_vector(std::size_t k) {
    if (chance(0.15)) return ProbVector::one_hot(k, index(k));
    std::vector<double> v(k);
    double sum = 0.0;
    for (auto& x : v) {
      x = chance(0.2) ? 0.0 : -std::log(1.0 - unit());
      sum += x;
    }
    if (sum == 0.0) return ProbVector::one_hot(k, index(k));
    for (auto& x : v) x /= sum;
    return ProbVector(std::move(v));
  }

  TransitionWeights weights() {
    double w[4];
    double sum = 0.0;
    for (double& x : w) {
      x = chance(0.15) ? 0.0 : unit();
      sum += x;
    }
    if (sum == 0.0) return {0.0, 1.0, 0.0, 0.0};
    return {w[0] / sum, w[1] / sum, w[2] / sum, w[3] / sum};
  }

  AxisConfig axis_config(std::size_t max_states = 5) {
    AxisConfig c;
    c.states = 2 + index(max_states - 1);
    c.default_state = index(c.states);
    c.sigma = chance(0.2) ? real(0.01, 0.2) : real(0.2, 3.0);
    c.weights = weights();
    c.mode = chance(0.5) ? SelectionMode::deterministic : SelectionMode::probabilistic;
    return c;
  }

  AxisState axis_state(const AxisConfig& c) { return {index(c.states), prob_vector(c.states)}; }

 private:
  std::mt19937_64 engine_;
};

/// Chat transport that records every request and answers from a queue of
/// canned responses (the last one repeats).
class RecordingTransport final : public ChatTransport {
 public:
  struct Call {
    std::string path;
    nlohmann::json body;
  };

  explicit RecordingTransport(std::vector<HttpResponse> responses)
      : responses_(std::move(responses)) {}

  static HttpResponse completion(const std::string& content, int status = 200) {
    nlohmann::json body{{"choices", {{{"message", {{"role", "assistant"},
                                                   {"content", content}}}}}}};
    return {status, body.dump()};
  }

  HttpResponse post_json(const std::string& path, const std::string& body) const override {
    std::lock_guard lock(mutex_);
    calls_.push_back({path, nlohmann::json::parse(body)});
    const std::size_t i = std::min(next_++, responses_.size() - 1);
    if (responses_[i].status < 0) throw TransportError("connection refused");
    return responses_[i];
  }

  std::vector<Call> calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }

 private:
  std::vector<HttpResponse> responses_;
  mutable std::mutex mutex_;
  mutable std::vector<Call> calls_;
  mutable std::size_t next_ = 0;
};

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("persona-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace persona::testing
