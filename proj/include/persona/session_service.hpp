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

// Chat sessions over a fixed set of scenarios, persisted as one append-only
// JSON-lines file per session.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "persona/orchestrator.hpp"

namespace persona {

/// Append-only log of one session: a header line followed by one line per
/// acknowledged turn. Every write is flushed to disk before returning.
class SessionLog {
 public:
  explicit SessionLog(std::filesystem::path path) : path_(std::move(path)) {}

  /// Creates the file; fails if it already exists.
  void create(const nlohmann::json& header) const;
  void append(const nlohmann::json& record) const;

  /// All complete lines. A torn final line (crash mid-write) is dropped.
  std::vector<nlohmann::json> read() const;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void write_line(const nlohmann::json& record, int extra_flags) const;

  std::filesystem::path path_;
};

struct SessionRecord {
  std::string session_id;
  std::string scenario_id;
  Clock::time_point created_at;
  bool dev_mode = false;
  std::uint64_t seed = 0;
};

using BackendFactory = std::function<Backends(const Scenario&)>;

class SessionService {
 public:
  /// Loads every session found in data_dir. Scenarios are fixed for the
  /// lifetime of the service.
  SessionService(std::vector<Scenario> scenarios, BackendFactory backends,
                 std::filesystem::path data_dir);

  nlohmann::json list_scenarios() const;

  /// Throws NotFoundError for an unknown scenario.
  nlohmann::json create_session(std::string_view scenario_id, bool dev_mode,
                                std::optional<std::uint64_t> seed = std::nullopt);

  /// Throws NotFoundError, BusyError when another turn of the same session is
  /// in flight, ContractError for blank text and GenerationError when no reply
  /// could be produced. State is unchanged on any error.
  nlohmann::json post_message(std::string_view session_id, std::string_view text);

  nlohmann::json get_state(std::string_view session_id) const;
  nlohmann::json get_transcript(std::string_view session_id) const;
  std::string export_trajectory(std::string_view session_id) const;

  std::vector<SessionRecord> sessions() const;

 private:
  struct Entry {
    SessionRecord record;
    SessionLog log;
    std::unique_ptr<PersonaSession> session;
    std::mutex writer;              // one turn at a time
    mutable std::shared_mutex state;  // guards session for readers
  };

  std::shared_ptr<Entry> find(std::string_view session_id) const;
  std::shared_ptr<const Scenario> scenario(std::string_view id) const;
  void load_existing();
  static nlohmann::json snapshot(const Entry& entry);

  std::map<std::string, std::shared_ptr<const Scenario>, std::less<>> scenarios_;
  BackendFactory backends_;
  std::filesystem::path data_dir_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
};

}  // namespace persona
