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

#include "persona/session_service.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "persona/errors.hpp"
#include "persona/json_io.hpp"

namespace persona {

using nlohmann::json;

namespace {

[[noreturn]] void throw_io(const std::string& what, const std::filesystem::path& path) {
  throw std::runtime_error(what + " " + path.string() + ": " + std::strerror(errno));
}

void sync_directory(const std::filesystem::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

std::uint64_t random_u64() {
  static std::mutex mutex;
  static std::mt19937_64 gen{[] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }()};
  std::lock_guard lock(mutex);
  return gen();
}

std::string new_session_id() {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(random_u64()));
  return buf;
}

const char* role_name(ModelRole role) {
  return role == ModelRole::assistant ? "assistant" : "user";
}

json record_json(const SessionRecord& r) {
  return {{"session_id", r.session_id},
          {"scenario_id", r.scenario_id},
          {"created_at_ms", to_millis(r.created_at)},
          {"dev_mode", r.dev_mode},
          {"seed", r.seed}};
}

}  // namespace

void SessionLog::write_line(const json& record, int extra_flags) const {
  const std::string line = record.dump() + '\n';
  const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC | extra_flags, 0644);
  if (fd < 0) throw_io("cannot open", path_);
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw_io("cannot write", path_);
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    throw_io("cannot sync", path_);
  }
  ::close(fd);
}

void SessionLog::create(const json& header) const {
  write_line(header, O_CREAT | O_EXCL);
  sync_directory(path_.parent_path());
}

void SessionLog::append(const json& record) const { write_line(record, 0); }

std::vector<json> SessionLog::read() const {
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw ConfigError("cannot open session log " + path_.string());
  const std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  std::vector<json> lines;
  std::size_t begin = 0;
  std::size_t line_no = 0;
  for (std::size_t end = content.find('\n'); end != std::string::npos;
       begin = end + 1, end = content.find('\n', begin)) {
    ++line_no;
    const std::string_view line(content.data() + begin, end - begin);
    if (line.empty()) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ConfigError(path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lines;
}

SessionService::SessionService(std::vector<Scenario> scenarios, BackendFactory backends,
                               std::filesystem::path data_dir)
    : backends_(std::move(backends)), data_dir_(std::move(data_dir)) {
  for (auto& s : scenarios) {
    s.validate();
    const std::string id = s.id;
    if (!scenarios_.emplace(id, std::make_shared<const Scenario>(std::move(s))).second) {
      throw ConfigError("duplicate scenario id '" + id + "'");
    }
  }
  std::filesystem::create_directories(data_dir_);
  load_existing();
}

void SessionService::load_existing() {
  for (const auto& file : std::filesystem::directory_iterator(data_dir_)) {
    if (file.path().extension() != ".jsonl") continue;
    SessionLog log(file.path());
    const auto lines = log.read();
    if (lines.empty() || lines.front().value("type", "") != "session") {
      throw ConfigError("session log without header: " + file.path().string());
    }
    const auto& h = lines.front();
    SessionRecord record{h.at("session_id").get<std::string>(),
                         h.at("scenario_id").get<std::string>(),
                         from_millis(h.at("created_at_ms").get<std::int64_t>()),
                         h.at("dev_mode").get<bool>(), h.at("seed").get<std::uint64_t>()};
    auto sc = scenario(record.scenario_id);

    std::vector<TurnTrace> turns;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      auto t = turn_trace_from_json(lines[i].at("trace"));
      if (t.turn != turns.size() + 1) {
        throw ConfigError("out-of-order turn in " + file.path().string());
      }
      turns.push_back(std::move(t));
    }

    auto entry = std::make_shared<Entry>(record, std::move(log), nullptr);
    entry->session = std::make_unique<PersonaSession>(sc, backends_(*sc), record.seed);
    auto models = replay_state(*sc, record.seed, turns);
    entry->session->restore(std::move(models), std::move(turns));
    sessions_.emplace(record.session_id, std::move(entry));
  }
}

std::shared_ptr<const Scenario> SessionService::scenario(std::string_view id) const {
  const auto it = scenarios_.find(id);
  if (it == scenarios_.end()) throw NotFoundError("unknown scenario '" + std::string(id) + "'");
  return it->second;
}

std::shared_ptr<SessionService::Entry> SessionService::find(std::string_view id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + std::string(id) + "'");
  return it->second;
}

json SessionService::snapshot(const Entry& entry) {
  json j = state_snapshot(entry.session->models());
  j["session_id"] = entry.record.session_id;
  j["turn"] = entry.session->turns().size();
  return j;
}

json SessionService::list_scenarios() const {
  json out = json::array();
  for (const auto& [id, s] : scenarios_) {
    json models = json::array();
    for (const auto& m : s->models) {
      json axes = json::array();
      for (const auto& a : m.axes) {
        axes.push_back({{"name", a.name},
                        {"states", a.config.states},
                        {"default_state", a.config.default_state}});
      }
      models.push_back({{"name", m.name}, {"role", role_name(m.role)}, {"axes", axes}});
    }
    out.push_back({{"scenario_id", id}, {"title", s->title}, {"models", models}});
  }
  return out;
}

json SessionService::create_session(std::string_view scenario_id, bool dev_mode,
                                    std::optional<std::uint64_t> seed) {
  auto sc = scenario(scenario_id);
  SessionRecord record{"", sc->id, Clock::now(), dev_mode, seed.value_or(random_u64())};
  auto session = std::make_unique<PersonaSession>(sc, backends_(*sc), record.seed);

  std::unique_lock lock(sessions_mutex_);
  do {
    record.session_id = new_session_id();
  } while (sessions_.count(record.session_id) != 0 ||
           std::filesystem::exists(data_dir_ / (record.session_id + ".jsonl")));

  SessionLog log(data_dir_ / (record.session_id + ".jsonl"));
  json header = record_json(record);
  header["type"] = "session";
  log.create(header);

  auto entry = std::make_shared<Entry>(record, std::move(log), std::move(session));
  json out = record_json(record);
  out["state"] = snapshot(*entry);
  sessions_.emplace(record.session_id, std::move(entry));
  return out;
}

json SessionService::post_message(std::string_view session_id, std::string_view text) {
  auto entry = find(session_id);
  std::unique_lock writer(entry->writer, std::try_to_lock);
  if (!writer.owns_lock()) {
    throw BusyError("session " + std::string(session_id) + " is processing a turn");
  }

  // Holding the writer lock makes this the only mutator; readers keep seeing
  // the previous turn boundary until the commit below.
  PendingTurn pending = entry->session->prepare_turn(text);
  entry->log.append({{"type", "turn"}, {"trace", pending.trace}});

  std::unique_lock state(entry->state);
  const TurnTrace& trace = entry->session->commit(std::move(pending));
  json out{{"session_id", entry->record.session_id},
           {"turn", trace.turn},
           {"assistant_reply", trace.assistant_reply}};
  if (entry->record.dev_mode) {
    json scores = json::object();
    for (const auto& s : trace.scores) scores[s.axis] = s.result;
    out["scores"] = std::move(scores);
    out["state"] = snapshot(*entry);
  }
  return out;
}

json SessionService::get_state(std::string_view session_id) const {
  auto entry = find(session_id);
  std::shared_lock lock(entry->state);
  return snapshot(*entry);
}

json SessionService::get_transcript(std::string_view session_id) const {
  auto entry = find(session_id);
  std::shared_lock lock(entry->state);
  json out = record_json(entry->record);
  out["turns"] = entry->session->turns();
  return out;
}

std::string SessionService::export_trajectory(std::string_view session_id) const {
  auto entry = find(session_id);
  std::shared_lock lock(entry->state);
  const auto rows = trajectory_rows(entry->session->scenario(), entry->session->turns());
  return trajectory_csv(rows);
}

std::vector<SessionRecord> SessionService::sessions() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<SessionRecord> out;
  for (const auto& [id, e] : sessions_) out.push_back(e->record);
  return out;
}

}  // namespace persona
