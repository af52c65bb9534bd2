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

// persona-server: HTTP API for chat sessions.

#include <charconv>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "persona/backends.hpp"
#include "persona/errors.hpp"
#include "persona/http_api.hpp"
#include "persona/session_service.hpp"

namespace {

std::pair<std::string, int> split_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("--bind expects host:port");
  int port = 0;
  const char* first = bind.data() + colon + 1;
  const char* last = bind.data() + bind.size();
  const auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || port < 0 || port > 65535) {
    throw std::invalid_argument("invalid port in --bind '" + bind + "'");
  }
  return {bind.substr(0, colon), port};
}

std::vector<persona::Scenario> load_scenarios(const std::filesystem::path& dir) {
  std::vector<persona::Scenario> out;
  for (const auto& file : std::filesystem::directory_iterator(dir)) {
    if (file.path().extension() != ".json") continue;
    out.push_back(persona::Scenario::load(file.path()));
    spdlog::info("loaded scenario '{}' from {}", out.back().id, file.path().string());
  }
  if (out.empty()) throw persona::ConfigError("no scenarios in " + dir.string());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personality-driven chat session service"};
  std::string bind = "127.0.0.1:8080";
  std::string data_dir = "data";
  std::string scenarios_dir = "scenarios";
  std::string log_level = "info";
  app.add_option("--bind", bind, "host:port to listen on");
  app.add_option("--data-dir", data_dir, "Session logs");
  app.add_option("--scenarios-dir", scenarios_dir, "Scenario JSON files");
  app.add_option("--log-level", log_level)
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::from_str(log_level));

  // SIGINT/SIGTERM are taken by a dedicated thread; every other thread
  // inherits the blocked mask.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  try {
    const auto [host, port] = split_bind(bind);
    const auto endpoint = persona::EndpointSettings::from_env();
    persona::SessionService service(
        load_scenarios(scenarios_dir),
        [endpoint](const persona::Scenario& s) { return persona::make_backends(s, endpoint); },
        data_dir);
    spdlog::info("restored {} session(s) from {}", service.sessions().size(), data_dir);

    httplib::Server server;
    persona::register_routes(server, service);
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::info("{} {} -> {}", req.method, req.path, res.status);
    });
    std::thread([&server, stop_signals] {
      int received = 0;
      sigwait(&stop_signals, &received);
      spdlog::info("signal {} received, shutting down", received);
      server.stop();
    }).detach();

    spdlog::info("listening on {}:{}", host, port);
    if (!server.listen(host, port)) {
      spdlog::error("cannot listen on {}", bind);
      return 1;
    }
    spdlog::info("stopped");
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
