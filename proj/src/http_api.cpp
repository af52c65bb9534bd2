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

#include "persona/http_api.hpp"

#include <functional>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "persona/errors.hpp"
#include "persona/session_service.hpp"

namespace persona {

namespace {

using nlohmann::json;
using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const char* kind,
                const std::string& message) {
  send_json(res, status, {{"error", kind}, {"message", message}});
}

Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const NotFoundError& e) {
      send_error(res, 404, "not_found", e.what());
    } catch (const BusyError& e) {
      res.set_header("Retry-After", "1");
      send_error(res, 409, "busy", e.what());
    } catch (const GenerationError& e) {
      send_error(res, 502, "generation_failed", e.what());
    } catch (const ContractError& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body);
  if (!body.is_object()) throw ContractError("request body must be a JSON object");
  return body;
}

}  // namespace

void register_routes(httplib::Server& server, SessionService& service) {
  server.Get("/scenarios", guarded([&service](const httplib::Request&, httplib::Response& res) {
               send_json(res, 200, service.list_scenarios());
             }));

  server.Post("/sessions", guarded([&service](const httplib::Request& req,
                                              httplib::Response& res) {
                const json body = parse_body(req);
                std::optional<std::uint64_t> seed;
                if (body.contains("seed") && !body["seed"].is_null()) {
                  seed = body["seed"].get<std::uint64_t>();
                }
                send_json(res, 201,
                          service.create_session(body.at("scenario_id").get<std::string>(),
                                                 body.value("dev_mode", false), seed));
              }));

  server.Post(R"(/sessions/([^/]+)/messages)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const json body = parse_body(req);
                send_json(res, 200,
                          service.post_message(req.matches[1].str(),
                                               body.at("text").get<std::string>()));
              }));

  server.Get(R"(/sessions/([^/]+)/state)",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, service.get_state(req.matches[1].str()));
             }));

  server.Get(R"(/sessions/([^/]+)/transcript)",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, service.get_transcript(req.matches[1].str()));
             }));

  server.Get(R"(/sessions/([^/]+)/trajectory\.csv)",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               res.status = 200;
               res.set_content(service.export_trajectory(req.matches[1].str()), "text/csv");
             }));
}

}  // namespace persona
