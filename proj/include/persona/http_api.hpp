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

#pragma once

namespace httplib {
class Server;
}

namespace persona {

class SessionService;

/// GET /scenarios, POST /sessions, POST /sessions/{id}/messages,
/// GET /sessions/{id}/state, /transcript and /trajectory.csv.
/// Errors are JSON {"error": kind, "message": ...} with status 400, 404, 409
/// or 502.
void register_routes(httplib::Server& server, SessionService& service);

}  // namespace persona
