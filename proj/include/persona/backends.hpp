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

#include "persona/chat_client.hpp"
#include "persona/orchestrator.hpp"

namespace persona {

/// Builds the analyzer and generator a scenario asks for. Remote backends
/// start from `defaults` (normally EndpointSettings::from_env()) and take the
/// scenario's base_url/model overrides.
Backends make_backends(const Scenario& scenario, const EndpointSettings& defaults);

/// Like make_backends, but throws ConfigError for remote backends.
Backends hermetic_backends(const Scenario& scenario);

}  // namespace persona
