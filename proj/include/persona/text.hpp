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

#include <string>
#include <string_view>
#include <vector>

namespace persona {

std::string_view trim(std::string_view text);

/// ASCII lowercase plus the German umlauts in UTF-8.
std::string fold_case(std::string_view text);

/// Case-folded words. Word characters are ASCII letters, digits, apostrophes
/// and any non-ASCII byte; everything else separates words.
std::vector<std::string> words(std::string_view text);

}  // namespace persona
