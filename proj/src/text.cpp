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

#include "persona/text.hpp"

namespace persona {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '\'' || c >= 0x80;
}

void flush_word(std::string& current, std::vector<std::string>& out) {
  std::string_view w = current;
  while (!w.empty() && w.front() == '\'') w.remove_prefix(1);
  while (!w.empty() && w.back() == '\'') w.remove_suffix(1);
  if (!w.empty()) out.emplace_back(w);
  current.clear();
}

}  // namespace

std::string_view trim(std::string_view text) {
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::string fold_case(std::string_view text) {
  std::string out(text);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c - 'A' + 'a');
    } else if (c == 0xC3 && i + 1 < out.size()) {
      // Ä Ö Ü -> ä ö ü
      auto& next = reinterpret_cast<unsigned char&>(out[i + 1]);
      if (next == 0x84 || next == 0x96 || next == 0x9C) next += 0x20;
      ++i;
    }
  }
  return out;
}

std::vector<std::string> words(std::string_view text) {
  const std::string folded = fold_case(text);
  std::vector<std::string> out;
  std::string current;
  for (std::size_t i = 0; i < folded.size(); ++i) {
    const auto c = static_cast<unsigned char>(folded[i]);
    // U+2000..U+203F: typographic quotes, dashes, ellipsis.
    if (c == 0xE2 && i + 2 < folded.size() &&
        static_cast<unsigned char>(folded[i + 1]) == 0x80) {
      flush_word(current, out);
      i += 2;
    } else if (is_word_byte(c)) {
      current.push_back(folded[i]);
    } else {
      flush_word(current, out);
    }
  }
  flush_word(current, out);
  return out;
}

}  // namespace persona
