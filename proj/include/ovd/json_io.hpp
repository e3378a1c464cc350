// Copyright 2026 The ovdbench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OVDBENCH_JSON_IO_HPP_
#define OVDBENCH_JSON_IO_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"

namespace ovd {

// Canonical serialization: compact, keys sorted, every float rendered with
// exactly six decimal digits. Two structurally equal documents always produce
// the same bytes, which is what the golden-file tests diff against.
std::string canonical_dump(const nlohmann::json& j);

// Parses a file, wrapping parse failures in ParseError with the path.
nlohmann::json parse_json_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace ovd

#endif  // OVDBENCH_JSON_IO_HPP_
