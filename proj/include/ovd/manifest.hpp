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

#ifndef OVDBENCH_MANIFEST_HPP_
#define OVDBENCH_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

namespace ovd {

// Reproducibility record embedded in every output file. Everything in here is
// a pure function of the invocation and the input bytes, so identical reruns
// emit identical manifests.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> flags;
  std::map<std::string, std::string> input_digests;  // name -> fnv1a64:<hex>
  uint64_t seed = 0;
  std::string version;

  nlohmann::json to_json() const;
};

// fnv1a64 over the file bytes, rendered as "fnv1a64:<16 hex digits>".
std::string file_digest(const std::filesystem::path& path);

}  // namespace ovd

#endif  // OVDBENCH_MANIFEST_HPP_
