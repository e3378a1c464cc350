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

#ifndef OVDBENCH_TESTS_TESTUTIL_HPP_
#define OVDBENCH_TESTS_TESTUTIL_HPP_

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "ovd/json_io.hpp"

namespace ovd::testing {

// Fresh directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ovdbench_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// Runs the CLI binary; returns the process exit code.
inline int run_cli(const std::string& args) {
#ifdef OVDBENCH_CLI_PATH
  const std::string cmd = std::string(OVDBENCH_CLI_PATH) + " " + args;
#else
  const std::string cmd = "ovdbench " + args;
#endif
  const int status = std::system(cmd.c_str());
  if (status < 0) return -1;
#ifdef WIFEXITED
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
#else
  return status;
#endif
}

inline std::string slurp(const std::filesystem::path& p) {
  return ovd::read_text_file(p);
}

}  // namespace ovd::testing

#endif  // OVDBENCH_TESTS_TESTUTIL_HPP_
