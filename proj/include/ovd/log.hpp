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

#ifndef OVDBENCH_LOG_HPP_
#define OVDBENCH_LOG_HPP_

#include <cstdlib>
#include <iostream>
#include <string>

namespace ovd {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Level comes from OVDBENCH_LOG (error|warn|info|debug), default warn.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("OVDBENCH_LOG");
    if (env == nullptr) return LogLevel::kWarn;
    const std::string v(env);
    if (v == "error") return LogLevel::kError;
    if (v == "info") return LogLevel::kInfo;
    if (v == "debug") return LogLevel::kDebug;
    return LogLevel::kWarn;
  }();
  return level;
}

inline void log(LogLevel level, const std::string& msg) {
  if (level > log_level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[ovdbench:" << names[static_cast<int>(level)] << "] " << msg
            << "\n";
}

inline void log_error(const std::string& msg) { log(LogLevel::kError, msg); }
inline void log_warn(const std::string& msg) { log(LogLevel::kWarn, msg); }
inline void log_info(const std::string& msg) { log(LogLevel::kInfo, msg); }
inline void log_debug(const std::string& msg) { log(LogLevel::kDebug, msg); }

}  // namespace ovd

#endif  // OVDBENCH_LOG_HPP_
