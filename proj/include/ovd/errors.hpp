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

#ifndef OVDBENCH_ERRORS_HPP_
#define OVDBENCH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ovd {

// Base for all toolkit errors. ValidationError covers everything caused by
// bad user input (exit code 2 in the CLI); anything else is an internal bug
// (exit code 1).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

class ParseError : public ValidationError {
 public:
  explicit ParseError(const std::string& msg) : ValidationError(msg) {}
};

class SchemaError : public ValidationError {
 public:
  explicit SchemaError(const std::string& msg) : ValidationError(msg) {}
};

class IntegrityError : public ValidationError {
 public:
  explicit IntegrityError(const std::string& msg) : ValidationError(msg) {}
};

class NegativeScoreError : public ValidationError {
 public:
  explicit NegativeScoreError(const std::string& msg) : ValidationError(msg) {}
};

class EmptyDatasetError : public ValidationError {
 public:
  explicit EmptyDatasetError(const std::string& msg) : ValidationError(msg) {}
};

class UnknownClassError : public ValidationError {
 public:
  explicit UnknownClassError(const std::string& msg) : ValidationError(msg) {}
};

class TokenNotInCaptionError : public ValidationError {
 public:
  explicit TokenNotInCaptionError(const std::string& msg)
      : ValidationError(msg) {}
};

class MissingScoreError : public ValidationError {
 public:
  explicit MissingScoreError(const std::string& msg) : ValidationError(msg) {}
};

class MissingAnswerError : public ValidationError {
 public:
  explicit MissingAnswerError(const std::string& msg) : ValidationError(msg) {}
};

class MultipleAnswerError : public ValidationError {
 public:
  explicit MultipleAnswerError(const std::string& msg)
      : ValidationError(msg) {}
};

class NoAttributeError : public ValidationError {
 public:
  explicit NoAttributeError(const std::string& msg) : ValidationError(msg) {}
};

class InfeasibleError : public ValidationError {
 public:
  explicit InfeasibleError(const std::string& msg) : ValidationError(msg) {}
};

class DimensionMismatchError : public ValidationError {
 public:
  explicit DimensionMismatchError(const std::string& msg)
      : ValidationError(msg) {}
};

class InvalidArgumentError : public ValidationError {
 public:
  explicit InvalidArgumentError(const std::string& msg)
      : ValidationError(msg) {}
};

}  // namespace ovd

#endif  // OVDBENCH_ERRORS_HPP_
