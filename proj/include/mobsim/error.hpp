/*
 * Copyright 2026 The mobsim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mobsim {

// Base of every error the library raises. `kind()` is a stable short tag used
// by the CLI for its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("parse", "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error("schema", what) {}
};

class OutOfWindowError : public Error {
 public:
  explicit OutOfWindowError(const std::string& what)
      : Error("out_of_window", what) {}
};

class UnreachableError : public Error {
 public:
  explicit UnreachableError(const std::string& what)
      : Error("unreachable", what) {}
};

class AssignmentError : public Error {
 public:
  explicit AssignmentError(const std::string& what)
      : Error("assignment", what) {}
};

class InjectionError : public Error {
 public:
  explicit InjectionError(const std::string& what)
      : Error("injection", what) {}
};

class MetricError : public Error {
 public:
  explicit MetricError(const std::string& what) : Error("metric", what) {}
};

class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::string& what)
      : Error("missing_inputs", what) {}
};

}  // namespace mobsim
