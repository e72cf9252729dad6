// Copyright 2026 The mtnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MTNAS_ERRORS_HPP_
#define MTNAS_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtnas {

// Violated precondition on a numeric or domain argument.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed text input. `position` is a character offset for single-line
// inputs (genome keys) and a 1-based line number for files.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Configuration failed validation. `key` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& constraint)
      : std::runtime_error(key + ": " + constraint), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Structural problem in a configuration document: unknown key, missing
// required key, or wrong value type.
class SchemaError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A configuration file, or a file it references, could not be read.
class ConfigFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An evaluator could not produce metrics for a candidate.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lookup evaluator has no record for the requested genome key.
class EvaluationMiss : public EvaluationError {
 public:
  explicit EvaluationMiss(const std::string& key)
      : EvaluationError("no lookup record for genome " + key), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace mtnas

#endif  // MTNAS_ERRORS_HPP_
