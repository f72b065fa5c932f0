// Copyright 2026 The SkillRoute Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace skillroute {

enum class ErrorKind {
  kArgument,
  kValidation,
  kIo,
  kIntegrity,
  kNotFound,
  kConflict,
  kState,
  kTransport,
  kParse,
  kConfig,
  kTraining,
  kGenerationFailed,
};

const char* to_string(ErrorKind kind);

/// Base of every error thrown by the library. The kind maps one-to-one onto
/// the status codes of the C interface.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& m) : Error(ErrorKind::kArgument, m) {}
};

/// Carries every field-level violation found, not only the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(ErrorKind::kValidation, join(violations)),
        violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorKind::kIo, m) {}
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& m) : Error(ErrorKind::kIntegrity, m) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& m) : Error(ErrorKind::kNotFound, m) {}
};

class ConflictError : public Error {
 public:
  explicit ConflictError(const std::string& m) : Error(ErrorKind::kConflict, m) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& m) : Error(ErrorKind::kState, m) {}
};

class TransportError : public Error {
 public:
  TransportError(const std::string& m, int attempts)
      : Error(ErrorKind::kTransport, m), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& m, std::string raw)
      : Error(ErrorKind::kParse, m), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorKind::kConfig, m) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& m) : Error(ErrorKind::kTraining, m) {}
};

class GenerationFailedError : public Error {
 public:
  GenerationFailedError(const std::string& m, std::string raw_sample)
      : Error(ErrorKind::kGenerationFailed, m), raw_sample_(std::move(raw_sample)) {}
  const std::string& raw_sample() const noexcept { return raw_sample_; }

 private:
  std::string raw_sample_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument: return "argument";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kIntegrity: return "integrity";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kConflict: return "conflict";
    case ErrorKind::kState: return "state";
    case ErrorKind::kTransport: return "transport";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kTraining: return "training";
    case ErrorKind::kGenerationFailed: return "generation_failed";
  }
  return "unknown";
}

}  // namespace skillroute
