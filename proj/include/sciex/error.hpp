// Copyright 2026 The sciex Authors.
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

#ifndef SCIEX_ERROR_HPP_
#define SCIEX_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sciex {

// Error categories. The numeric values are part of the C ABI (see sciex.h).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIo = 2,
  kSchema = 3,
  kType = 4,
  kParse = 5,
  kConfig = 6,
  kGroupTooSmall = 7,
  kSizeTooLarge = 8,
  kMissingRecord = 9,
  kInternal = 10,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const { return code_; }
  // Message without the category prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& m) : Error(ErrorCode::kSchema, m) {}
};

class TypeError : public Error {
 public:
  explicit TypeError(const std::string& m) : Error(ErrorCode::kType, m) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& m) : Error(ErrorCode::kParse, m) {}
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field_path, const std::string& m)
      : Error(ErrorCode::kConfig, field_path + ": " + m), field_path_(field_path) {}

  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

class GroupTooSmall : public Error {
 public:
  explicit GroupTooSmall(const std::string& m) : Error(ErrorCode::kGroupTooSmall, m) {}
};

class SizeTooLarge : public Error {
 public:
  explicit SizeTooLarge(const std::string& m) : Error(ErrorCode::kSizeTooLarge, m) {}
};

class MissingRecord : public Error {
 public:
  explicit MissingRecord(const std::string& m) : Error(ErrorCode::kMissingRecord, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::kIo, m) {}
};

}  // namespace sciex

#endif  // SCIEX_ERROR_HPP_
