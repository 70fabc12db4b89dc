// Copyright 2026 The trkit Authors.
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

#ifndef TRKIT_ERROR_HPP_
#define TRKIT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace trkit {

// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kInvalidInput,  // caller violated a precondition
  kSchema,        // malformed or inconsistent input records
  kParse,         // model output text could not be interpreted
  kNumeric,       // non-finite values or degenerate attention
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidRangeError : public Error {
 public:
  InvalidRangeError(std::size_t index, const std::string& what)
      : Error(ErrorKind::kInvalidInput, what), index_(index) {}

  // Position of the offending range in the caller's list.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& what)
      : Error(ErrorKind::kInvalidInput, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what)
      : Error(ErrorKind::kSchema, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw_text)
      : Error(ErrorKind::kParse, what), raw_text_(std::move(raw_text)) {}

  const std::string& raw_text() const noexcept { return raw_text_; }

 private:
  std::string raw_text_;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::kNumeric, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

}  // namespace trkit

#endif  // TRKIT_ERROR_HPP_
