// Copyright 2026 The SUGAR Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sugar {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line()` is 1-based; 0 means "not line specific".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// An id or index outside its valid range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Arguments that cannot be satisfied (k > N, mismatched shapes, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

// Training produced a NaN/Inf loss.
class NonFiniteLoss : public Error {
 public:
  NonFiniteLoss(std::size_t device, std::size_t epoch)
      : Error("non-finite loss on device " + std::to_string(device) + " at epoch " +
              std::to_string(epoch)),
        device_(device),
        epoch_(epoch) {}
  std::size_t device() const noexcept { return device_; }
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t device_;
  std::size_t epoch_;
};

}  // namespace sugar
