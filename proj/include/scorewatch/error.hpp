// Copyright 2026 The scorewatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
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

namespace scorewatch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value or missing configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A row of an input stream could not be turned into an Event.
class StreamError : public Error {
 public:
  enum class Kind { malformed, rejected, ordering, empty };

  StreamError(Kind kind, std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message),
        kind_(kind),
        line_(line) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

class EmptyWindowError : public Error {
 public:
  using Error::Error;
};

class IncompatibleHistogramsError : public Error {
 public:
  using Error::Error;
};

/// Query issued before enough data has been observed.
class WarmUpError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class RejectedValueError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace scorewatch
