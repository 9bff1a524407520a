/* Copyright 2026 The edgenas Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace edgenas {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, off-grid configurations, bad arguments.
// The CLI maps this family to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Failure talking to or inside an external evaluator / device process.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

class ChannelError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

class ProtocolError : public EvaluationError {
 public:
  ProtocolError(const std::string& what, std::string raw_line)
      : EvaluationError(what), raw_line_(std::move(raw_line)) {}

  const std::string& raw_line() const { return raw_line_; }

 private:
  std::string raw_line_;
};

// A reply whose value falls outside its allowed range (e.g. accuracy > 100).
class ResponseRangeError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class MeasurementError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace edgenas
