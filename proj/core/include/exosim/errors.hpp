// Copyright 2026 The exosim Authors
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

namespace exosim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration or parameter failed validation. Carries every offending
/// key so callers can report them all at once.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  explicit ValidationError(const std::string& issue)
      : ValidationError(std::vector<std::string>{issue}) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

class GeometryError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Non-finite input or state.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Desired end-effector position too close to the gear axis for IK.
class IkSingularityError : public Error {
 public:
  using Error::Error;
};

/// Input too short (or otherwise wrongly sized) for a signal operation.
class LengthError : public Error {
 public:
  using Error::Error;
};

class FilterDesignError : public Error {
 public:
  using Error::Error;
};

class SegmentationError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// File missing, unreadable, or not matching its schema.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace exosim
