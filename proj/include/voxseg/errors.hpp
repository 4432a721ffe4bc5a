// Copyright 2026 The voxseg authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VOXSEG_ERRORS_HPP
#define VOXSEG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace voxseg {

/// Base of the toolkit exception hierarchy. The three direct children map
/// onto the CLI exit codes: ConfigError -> 2, DataError -> 3,
/// NumericError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// File and volume data problems.

class MalformedHeader : public DataError {
 public:
  using DataError::DataError;
};

class UnsupportedDatatype : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class IoFailure : public DataError {
 public:
  using DataError::DataError;
};

class GeometryMismatch : public DataError {
 public:
  using DataError::DataError;
};

class ClassCountMismatch : public DataError {
 public:
  using DataError::DataError;
};

class OutOfBounds : public DataError {
 public:
  using DataError::DataError;
};

class SpecInvalid : public DataError {
 public:
  using DataError::DataError;
};

// Numerical failures.

class DegenerateInput : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularTransform : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace voxseg

#endif  // VOXSEG_ERRORS_HPP
