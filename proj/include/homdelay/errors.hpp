// Copyright 2026 The homdelay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace homdelay {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed input files, inconsistent options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Detector range too small for the spectral density it is paired with.
class CoverageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A frequency difference fell outside the detector range.
class RangeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class EmptySample : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InsufficientData : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Base of failures that come from the numerics rather than the inputs.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace homdelay
