// Copyright 2026 The ragastat Authors
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

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ragastat {

/// Dense value sequence used throughout: pitch values in Hz, normalized
/// audio samples, rank columns. Double precision everywhere.
using ValueArray = Eigen::ArrayXd;
using Index = Eigen::Index;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few values for the requested statistic or operation.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Input is degenerate for the requested operation (zero variance,
/// zero voiced duration, all deviations zero, ...).
class DegenerateData : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File contents violate the expected format.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace ragastat
