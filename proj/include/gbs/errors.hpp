// Copyright 2026 The gbs-fga Authors
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
#include <utility>
#include <vector>

namespace gbs {

/// Caller broke a precondition (non-symmetric theta, bad alpha, size mismatch...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A covariance-derived quantity is not physical (nonpositive determinant,
/// complex determinant, probability far outside [0, 1]).
class InvalidStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem too large for exhaustive enumeration.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or flag value.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite cost. Carries the trace up to the failure.
class TrainingFailedError : public std::runtime_error {
 public:
  TrainingFailedError(const std::string& what, std::vector<std::pair<int, double>> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}

  const std::vector<std::pair<int, double>>& trace() const { return trace_; }

 private:
  std::vector<std::pair<int, double>> trace_;
};

/// Wall-clock budget of a training run was exceeded.
class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gbs
