// Copyright 2026 The subgauss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBGAUSS_ERRORS_HPP_
#define SUBGAUSS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace subgauss {

// Arguments outside the documented domain of an operation.
class InvalidParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A discretized privacy loss distribution would exceed the configured
// grid budget.
class GridOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probability mass bookkeeping drifted beyond tolerance after a
// floating-point convolution.
class MassDriftError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Noise calibration could not bracket the target delta.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subgauss

#endif  // SUBGAUSS_ERRORS_HPP_
