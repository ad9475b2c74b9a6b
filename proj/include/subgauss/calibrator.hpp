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
//
// Noise calibration: the smallest sigma whose pessimistic accountant
// delta meets a target budget, plus the derived effective noise
// sigma_eff = sigma / q and the full-batch convergence ratio
// sigma(q, T) / (q sigma(1, T)).

#ifndef SUBGAUSS_CALIBRATOR_HPP_
#define SUBGAUSS_CALIBRATOR_HPP_

#include <cstdint>

#include "subgauss/pld.hpp"

namespace subgauss {

struct CalibrationConfig {
  AccountantConfig accountant;
  // Bisection stops once the bracket is this narrow relative to sigma.
  double relative_tolerance = 1e-4;
  int max_bracket_doublings = 200;

  void validate() const;
};

struct CalibrationResult {
  double sigma = 0.0;
  // Pessimistic accountant delta at the returned sigma; always <= the
  // target.
  double achieved_delta = 0.0;
  // Optimistic delta at the same sigma, recorded as a sandwich
  // diagnostic.
  double achieved_delta_optimistic = 0.0;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  std::int64_t evaluations = 0;
  double sigma_eff = 0.0;  // sigma / q
};

// Calibrates the Gaussian mechanism analytically: the sigma with
// analytic_delta_single_step(sigma, 1, epsilon) == delta. Used for
// bracket seeding and by the single-iteration sweeps.
double gaussian_sigma_single_step(double epsilon, double delta);

// Smallest sigma with pessimistic delta(q, T, epsilon) <= delta_target,
// found by bisection on a geometrically grown bracket seeded at
// q * sqrt(T) * gaussian guess. Throws CalibrationError when the target
// sits at or above the achievable ceiling 1 - (1-q)^T, or when the
// bracket cannot straddle the target.
CalibrationResult calibrate_sigma(double q, std::int64_t iterations,
                                  double epsilon, double delta_target,
                                  const CalibrationConfig& cfg = {});

// sigma(q, T) / (q * sigma(1, T)) with both calibrations run at the same
// configuration. Tends to 1 from above as T grows. Exactly 1 for q == 1.
double convergence_ratio(double q, std::int64_t iterations, double epsilon,
                         double delta_target, const CalibrationConfig& cfg = {});

}  // namespace subgauss

#endif  // SUBGAUSS_CALIBRATOR_HPP_
