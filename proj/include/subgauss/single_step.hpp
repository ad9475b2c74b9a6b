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
// Single-iteration theory: the scalar pair (a, b) whose sign relation
// a < b certifies that the effective noise sigma/q decreases with the
// subsampling rate, the closed-form derivative sigma'(q) of the
// calibrated noise, and the grid sweep that checks a - b < 0 across a
// range of epsilon values.

#ifndef SUBGAUSS_SINGLE_STEP_HPP_
#define SUBGAUSS_SINGLE_STEP_HPP_

#include <functional>
#include <vector>

namespace subgauss {

// a = 1 / (2 sqrt(2) sigma), b = (sigma / sqrt(2)) ln((e^eps - (1-q)) / q).
struct AbPair {
  double a = 0.0;
  double b = 0.0;
  double q = 0.0;
  double epsilon = 0.0;
  double sigma = 0.0;
};

// Throws InvalidParameterError for q == 0 (the log term degenerates).
AbPair compute_ab(double sigma, double q, double epsilon);

// Derivative of the calibrated single-iteration noise with respect to q:
//   sigma'(q) = (sigma/q) (1/(2a)) (erf(a-b) - erf(-a-b)) / erf'(a-b).
// Evaluated through the scaled complementary error function once a - b
// leaves the directly representable range. Valid at the calibrated
// sigma(q) for the (epsilon, delta) pair of interest.
double sigma_prime(double sigma, double q, double epsilon);

enum class SigmaEffTrend {
  kDecreasing,    // a < b: d/dq (sigma(q)/q) < 0 is certified
  kInconclusive,  // a >= b: the sufficient condition is silent
};

SigmaEffTrend effective_sigma_derivative_sign(double sigma, double q,
                                              double epsilon);

struct ConjectureSweepConfig {
  double delta_target = 1e-5;
  double epsilon_min = 4e-5;
  double epsilon_max = 4.0;
  int epsilon_points = 64;  // geometric grid
  int q_points = 512;       // geometric grid on [4 delta_target, 1]
  // Linear grid on [q_min sigma(1,eps), sigma(1,eps)] seeding the search
  // for each column's feasibility boundary; the boundary itself is then
  // sharpened by bisection between the bracketing grid points.
  int sigma_points = 512;

  void validate() const;
};

struct ConjectureRow {
  double epsilon = 0.0;
  double max_a_minus_b = 0.0;
  double argmax_q = 0.0;
  double argmax_sigma = 0.0;
  double achieved_delta = 0.0;
  bool feasible_found = false;
};

// For each epsilon: evaluates a, b and the analytic single-step delta on
// the (q, sigma) grid, and records the maximum a - b among cells with
// delta <= delta_target. Rows with no feasible cell are flagged rather
// than fatal. Deterministic given the grids.
std::vector<ConjectureRow> conjecture_sweep(
    const ConjectureSweepConfig& cfg,
    const std::function<void(int, int)>& progress = {});

}  // namespace subgauss

#endif  // SUBGAUSS_SINGLE_STEP_HPP_
