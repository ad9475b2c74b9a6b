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
// The sigma(q, T) convergence sweep: calibrates the noise across a grid
// of (epsilon, q, T) cells at a fixed delta and reports the effective
// noise and its ratio to the full-batch line q sigma(1, T).

#ifndef SUBGAUSS_SWEEP_HPP_
#define SUBGAUSS_SWEEP_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "subgauss/calibrator.hpp"

namespace subgauss {

struct SweepSpec {
  std::vector<double> epsilons{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> qs{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  std::vector<std::int64_t> iteration_counts{1, 10, 100, 1000, 10000};
  double delta_target = 1e-5;
  // Sweeps calibrate tighter than a one-off query so the monotone laws
  // in the output are not blurred by bisection quantization.
  CalibrationConfig calibration = tight_calibration();

  static CalibrationConfig tight_calibration() {
    CalibrationConfig cfg;
    cfg.relative_tolerance = 1e-5;
    return cfg;
  }

  // Lists must be nonempty; qs and iteration_counts sorted ascending.
  void validate() const;
};

struct ConvergenceRow {
  double epsilon = 0.0;
  double q = 0.0;
  std::int64_t iterations = 0;
  double sigma = 0.0;
  double sigma_eff = 0.0;         // sigma / q
  double sigma_full_batch = 0.0;  // sigma(1, T) at the same epsilon
  double ratio = 0.0;             // sigma / (q sigma_full_batch)
};

// Runs every (epsilon, q, T) cell in deterministic order, emitting one
// row per cell through on_row. sigma(1, T) is calibrated once per
// (epsilon, T) and shared. progress, when set, receives a short line per
// cell suitable for a status stream.
void run_convergence_sweep(
    const SweepSpec& spec, const std::function<void(const ConvergenceRow&)>& on_row,
    const std::function<void(const std::string&)>& progress = {});

}  // namespace subgauss

#endif  // SUBGAUSS_SWEEP_HPP_
