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

#include "subgauss/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "subgauss/errors.hpp"

namespace subgauss {
namespace {

// Bisection assumes delta is monotone in sigma; discretization artifacts
// breaking that would silently corrupt every cell, so spot-check it once
// per sweep on a coarse sigma ladder.
void assert_delta_monotone_in_sigma(const SweepSpec& spec) {
  const double eps = spec.epsilons.front();
  const double q = spec.qs[spec.qs.size() / 2];
  double previous = 2.0;
  for (double sigma : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const PrivacyLossFn fn(sigma, q);
    const DiscretePld pld =
        discretize(fn, spec.calibration.accountant, Rounding::kPessimistic);
    const double delta = delta_from_pld(pld, eps);
    if (delta > previous + 1e-12) {
      throw CalibrationError(
          "run_convergence_sweep: delta not monotone in sigma on probe grid");
    }
    previous = delta;
  }
}

}  // namespace

void SweepSpec::validate() const {
  if (epsilons.empty() || qs.empty() || iteration_counts.empty()) {
    throw InvalidParameterError("SweepSpec: empty grid list");
  }
  for (double e : epsilons) {
    if (!(e > 0.0)) throw InvalidParameterError("SweepSpec: epsilon must be > 0");
  }
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (!(qs[i] > 0.0) || !(qs[i] <= 1.0) || (i > 0 && !(qs[i] > qs[i - 1]))) {
      throw InvalidParameterError("SweepSpec: qs must be ascending in (0, 1]");
    }
  }
  for (std::size_t i = 0; i < iteration_counts.size(); ++i) {
    if (iteration_counts[i] < 1 ||
        (i > 0 && iteration_counts[i] <= iteration_counts[i - 1])) {
      throw InvalidParameterError("SweepSpec: iteration_counts must be ascending");
    }
  }
  if (!(delta_target > 0.0) || !(delta_target < 1.0)) {
    throw InvalidParameterError("SweepSpec: delta_target must be in (0, 1)");
  }
  calibration.validate();
}

void run_convergence_sweep(
    const SweepSpec& spec, const std::function<void(const ConvergenceRow&)>& on_row,
    const std::function<void(const std::string&)>& progress) {
  spec.validate();
  assert_delta_monotone_in_sigma(spec);

  for (double epsilon : spec.epsilons) {
    // sigma(1, T) per iteration count, shared by all q cells of this
    // epsilon.
    std::map<std::int64_t, double> full_batch;
    for (std::int64_t T : spec.iteration_counts) {
      const CalibrationResult r =
          calibrate_sigma(1.0, T, epsilon, spec.delta_target, spec.calibration);
      full_batch[T] = r.sigma;
      if (progress) {
        char line[128];
        std::snprintf(line, sizeof(line),
                      "calibrated eps=%g q=1 T=%lld sigma=%.6g", epsilon,
                      static_cast<long long>(T), r.sigma);
        progress(line);
      }
    }
    for (double q : spec.qs) {
      for (std::int64_t T : spec.iteration_counts) {
        ConvergenceRow row;
        row.epsilon = epsilon;
        row.q = q;
        row.iterations = T;
        row.sigma_full_batch = full_batch[T];
        if (q == 1.0) {
          row.sigma = full_batch[T];
        } else {
          row.sigma =
              calibrate_sigma(q, T, epsilon, spec.delta_target, spec.calibration)
                  .sigma;
        }
        row.sigma_eff = row.sigma / q;
        row.ratio = row.sigma / (q * row.sigma_full_batch);
        on_row(row);
        if (progress && q != 1.0) {
          char line[128];
          std::snprintf(line, sizeof(line),
                        "calibrated eps=%g q=%g T=%lld sigma=%.6g ratio=%.6f",
                        epsilon, q, static_cast<long long>(T), row.sigma,
                        row.ratio);
          progress(line);
        }
      }
    }
  }
}

}  // namespace subgauss
