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
// Desk-scale numerical checks of the asymptotic picture: the
// fourth-order rate of the KL divergence between one subsampled-Gaussian
// iteration and its Gaussian surrogate, the Pinsker-derived total
// variation bound after T compositions, the certified accountant gap it
// implies, moment bounds on the single-step privacy loss variable, and
// the Omega(T) growth of the calibrated noise.

#ifndef SUBGAUSS_ASYMPTOTICS_HPP_
#define SUBGAUSS_ASYMPTOTICS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "subgauss/calibrator.hpp"

namespace subgauss {

// KL(N(0,1) || q N(u - qu, 1) + (1-q) N(-qu, 1)) by adaptive quadrature
// of the expected log density ratio over x in [-12, 12], absolute
// tolerance 1e-16. u plays the role of 1/sigma. Exactly 0 for q in
// {0, 1}.
double kl_gaussian_vs_mixture(double q, double u);

struct KlCheckResult {
  double q = 0.0;
  double u = 0.0;
  double kl_value = 0.0;
  double predicted_leading = 0.0;  // (1/4) (q-1)^2 q^2 u^4
  double ratio = 0.0;              // kl / predicted_leading
  bool degenerate = false;         // q in {0, 1}: the leading term vanishes
};

// Evaluates the KL along a strictly decreasing positive u sequence. The
// ratios approach 1 as u -> 0; the last entry should land within 2% of 1
// once u <= 0.05.
std::vector<KlCheckResult> kl_rate_check(double q,
                                         std::span<const double> u_sequence);

// Pinsker bound sqrt(T KL / 2) on the total variation distance between
// the T-fold composed subsampled mechanism and its Gaussian surrogate,
// using the additivity of KL across independent iterations.
double tv_bound_composed(double q, double sigma, std::int64_t iterations);

// Certified accountant gap (1 + e^eps) * tv_bound_composed: an upper
// bound on the difference between delta of the subsampled mechanism and
// delta of the Gaussian surrogate with noise sigma / q.
double ao_gap_bound(double q, double sigma, std::int64_t iterations,
                    double epsilon);

struct PlrvMomentCheck {
  double mean = 0.0;
  double mean_lower_bound = 0.0;      // q^2 / (2 sigma^2)
  double variance = 0.0;
  double variance_upper_bound = 0.0;  // 1/sigma^2 + 1/(4 sigma^4)
  bool pass = false;
};

// Mean and variance of the single-step privacy loss variable under P,
// by quadrature, checked against the closed-form bounds with 1e-10
// slack.
PlrvMomentCheck plrv_moment_check(double q, double sigma);

struct SigmaGrowthRow {
  std::int64_t iterations = 0;
  double sigma = 0.0;
  double sigma_sq_over_iterations = 0.0;
};

struct SigmaGrowthResult {
  std::vector<SigmaGrowthRow> rows;
  double min_value = 0.0;        // min of sigma^2 / T over the sweep
  double last_over_first = 0.0;  // ratio of last to first sigma^2 / T
  bool pass = false;             // min > 0 and last/first >= 0.5
};

// Calibrates sigma along an increasing iteration sequence and reports
// sigma^2 / T, the finite-range witness that the calibrated noise
// variance grows at least linearly.
SigmaGrowthResult sigma_growth_witness(double q, double epsilon, double delta,
                                       std::span<const std::int64_t> iterations,
                                       const CalibrationConfig& cfg = {});

}  // namespace subgauss

#endif  // SUBGAUSS_ASYMPTOTICS_HPP_
