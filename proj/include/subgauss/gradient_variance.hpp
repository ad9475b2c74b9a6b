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
// Decomposition of the total gradient variance of the clipped,
// subsampled, noised gradient sum into its subsampling-induced and
// effective-noise parts, with a seeded Monte Carlo simulator as the
// empirical counterpart. Gradients are synthetic inputs; no model or
// optimizer lives here.

#ifndef SUBGAUSS_GRADIENT_VARIANCE_HPP_
#define SUBGAUSS_GRADIENT_VARIANCE_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace subgauss {

// L2 clipping: v * min(||v||, c) / ||v||, with clip(0) = 0.
std::vector<double> clip(std::vector<double> v, double c);

// Per-example gradients plus the clipping threshold C they are bounded
// by after clipping.
struct GradientSet {
  std::vector<std::vector<double>> vectors;
  double clip_threshold = 1.0;

  // Throws unless the threshold is positive and all vectors share one
  // dimension.
  void validate() const;
  // Copies of the vectors clipped at clip_threshold.
  std::vector<std::vector<double>> clipped() const;
};

// Per-coordinate variance split of the unbiased DP gradient estimator
// (1/q)(sum_i b_i g~_i + C sigma eta): total = subsampling + effective
// noise, exactly.
struct VarianceDecomposition {
  double subsampling_var = 0.0;     // ((1-q)/q) sum_i g~_{i,j}^2
  double effective_noise_var = 0.0; // (C sigma / q)^2
  double total_var = 0.0;
};

VarianceDecomposition analytic_decomposition(const GradientSet& grads, double q,
                                             double sigma,
                                             std::size_t coordinate);

struct SimulationResult {
  double empirical_mean = 0.0;
  double empirical_var = 0.0;
  double mean_stderr = 0.0;
  double var_stderr = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

// Draws `samples` realizations of coordinate j of the estimator with
// b_i ~ Bernoulli(q) i.i.d. and eta standard normal. Deterministic for a
// fixed seed; standard errors cover both the mean and the variance
// estimate (via the empirical fourth moment).
SimulationResult simulate_dp_gradient(const GradientSet& grads, double q,
                                      double sigma, std::size_t coordinate,
                                      std::int64_t samples, std::uint64_t seed);

// True iff the analytic subsampling variance is nonincreasing along a
// strictly increasing q grid in (0, 1].
bool subsampling_variance_monotonicity(const GradientSet& grads,
                                       std::size_t coordinate,
                                       std::span<const double> q_grid);

}  // namespace subgauss

#endif  // SUBGAUSS_GRADIENT_VARIANCE_HPP_
