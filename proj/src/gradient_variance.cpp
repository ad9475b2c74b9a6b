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

#include "subgauss/gradient_variance.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "subgauss/errors.hpp"

namespace subgauss {

std::vector<double> clip(std::vector<double> v, double c) {
  if (!(c > 0.0)) {
    throw InvalidParameterError("clip: threshold must be positive");
  }
  double norm_sq = 0.0;
  for (double x : v) norm_sq += x * x;
  const double norm = std::sqrt(norm_sq);
  if (norm > c) {
    const double scale = c / norm;
    for (double& x : v) x *= scale;
  }
  return v;  // includes the zero vector, which maps to itself
}

void GradientSet::validate() const {
  if (!(clip_threshold > 0.0)) {
    throw InvalidParameterError("GradientSet: clip_threshold must be positive");
  }
  if (vectors.empty()) {
    throw InvalidParameterError("GradientSet: no gradients");
  }
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim || dim == 0) {
      throw InvalidParameterError("GradientSet: inconsistent dimensions");
    }
  }
}

std::vector<std::vector<double>> GradientSet::clipped() const {
  validate();
  std::vector<std::vector<double>> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(clip(v, clip_threshold));
  return out;
}

VarianceDecomposition analytic_decomposition(const GradientSet& grads, double q,
                                             double sigma,
                                             std::size_t coordinate) {
  if (!(q > 0.0) || !(q <= 1.0)) {
    throw InvalidParameterError("analytic_decomposition: q must be in (0, 1]");
  }
  if (!(sigma >= 0.0)) {
    throw InvalidParameterError("analytic_decomposition: sigma must be >= 0");
  }
  const auto clipped_grads = grads.clipped();
  if (coordinate >= clipped_grads.front().size()) {
    throw InvalidParameterError("analytic_decomposition: coordinate out of range");
  }
  double sum_sq = 0.0;
  for (const auto& g : clipped_grads) {
    sum_sq += g[coordinate] * g[coordinate];
  }
  VarianceDecomposition out;
  out.subsampling_var = (1.0 - q) / q * sum_sq;
  const double noise = grads.clip_threshold * sigma / q;
  out.effective_noise_var = noise * noise;
  out.total_var = out.subsampling_var + out.effective_noise_var;
  return out;
}

SimulationResult simulate_dp_gradient(const GradientSet& grads, double q,
                                      double sigma, std::size_t coordinate,
                                      std::int64_t samples, std::uint64_t seed) {
  if (!(q > 0.0) || !(q <= 1.0)) {
    throw InvalidParameterError("simulate_dp_gradient: q must be in (0, 1]");
  }
  if (!(sigma >= 0.0)) {
    throw InvalidParameterError("simulate_dp_gradient: sigma must be >= 0");
  }
  if (samples < 10000) {
    throw InvalidParameterError("simulate_dp_gradient: samples must be >= 1e4");
  }
  const auto clipped_grads = grads.clipped();
  if (coordinate >= clipped_grads.front().size()) {
    throw InvalidParameterError("simulate_dp_gradient: coordinate out of range");
  }
  std::vector<double> components;
  components.reserve(clipped_grads.size());
  for (const auto& g : clipped_grads) components.push_back(g[coordinate]);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_scale = grads.clip_threshold * sigma;
  const double inv_q = 1.0 / q;

  // Streaming central moments up to order four (Welford-style updates),
  // for the variance and its standard error.
  double n = 0.0, mean = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    double sum = 0.0;
    for (double g : components) {
      if (uniform(rng) < q) sum += g;
    }
    const double value = inv_q * (sum + noise_scale * normal(rng));

    n += 1.0;
    const double delta = value - mean;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term = delta * delta_n * (n - 1.0);
    mean += delta_n;
    m4 += term * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2 -
          4.0 * delta_n * m3;
    m3 += term * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
    m2 += term;
  }

  SimulationResult out;
  out.samples = samples;
  out.seed = seed;
  out.empirical_mean = mean;
  out.empirical_var = m2 / (n - 1.0);
  out.mean_stderr = std::sqrt(out.empirical_var / n);
  const double central4 = m4 / n;
  const double var_of_var =
      (central4 -
       (n - 3.0) / (n - 1.0) * out.empirical_var * out.empirical_var) /
      n;
  out.var_stderr = std::sqrt(std::max(0.0, var_of_var));
  return out;
}

bool subsampling_variance_monotonicity(const GradientSet& grads,
                                       std::size_t coordinate,
                                       std::span<const double> q_grid) {
  if (q_grid.empty()) {
    throw InvalidParameterError("subsampling_variance_monotonicity: empty grid");
  }
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    if (!(q_grid[i] > 0.0) || !(q_grid[i] <= 1.0) ||
        (i > 0 && !(q_grid[i] > q_grid[i - 1]))) {
      throw InvalidParameterError(
          "subsampling_variance_monotonicity: grid must be increasing in (0,1]");
    }
  }
  double previous = std::numeric_limits<double>::infinity();
  for (double q : q_grid) {
    const double var =
        analytic_decomposition(grads, q, 0.0, coordinate).subsampling_var;
    if (var > previous) return false;
    previous = var;
  }
  return true;
}

}  // namespace subgauss
