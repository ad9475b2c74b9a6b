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

#include "subgauss/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subgauss/errors.hpp"
#include "subgauss/mechanism.hpp"
#include "subgauss/quadrature.hpp"
#include "subgauss/special_functions.hpp"

namespace subgauss {
namespace {

// Log density ratio ln(N(x;0,1) / mixture) evaluated through
// log1p/expm1 so the value keeps absolute accuracy ~x*u*eps even when
// it is orders of magnitude below the individual log densities.
double log_ratio(double x, double q, double u) {
  const double shift_in = x * u * (1.0 - q) - 0.5 * u * u * (1.0 - q) * (1.0 - q);
  const double shift_out = -x * u * q - 0.5 * u * u * q * q;
  return -std::log1p(q * std::expm1(shift_in) +
                     (1.0 - q) * std::expm1(shift_out));
}

}  // namespace

double kl_gaussian_vs_mixture(double q, double u) {
  if (!(q >= 0.0) || !(q <= 1.0)) {
    throw InvalidParameterError("kl_gaussian_vs_mixture: q must be in [0, 1]");
  }
  if (!(u > 0.0) || !std::isfinite(u)) {
    throw InvalidParameterError("kl_gaussian_vs_mixture: u must be positive");
  }
  if (q == 0.0 || q == 1.0) return 0.0;  // the mixture collapses to N(0, 1)

  const auto integrand = [q, u](double x) {
    return normal_pdf(x) * log_ratio(x, q, u);
  };
  const double kl = integrate_adaptive(integrand, -12.0, 12.0, 1e-16).value;
  // The divergence is nonnegative; tiny negative values are quadrature
  // noise around an exact zero.
  if (kl < 0.0) {
    if (kl < -1e-15) {
      throw QuadratureError("kl_gaussian_vs_mixture: negative divergence");
    }
    return 0.0;
  }
  return kl;
}

std::vector<KlCheckResult> kl_rate_check(double q,
                                         std::span<const double> u_sequence) {
  if (u_sequence.empty()) {
    throw InvalidParameterError("kl_rate_check: empty u sequence");
  }
  for (std::size_t i = 0; i < u_sequence.size(); ++i) {
    if (!(u_sequence[i] > 0.0) ||
        (i > 0 && !(u_sequence[i] < u_sequence[i - 1]))) {
      throw InvalidParameterError(
          "kl_rate_check: u sequence must be strictly decreasing and positive");
    }
  }
  const bool degenerate = (q == 0.0 || q == 1.0);
  std::vector<KlCheckResult> rows;
  rows.reserve(u_sequence.size());
  for (double u : u_sequence) {
    KlCheckResult row;
    row.q = q;
    row.u = u;
    row.degenerate = degenerate;
    row.kl_value = kl_gaussian_vs_mixture(q, u);
    row.predicted_leading = 0.25 * (q - 1.0) * (q - 1.0) * q * q * u * u * u * u;
    row.ratio = degenerate ? std::numeric_limits<double>::quiet_NaN()
                           : row.kl_value / row.predicted_leading;
    rows.push_back(row);
  }
  return rows;
}

double tv_bound_composed(double q, double sigma, std::int64_t iterations) {
  if (!(sigma > 0.0)) {
    throw InvalidParameterError("tv_bound_composed: sigma must be positive");
  }
  if (iterations < 1) {
    throw InvalidParameterError("tv_bound_composed: iterations must be >= 1");
  }
  const double kl = kl_gaussian_vs_mixture(q, 1.0 / sigma);
  return std::sqrt(0.5 * static_cast<double>(iterations) * kl);
}

double ao_gap_bound(double q, double sigma, std::int64_t iterations,
                    double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw InvalidParameterError("ao_gap_bound: epsilon must be >= 0");
  }
  return (1.0 + std::exp(epsilon)) * tv_bound_composed(q, sigma, iterations);
}

PlrvMomentCheck plrv_moment_check(double q, double sigma) {
  if (!(q >= 0.0) || !(q <= 1.0)) {
    throw InvalidParameterError("plrv_moment_check: q must be in [0, 1]");
  }
  if (!(sigma > 0.0)) {
    throw InvalidParameterError("plrv_moment_check: sigma must be positive");
  }
  const PrivacyLossFn fn(sigma, q);
  const auto loss = [&fn](double t) { return fn.loss_at(t); };
  const auto loss_sq = [&fn](double t) {
    const double l = fn.loss_at(t);
    return l * l;
  };

  // E_P[g] split over the two mixture components; each integral runs
  // over +-12 standard deviations around its own mean. The tolerance is
  // scaled by the largest loss magnitude on the range so small sigma
  // does not stall the refinement.
  const double reach = 12.0 * sigma;
  const double max_loss = std::max(std::abs(fn.loss_at(1.0 + reach)),
                                   std::abs(fn.loss_at(-reach)));
  const double tol_mean = 1e-13 * std::max(1.0, max_loss);
  const double tol_sq = 1e-13 * std::max(1.0, max_loss * max_loss);

  const auto component_expectation = [&](const std::function<double(double)>& g,
                                         double mean, double tol) {
    const auto weighted = [&](double t) {
      return normal_pdf((t - mean) / sigma) / sigma * g(t);
    };
    return integrate_adaptive(weighted, mean - reach, mean + reach, tol).value;
  };

  PlrvMomentCheck result;
  double mean = 0.0;
  double second = 0.0;
  if (q > 0.0) {
    mean += q * component_expectation(loss, 1.0, tol_mean);
    second += q * component_expectation(loss_sq, 1.0, tol_sq);
  }
  if (q < 1.0) {
    mean += (1.0 - q) * component_expectation(loss, 0.0, tol_mean);
    second += (1.0 - q) * component_expectation(loss_sq, 0.0, tol_sq);
  }
  result.mean = mean;
  result.variance = second - mean * mean;
  result.mean_lower_bound = q * q / (2.0 * sigma * sigma);
  result.variance_upper_bound =
      1.0 / (sigma * sigma) + 1.0 / (4.0 * sigma * sigma * sigma * sigma);
  result.pass = (result.mean >= result.mean_lower_bound - 1e-10) &&
                (result.variance <= result.variance_upper_bound + 1e-10);
  return result;
}

SigmaGrowthResult sigma_growth_witness(double q, double epsilon, double delta,
                                       std::span<const std::int64_t> iterations,
                                       const CalibrationConfig& cfg) {
  if (iterations.empty()) {
    throw InvalidParameterError("sigma_growth_witness: empty iteration list");
  }
  for (std::size_t i = 1; i < iterations.size(); ++i) {
    if (iterations[i] <= iterations[i - 1]) {
      throw InvalidParameterError(
          "sigma_growth_witness: iterations must be increasing");
    }
  }
  SigmaGrowthResult result;
  result.rows.reserve(iterations.size());
  for (std::int64_t T : iterations) {
    const CalibrationResult calibration =
        calibrate_sigma(q, T, epsilon, delta, cfg);
    SigmaGrowthRow row;
    row.iterations = T;
    row.sigma = calibration.sigma;
    row.sigma_sq_over_iterations =
        calibration.sigma * calibration.sigma / static_cast<double>(T);
    result.rows.push_back(row);
  }
  result.min_value = result.rows.front().sigma_sq_over_iterations;
  for (const SigmaGrowthRow& row : result.rows) {
    result.min_value = std::min(result.min_value, row.sigma_sq_over_iterations);
  }
  result.last_over_first = result.rows.back().sigma_sq_over_iterations /
                           result.rows.front().sigma_sq_over_iterations;
  result.pass = result.min_value > 0.0 && result.last_over_first >= 0.5;
  return result;
}

}  // namespace subgauss
