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

#include "subgauss/single_step.hpp"

#include <cmath>
#include <limits>

#include "subgauss/calibrator.hpp"
#include "subgauss/errors.hpp"
#include "subgauss/mechanism.hpp"
#include "subgauss/special_functions.hpp"

namespace subgauss {

AbPair compute_ab(double sigma, double q, double epsilon) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidParameterError("compute_ab: sigma must be positive");
  }
  if (!(q > 0.0) || !(q <= 1.0)) {
    throw InvalidParameterError("compute_ab: q must be in (0, 1]");
  }
  if (!(epsilon >= 0.0)) {
    throw InvalidParameterError("compute_ab: epsilon must be >= 0");
  }
  AbPair result;
  result.sigma = sigma;
  result.q = q;
  result.epsilon = epsilon;
  result.a = 1.0 / (2.0 * kSqrt2 * sigma);
  // ln(h/q) = log1p(expm1(eps)/q), exact for q == 1 and stable for tiny
  // epsilon.
  const double log_hq =
      (q == 1.0) ? epsilon : std::log1p(std::expm1(epsilon) / q);
  result.b = sigma * kInvSqrt2 * log_hq;
  return result;
}

double sigma_prime(double sigma, double q, double epsilon) {
  const AbPair ab = compute_ab(sigma, q, epsilon);
  const double a = ab.a;
  const double b = ab.b;
  const double d = a - b;
  double ratio;  // (erf(a-b) - erf(-a-b)) / erf'(a-b)
  if (d <= 0.0) {
    // erf(a-b) - erf(-a-b) = erfc(b-a) - erfc(a+b); rescaling by
    // exp((a-b)^2) turns both terms into erfcx values, which stay
    // representable however far a - b drops.
    ratio = 0.5 * kSqrtPi *
            (erfcx(b - a) - erfcx(a + b) * std::exp(-4.0 * a * b));
  } else {
    const double numerator = std::erf(d) + std::erf(a + b);
    const double derivative = (2.0 / kSqrtPi) * std::exp(-d * d);
    ratio = numerator / derivative;  // overflows to +inf for huge a - b
  }
  return (sigma / q) * (1.0 / (2.0 * a)) * ratio;
}

SigmaEffTrend effective_sigma_derivative_sign(double sigma, double q,
                                              double epsilon) {
  const AbPair ab = compute_ab(sigma, q, epsilon);
  return ab.a < ab.b ? SigmaEffTrend::kDecreasing
                     : SigmaEffTrend::kInconclusive;
}

void ConjectureSweepConfig::validate() const {
  if (!(delta_target > 0.0) || !(delta_target < 1.0)) {
    throw InvalidParameterError("ConjectureSweepConfig: delta_target in (0,1)");
  }
  if (!(epsilon_min > 0.0) || !(epsilon_max > epsilon_min)) {
    throw InvalidParameterError("ConjectureSweepConfig: bad epsilon range");
  }
  if (epsilon_points < 1 || q_points < 2 || sigma_points < 2) {
    throw InvalidParameterError("ConjectureSweepConfig: grids too small");
  }
  if (4.0 * delta_target >= 1.0) {
    throw InvalidParameterError(
        "ConjectureSweepConfig: q grid [4 delta, 1] is empty");
  }
}

std::vector<ConjectureRow> conjecture_sweep(
    const ConjectureSweepConfig& cfg,
    const std::function<void(int, int)>& progress) {
  cfg.validate();
  const double q_min = 4.0 * cfg.delta_target;

  std::vector<double> q_grid(cfg.q_points);
  const double log_q_min = std::log(q_min);
  for (int i = 0; i < cfg.q_points; ++i) {
    const double f = (cfg.q_points == 1)
                         ? 1.0
                         : static_cast<double>(i) / (cfg.q_points - 1);
    q_grid[i] = std::exp(log_q_min * (1.0 - f));  // geometric, ends at 1
  }
  q_grid.back() = 1.0;

  std::vector<ConjectureRow> rows;
  rows.reserve(cfg.epsilon_points);
  for (int e = 0; e < cfg.epsilon_points; ++e) {
    const double f = (cfg.epsilon_points == 1)
                         ? 0.0
                         : static_cast<double>(e) / (cfg.epsilon_points - 1);
    const double epsilon =
        cfg.epsilon_min * std::pow(cfg.epsilon_max / cfg.epsilon_min, f);

    const double sigma_full = gaussian_sigma_single_step(epsilon, cfg.delta_target);
    const double sigma_lo = q_min * sigma_full;
    const double sigma_step =
        (sigma_full - sigma_lo) / (cfg.sigma_points - 1);

    ConjectureRow row;
    row.epsilon = epsilon;
    row.max_a_minus_b = -std::numeric_limits<double>::infinity();

    for (double q : q_grid) {
      // a - b is strictly decreasing in sigma (a falls, b grows), so the
      // best feasible cell of a q column is the smallest sigma in range
      // with delta <= delta_target. delta is decreasing in sigma: binary
      // search the grid for the feasibility boundary, then sharpen it
      // between the bracketing grid points. A lattice-quantized boundary
      // would drown the epsilon trend of the maximum in sawtooth noise.
      const auto feasible = [&](double sigma) {
        return analytic_delta_single_step(sigma, q, epsilon) <=
               cfg.delta_target;
      };
      double sigma_best;
      if (feasible(sigma_lo)) {
        sigma_best = sigma_lo;  // range edge; the protocol stops here
      } else if (!feasible(sigma_full)) {
        continue;  // no feasible cell in this column
      } else {
        int lo = 0;  // infeasible
        int hi = cfg.sigma_points - 1;  // feasible
        while (hi - lo > 1) {
          const int mid = lo + (hi - lo) / 2;
          (feasible(sigma_lo + mid * sigma_step) ? hi : lo) = mid;
        }
        double lo_sigma = sigma_lo + lo * sigma_step;
        double hi_sigma = sigma_lo + hi * sigma_step;
        while ((hi_sigma - lo_sigma) > 1e-12 * hi_sigma) {
          const double mid = 0.5 * (lo_sigma + hi_sigma);
          (feasible(mid) ? hi_sigma : lo_sigma) = mid;
        }
        sigma_best = hi_sigma;
      }
      const double delta = analytic_delta_single_step(sigma_best, q, epsilon);
      const AbPair ab = compute_ab(sigma_best, q, epsilon);
      const double gap = ab.a - ab.b;
      if (gap > row.max_a_minus_b) {
        row.max_a_minus_b = gap;
        row.argmax_q = q;
        row.argmax_sigma = sigma_best;
        row.achieved_delta = delta;
        row.feasible_found = true;
      }
    }
    if (!row.feasible_found) {
      row.max_a_minus_b = std::numeric_limits<double>::quiet_NaN();
      row.argmax_q = std::numeric_limits<double>::quiet_NaN();
      row.argmax_sigma = std::numeric_limits<double>::quiet_NaN();
      row.achieved_delta = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
    if (progress) progress(e + 1, cfg.epsilon_points);
  }
  return rows;
}

}  // namespace subgauss
