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

#include "gtest/gtest.h"
#include "subgauss/calibrator.hpp"
#include "subgauss/errors.hpp"
#include "subgauss/mechanism.hpp"
#include "subgauss/special_functions.hpp"

namespace subgauss {
namespace {

TEST(ComputeAb, DirectSubstitution) {
  // a depends on sigma alone.
  EXPECT_NEAR(compute_ab(1.0, 0.5, 1.0).a, 0.3535533906, 1e-10);
  // q = 1 collapses the log term to epsilon.
  const AbPair full = compute_ab(2.0, 1.0, 0.7);
  EXPECT_NEAR(full.b, 2.0 * 0.7 / kSqrt2, 1e-14);
}

TEST(ComputeAb, MatchesExtendedPrecisionOracle) {
  const AbPair ab = compute_ab(2.0, 0.1, 1.0);
  const long double expected =
      (2.0L / sqrtl(2.0L)) * logl((expl(1.0L) - 0.9L) / 0.1L);
  EXPECT_NEAR(ab.b, static_cast<double>(expected), 1e-12 * ab.b);
  EXPECT_NEAR(ab.a, 1.0 / (2.0 * kSqrt2 * 2.0), 1e-15);
}

TEST(ComputeAb, RecomputableFromFields) {
  const AbPair ab = compute_ab(0.7, 0.3, 0.25);
  EXPECT_NEAR(ab.a, 1.0 / (2.0 * kSqrt2 * ab.sigma), 1e-12);
  EXPECT_NEAR(ab.b,
              ab.sigma / kSqrt2 *
                  std::log((std::exp(ab.epsilon) - (1.0 - ab.q)) / ab.q),
              1e-12 * std::max(1.0, ab.b));
  EXPECT_GT(ab.a, 0.0);
  EXPECT_GE(ab.b, 0.0);
}

TEST(ComputeAb, RejectsQZero) {
  EXPECT_THROW(compute_ab(1.0, 0.0, 1.0), InvalidParameterError);
}

TEST(SigmaPrime, PositiveEverywhere) {
  for (double sigma : {0.05, 0.3, 1.0, 5.0, 50.0}) {
    for (double q : {0.01, 0.3, 1.0}) {
      for (double eps : {0.01, 1.0, 4.0}) {
        const double d = sigma_prime(sigma, q, eps);
        EXPECT_GT(d, 0.0) << "sigma=" << sigma << " q=" << q << " eps=" << eps;
      }
    }
  }
}

TEST(SigmaPrime, BelowSigmaOverQWhenABelowB) {
  for (double sigma : {0.5, 1.0, 3.0}) {
    for (double q : {0.05, 0.4, 0.9}) {
      for (double eps : {0.5, 1.0, 2.0}) {
        const AbPair ab = compute_ab(sigma, q, eps);
        if (ab.a < ab.b) {
          EXPECT_LT(sigma_prime(sigma, q, eps), sigma / q)
              << "sigma=" << sigma << " q=" << q << " eps=" << eps;
        }
      }
    }
  }
}

TEST(SigmaPrime, ScaledRouteAgreesWithDirectRoute) {
  // At moderate negative a - b both evaluation paths are usable; they
  // must agree. Far out only the scaled route survives; it must stay
  // finite and positive.
  const AbPair ab = compute_ab(2.0, 0.3, 0.4);
  ASSERT_LT(ab.a - ab.b, 0.0);
  ASSERT_GT(ab.a - ab.b, -6.0);
  const double direct_ratio =
      (std::erf(ab.a - ab.b) + std::erf(ab.a + ab.b)) /
      ((2.0 / kSqrtPi) * std::exp(-(ab.a - ab.b) * (ab.a - ab.b)));
  const double direct =
      (ab.sigma / ab.q) * (1.0 / (2.0 * ab.a)) * direct_ratio;
  EXPECT_NEAR(sigma_prime(2.0, 0.3, 0.4), direct, 1e-10 * direct);

  const double far_out = sigma_prime(100.0, 0.5, 4.0);  // b - a ~ 4e2
  EXPECT_TRUE(std::isfinite(far_out));
  EXPECT_GT(far_out, 0.0);
}

TEST(SigmaPrime, MatchesFiniteDifferenceOfCalibratedSigma) {
  // Central difference of the calibrated sigma(q) at T = 1. The
  // accountant bias is smooth in q and cancels in the difference; the
  // bisection tolerance must sit well below h * sigma'.
  const double eps = 1.0, delta = 1e-5, q = 0.1, h = 1e-4;
  CalibrationConfig cfg;
  cfg.accountant.grid_step = 1e-4;
  cfg.relative_tolerance = 1e-7;
  const double sigma_at_q = calibrate_sigma(q, 1, eps, delta, cfg).sigma;
  const double sigma_plus = calibrate_sigma(q + h, 1, eps, delta, cfg).sigma;
  const double sigma_minus = calibrate_sigma(q - h, 1, eps, delta, cfg).sigma;
  const double fd = (sigma_plus - sigma_minus) / (2.0 * h);
  const double closed_form = sigma_prime(sigma_at_q, q, eps);
  EXPECT_NEAR(closed_form, fd, 1e-2 * std::abs(fd));
}

TEST(DerivativeSign, FollowsTheCondition) {
  // a < b at a comfortably calibrated point.
  const double sigma = gaussian_sigma_single_step(1.0, 1e-5);
  EXPECT_EQ(effective_sigma_derivative_sign(sigma, 0.5, 1.0),
            SigmaEffTrend::kDecreasing);
  // Tiny sigma forces a >= b.
  EXPECT_EQ(effective_sigma_derivative_sign(0.01, 0.5, 0.1),
            SigmaEffTrend::kInconclusive);
}

TEST(DerivativeSign, DecreasingAtCalibratedSigma) {
  CalibrationConfig cfg;
  cfg.accountant.grid_step = 1e-4;
  const double sigma = calibrate_sigma(0.5, 1, 1.0, 1e-5, cfg).sigma;
  EXPECT_EQ(effective_sigma_derivative_sign(sigma, 0.5, 1.0),
            SigmaEffTrend::kDecreasing);
}

TEST(ErfConvexity, HoldsOnNegatives) {
  // Convexity of erf on the negative axis backs the sufficient
  // condition; spot-check midpoints.
  for (double x = -5.0; x < -0.2; x += 0.37) {
    for (double y = x + 0.05; y < -0.1; y += 0.3) {
      EXPECT_LE(std::erf(0.5 * (x + y)),
                0.5 * (std::erf(x) + std::erf(y)) + 1e-15);
    }
  }
}

TEST(ConjectureSweep, SmallGridStaysNegativeAndConsistent) {
  ConjectureSweepConfig cfg;
  cfg.epsilon_min = 0.25;
  cfg.epsilon_max = 2.0;
  cfg.epsilon_points = 8;
  cfg.q_points = 64;
  cfg.sigma_points = 64;
  const auto rows = conjecture_sweep(cfg);
  ASSERT_EQ(rows.size(), 8u);
  for (const auto& row : rows) {
    ASSERT_TRUE(row.feasible_found);
    EXPECT_LT(row.max_a_minus_b, 0.0);
    // Feasibility flag reproducible from the stored cell.
    const double delta =
        analytic_delta_single_step(row.argmax_sigma, row.argmax_q, row.epsilon);
    EXPECT_LE(delta, cfg.delta_target);
    EXPECT_NEAR(delta, row.achieved_delta, 1e-15);
    // The stored maximum matches a - b recomputed at the argmax.
    const AbPair ab = compute_ab(row.argmax_sigma, row.argmax_q, row.epsilon);
    EXPECT_NEAR(row.max_a_minus_b, ab.a - ab.b, 1e-12);
  }
}

TEST(ConjectureSweep, DeterministicGivenGrids) {
  ConjectureSweepConfig cfg;
  cfg.epsilon_points = 4;
  cfg.q_points = 32;
  cfg.sigma_points = 32;
  const auto first = conjecture_sweep(cfg);
  const auto second = conjecture_sweep(cfg);
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].max_a_minus_b, second[i].max_a_minus_b);
    EXPECT_EQ(first[i].argmax_sigma, second[i].argmax_sigma);
  }
}

TEST(ConjectureSweep, ValidatesConfig) {
  ConjectureSweepConfig cfg;
  cfg.delta_target = 0.3;  // q grid [1.2, 1] empty
  EXPECT_THROW(conjecture_sweep(cfg), InvalidParameterError);
  cfg = ConjectureSweepConfig{};
  cfg.epsilon_points = 0;
  EXPECT_THROW(conjecture_sweep(cfg), InvalidParameterError);
}

}  // namespace
}  // namespace subgauss
