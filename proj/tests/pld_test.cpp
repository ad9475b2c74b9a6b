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

#include "subgauss/pld.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "subgauss/errors.hpp"

namespace subgauss {
namespace {

AccountantConfig fast_config() {
  AccountantConfig cfg;
  cfg.grid_step = 1e-4;  // coarse grid keeps unit tests quick
  return cfg;
}

TEST(Discretize, MassSumsToOne) {
  const PrivacyLossFn fn(2.0, 0.2);
  for (Rounding r : {Rounding::kPessimistic, Rounding::kOptimistic}) {
    const DiscretePld pld = discretize(fn, fast_config(), r);
    EXPECT_NEAR(pld.total_mass(), 1.0, 1e-12);
    for (double m : pld.masses) EXPECT_GE(m, 0.0);
    EXPECT_GT(pld.grid_step, 0.0);
  }
}

TEST(Discretize, FullBatchMeanMatchesGaussianPlrv) {
  // q = 1, sigma = 1: the loss is affine in t and the PLRV is
  // N(mu, 2 mu) with mu = 1/(2 sigma^2) = 0.5.
  const PrivacyLossFn fn(1.0, 1.0);
  const AccountantConfig cfg = fast_config();
  const DiscretePld pld = discretize(fn, cfg, Rounding::kPessimistic);
  EXPECT_NEAR(pld.mean(), 0.5, cfg.grid_step);
  EXPECT_NEAR(pld.variance(), 1.0, 0.01);
}

TEST(Discretize, QZeroIsPointMassAtZero) {
  const PrivacyLossFn fn(1.0, 0.0);
  const DiscretePld pld = discretize(fn, fast_config(), Rounding::kPessimistic);
  ASSERT_EQ(pld.masses.size(), 1u);
  EXPECT_DOUBLE_EQ(pld.masses[0], 1.0);
  EXPECT_DOUBLE_EQ(pld.grid_origin, 0.0);
  EXPECT_DOUBLE_EQ(delta_from_pld(pld, 1.0), 0.0);
}

TEST(Discretize, SandwichesAnalyticDelta) {
  const AccountantConfig cfg = fast_config();
  const PrivacyLossFn fn(2.0, 0.2);
  const DiscretePld pess = discretize(fn, cfg, Rounding::kPessimistic);
  const DiscretePld opt = pess.with_rounding(Rounding::kOptimistic);
  const double exact = analytic_delta_single_step(2.0, 0.2, 1.0);
  const double hi = delta_from_pld(pess, 1.0);
  const double lo = delta_from_pld(opt, 1.0);
  EXPECT_GE(hi, exact);
  EXPECT_LE(lo, exact);
  EXPECT_LE(hi - lo, 2.0 * cfg.grid_step);
}

TEST(Discretize, HalvingStepHalvesSandwichGap) {
  AccountantConfig coarse = fast_config();
  AccountantConfig fine = fast_config();
  fine.grid_step = coarse.grid_step / 2.0;
  const PrivacyLossFn fn(1.0, 0.3);
  const auto gap = [&](const AccountantConfig& cfg) {
    const DiscretePld pess = discretize(fn, cfg, Rounding::kPessimistic);
    return delta_from_pld(pess, 0.5) -
           delta_from_pld(pess.with_rounding(Rounding::kOptimistic), 0.5);
  };
  EXPECT_LE(gap(fine), 0.6 * gap(coarse));
}

TEST(Discretize, GridOverflowRaises) {
  AccountantConfig cfg = fast_config();
  cfg.max_grid_points = 1000;
  const PrivacyLossFn fn(0.5, 1.0);
  EXPECT_THROW(discretize(fn, cfg, Rounding::kPessimistic), GridOverflowError);
}

TEST(SelfCompose, IdentityForSingleIteration) {
  const PrivacyLossFn fn(1.0, 0.4);
  const DiscretePld pld = discretize(fn, fast_config(), Rounding::kPessimistic);
  const DiscretePld composed = self_compose(pld, 1, fast_config());
  EXPECT_EQ(composed.grid_origin, pld.grid_origin);
  EXPECT_EQ(composed.masses, pld.masses);
  EXPECT_EQ(composed.top_tail_mass, pld.top_tail_mass);
  EXPECT_EQ(composed.bottom_tail_mass, pld.bottom_tail_mass);
}

TEST(SelfCompose, GaussianMeanAndVarianceScale) {
  // Four compositions at q = 1, sigma = 1: PLRV becomes N(4 mu, 8 mu).
  const AccountantConfig cfg = fast_config();
  const PrivacyLossFn fn(1.0, 1.0);
  const DiscretePld single = discretize(fn, cfg, Rounding::kPessimistic);
  const DiscretePld composed = self_compose(single, 4, cfg);
  EXPECT_NEAR(composed.mean(), 2.0, 2.0 * cfg.grid_step * 4);
  EXPECT_NEAR(composed.variance(), 4.0, 0.01);
  EXPECT_NEAR(composed.total_mass(), 1.0, 1e-12);
}

TEST(SelfCompose, AssociativeUpToAlignment) {
  const AccountantConfig cfg = fast_config();
  const PrivacyLossFn fn(1.0, 0.25);
  const DiscretePld single = discretize(fn, cfg, Rounding::kPessimistic);
  const DiscretePld six = self_compose(single, 6, cfg);
  const DiscretePld two_three =
      self_compose(self_compose(single, 2, cfg), 3, cfg);
  // The two routes may trim at different points; their grids differ by a
  // whole number of steps.
  const double shift = (two_three.grid_origin - six.grid_origin) / cfg.grid_step;
  const std::int64_t offset = static_cast<std::int64_t>(std::llround(shift));
  ASSERT_NEAR(shift, static_cast<double>(offset), 1e-6);
  for (std::size_t i = 0; i < six.masses.size(); ++i) {
    const std::int64_t j = static_cast<std::int64_t>(i) - offset;
    const double other =
        (j >= 0 && j < static_cast<std::int64_t>(two_three.masses.size()))
            ? two_three.masses[static_cast<std::size_t>(j)]
            : 0.0;
    EXPECT_NEAR(six.masses[i], other, 1e-10);
  }
}

TEST(SelfCompose, MatchesMonteCarloAfterEightCompositions) {
  const AccountantConfig cfg = fast_config();
  const double sigma = 1.0, q = 0.1, eps = 2.0;
  const PrivacyLossFn fn(sigma, q);
  const DiscretePld single = discretize(fn, cfg, Rounding::kPessimistic);
  const DiscretePld composed = self_compose(single, 8, cfg);
  const double hi = delta_from_pld(composed, eps);
  const double lo = delta_from_pld(
      self_compose(single.with_rounding(Rounding::kOptimistic), 8, cfg), eps);
  const auto mc = testing::mc_plrv_delta(sigma, q, 8, eps, 1000000, 77);
  EXPECT_LE(lo - 4.0 * mc.stderr_, mc.estimate);
  EXPECT_GE(hi + 4.0 * mc.stderr_, mc.estimate);
}

TEST(DeltaFromPld, VanishesAboveSupport) {
  const PrivacyLossFn fn(1.0, 0.5);
  const DiscretePld pld = discretize(fn, fast_config(), Rounding::kPessimistic);
  const double top = pld.loss_at(pld.masses.size() - 1);
  EXPECT_LE(delta_from_pld(pld, top + 1.0), pld.top_tail_mass + 1e-18);
}

TEST(DeltaFromPld, FullBatchMatchesAnalyticWithinSlack) {
  const AccountantConfig cfg = fast_config();
  const PrivacyLossFn fn(2.0, 1.0);
  const DiscretePld pess = discretize(fn, cfg, Rounding::kPessimistic);
  const double exact = analytic_delta_single_step(2.0, 1.0, 1.0);
  EXPECT_GE(delta_from_pld(pess, 1.0), exact);
  EXPECT_LE(delta_from_pld(pess, 1.0), exact + 2.0 * cfg.grid_step);
}

TEST(DeltaFromPld, NonincreasingInEpsilonAndBounded) {
  const PrivacyLossFn fn(0.8, 0.3);
  const AccountantConfig cfg = fast_config();
  const DiscretePld pld =
      self_compose(discretize(fn, cfg, Rounding::kPessimistic), 4, cfg);
  double previous = 2.0;
  for (double eps = 0.0; eps <= 8.0; eps += 0.25) {
    const double delta = delta_from_pld(pld, eps);
    EXPECT_GE(delta, 0.0);
    EXPECT_LE(delta, 1.0);
    EXPECT_LE(delta, previous + 1e-15);
    previous = delta;
  }
}

TEST(DeltaFromPld, SandwichHoldsOnParamGrid) {
  const AccountantConfig cfg = fast_config();
  for (double sigma : {0.7, 1.5, 4.0}) {
    for (double q : {0.05, 0.5, 1.0}) {
      const PrivacyLossFn fn(sigma, q);
      const DiscretePld pess = discretize(fn, cfg, Rounding::kPessimistic);
      const DiscretePld opt = pess.with_rounding(Rounding::kOptimistic);
      for (double eps : {0.1, 1.0, 3.0}) {
        const double exact = analytic_delta_single_step(sigma, q, eps);
        EXPECT_GE(delta_from_pld(pess, eps), exact)
            << "sigma=" << sigma << " q=" << q << " eps=" << eps;
        EXPECT_LE(delta_from_pld(opt, eps), exact)
            << "sigma=" << sigma << " q=" << q << " eps=" << eps;
      }
    }
  }
}

TEST(DeltaFromPld, PlrvMomentBoundsHoldOnGrid) {
  const AccountantConfig cfg = fast_config();
  for (double sigma : {0.7, 1.3, 3.0}) {
    for (double q : {0.1, 0.6, 1.0}) {
      const PrivacyLossFn fn(sigma, q);
      const DiscretePld pld = discretize(fn, cfg, Rounding::kPessimistic);
      const double slack = 2.0 * cfg.grid_step;
      EXPECT_GE(pld.mean(), q * q / (2.0 * sigma * sigma) - slack);
      EXPECT_LE(pld.variance(),
                1.0 / (sigma * sigma) +
                    1.0 / (4.0 * sigma * sigma * sigma * sigma) + slack);
    }
  }
}

TEST(DumpCsv, EmitsHeaderRowsAndFooter) {
  AccountantConfig cfg = fast_config();
  cfg.grid_step = 0.5;  // tiny dump
  const PrivacyLossFn fn(1.0, 0.5);
  const DiscretePld pld = discretize(fn, cfg, Rounding::kPessimistic);
  std::ostringstream os;
  dump_csv(pld, os);
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("loss,mass\n", 0), 0u);
  EXPECT_NE(text.find("# top_tail="), std::string::npos);
  EXPECT_NE(text.find(" bottom_tail="), std::string::npos);
  EXPECT_NE(text.find(" step="), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'),
            static_cast<std::ptrdiff_t>(pld.masses.size()) + 2);
}

TEST(AccountantConfig, Validates) {
  AccountantConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.grid_step = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidParameterError);
  cfg = AccountantConfig{};
  cfg.tail_mass_budget = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidParameterError);
}

}  // namespace
}  // namespace subgauss
