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

#include "subgauss/calibrator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "subgauss/errors.hpp"

namespace subgauss {
namespace {

// delta at (sigma, q, T, eps) for the requested rounding, falling back
// to a coarser grid when the configured one overflows. A pessimistic
// value is an upper bound and an optimistic value a lower bound at any
// resolution, so coarse answers are still decisive for bracketing.
std::optional<double> pld_delta(double sigma, double q, std::int64_t T,
                                double epsilon, const AccountantConfig& acc,
                                Rounding rounding) {
  AccountantConfig cfg = acc;
  const PrivacyLossFn fn(sigma, q);
  for (int coarsening = 0; coarsening <= 20; ++coarsening) {
    try {
      const DiscretePld single = discretize(fn, cfg, rounding);
      const DiscretePld composed = self_compose(single, T, cfg);
      return delta_from_pld(composed, epsilon);
    } catch (const GridOverflowError&) {
      cfg.grid_step *= 2.0;
    }
  }
  return std::nullopt;
}

struct Probe {
  bool feasible = false;
  bool exact = false;  // evaluated at the configured resolution
  double delta_pessimistic = 0.0;
};

// Feasibility of sigma against the target, decided with rigorous bounds
// only: a pessimistic delta <= target proves feasibility at any
// resolution, a single-step analytic delta > target (composition can
// only leak more) or an optimistic delta > target proves infeasibility.
// Indecisive coarse probes count as infeasible, which biases the
// bracket upward, never below the target.
Probe probe_sigma(double sigma, double q, std::int64_t T, double epsilon,
                  double delta_target, const AccountantConfig& acc,
                  std::int64_t& evaluations) {
  Probe probe;
  ++evaluations;
  if (analytic_delta_single_step(sigma, q, epsilon) > delta_target) {
    return probe;
  }

  AccountantConfig cfg = acc;
  const PrivacyLossFn fn(sigma, q);
  for (int coarsening = 0; coarsening <= 20; ++coarsening) {
    try {
      const DiscretePld single = discretize(fn, cfg, Rounding::kPessimistic);
      const DiscretePld composed = self_compose(single, T, cfg);
      const double pessimistic = delta_from_pld(composed, epsilon);
      probe.exact = (coarsening == 0);
      probe.delta_pessimistic = pessimistic;
      if (pessimistic <= delta_target) {
        probe.feasible = true;
        return probe;
      }
      if (probe.exact) return probe;
      // Coarse and pessimistic says no: confirm with the lower bound
      // before declaring this sigma infeasible for real.
      const DiscretePld optimistic =
          self_compose(single.with_rounding(Rounding::kOptimistic), T, cfg);
      if (delta_from_pld(optimistic, epsilon) > delta_target) return probe;
      // Sandwich straddles the target at this resolution; treat as
      // infeasible (safe side) since refining is not affordable here.
      return probe;
    } catch (const GridOverflowError&) {
      cfg.grid_step *= 2.0;
    }
  }
  return probe;  // unresolvable: treated as infeasible
}

}  // namespace

void CalibrationConfig::validate() const {
  accountant.validate();
  if (!(relative_tolerance > 0.0) || relative_tolerance >= 1.0) {
    throw InvalidParameterError(
        "CalibrationConfig: relative_tolerance must be in (0, 1)");
  }
  if (max_bracket_doublings < 1) {
    throw InvalidParameterError("CalibrationConfig: max_bracket_doublings < 1");
  }
}

double gaussian_sigma_single_step(double epsilon, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw InvalidParameterError(
        "gaussian_sigma_single_step: delta must be in (0, 1)");
  }
  if (!(epsilon >= 0.0)) {
    throw InvalidParameterError("gaussian_sigma_single_step: epsilon < 0");
  }
  const auto delta_at = [&](double sigma) {
    return analytic_delta_single_step(sigma, 1.0, epsilon);
  };
  double lo = 1.0, hi = 1.0;
  if (delta_at(1.0) > delta) {
    for (int i = 0; i < 200 && delta_at(hi) > delta; ++i) hi *= 2.0;
  } else {
    for (int i = 0; i < 200 && delta_at(lo) <= delta; ++i) lo *= 0.5;
  }
  if (!(delta_at(lo) > delta) || !(delta_at(hi) <= delta)) {
    throw CalibrationError("gaussian_sigma_single_step: cannot bracket delta");
  }
  while ((hi - lo) > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (delta_at(mid) <= delta ? hi : lo) = mid;
  }
  return hi;
}

CalibrationResult calibrate_sigma(double q, std::int64_t iterations,
                                  double epsilon, double delta_target,
                                  const CalibrationConfig& cfg) {
  cfg.validate();
  if (!(q > 0.0) || !(q <= 1.0)) {
    throw InvalidParameterError("calibrate_sigma: q must be in (0, 1]");
  }
  if (iterations < 1) {
    throw InvalidParameterError("calibrate_sigma: iterations must be >= 1");
  }
  if (!(epsilon >= 0.0)) {
    throw InvalidParameterError("calibrate_sigma: epsilon must be >= 0");
  }
  if (!(delta_target > 0.0) || !(delta_target < 1.0)) {
    throw InvalidParameterError("calibrate_sigma: delta_target must be in (0,1)");
  }

  // As sigma -> 0 the composed delta tends to 1 - (1-q)^T; at or above
  // that ceiling no smallest sigma exists.
  const double ceiling =
      (q == 1.0) ? 1.0 : -std::expm1(static_cast<double>(iterations) * std::log1p(-q));
  if (delta_target >= ceiling) {
    throw CalibrationError(
        "calibrate_sigma: delta target at or above the achievable ceiling");
  }

  std::int64_t evaluations = 0;
  const auto feasible = [&](double sigma) {
    return probe_sigma(sigma, q, iterations, epsilon, delta_target,
                       cfg.accountant, evaluations);
  };

  const double guess = q * gaussian_sigma_single_step(epsilon, delta_target) *
                       std::sqrt(static_cast<double>(iterations));
  double lo = guess, hi = guess;
  Probe hi_probe = feasible(guess);
  if (hi_probe.feasible) {
    bool straddled = false;
    for (int i = 0; i < cfg.max_bracket_doublings; ++i) {
      const double candidate = lo * 0.5;
      const Probe p = feasible(candidate);
      if (!p.feasible) {
        lo = candidate;
        straddled = true;
        break;
      }
      lo = candidate;
      hi = candidate;
      hi_probe = p;
    }
    if (!straddled) {
      throw CalibrationError("calibrate_sigma: bracket cannot straddle target");
    }
  } else {
    bool straddled = false;
    for (int i = 0; i < cfg.max_bracket_doublings; ++i) {
      const double candidate = hi * 2.0;
      const Probe p = feasible(candidate);
      if (p.feasible) {
        hi = candidate;
        hi_probe = p;
        straddled = true;
        break;
      }
      lo = candidate;
      hi = candidate;
    }
    if (!straddled) {
      throw CalibrationError("calibrate_sigma: bracket cannot straddle target");
    }
  }

  while ((hi - lo) > cfg.relative_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    const Probe p = feasible(mid);
    if (p.feasible) {
      hi = mid;
      hi_probe = p;
    } else {
      lo = mid;
    }
  }

  CalibrationResult result;
  result.sigma = hi;
  result.bracket_low = lo;
  result.bracket_high = hi;
  result.evaluations = evaluations;
  result.sigma_eff = hi / q;
  result.achieved_delta = hi_probe.delta_pessimistic;
  if (!hi_probe.exact) {
    // The final sigma was only certified at a coarse resolution; record
    // the configured-resolution value when it fits.
    if (auto exact = pld_delta(hi, q, iterations, epsilon, cfg.accountant,
                               Rounding::kPessimistic)) {
      result.achieved_delta = std::min(*exact, hi_probe.delta_pessimistic);
    }
  }
  if (auto optimistic = pld_delta(hi, q, iterations, epsilon, cfg.accountant,
                                  Rounding::kOptimistic)) {
    result.achieved_delta_optimistic = *optimistic;
  }
  return result;
}

double convergence_ratio(double q, std::int64_t iterations, double epsilon,
                         double delta_target, const CalibrationConfig& cfg) {
  const CalibrationResult subsampled =
      calibrate_sigma(q, iterations, epsilon, delta_target, cfg);
  if (q == 1.0) return 1.0;  // same calibration twice by definition
  const CalibrationResult full_batch =
      calibrate_sigma(1.0, iterations, epsilon, delta_target, cfg);
  return subsampled.sigma / (q * full_batch.sigma);
}

}  // namespace subgauss
