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

#include "subgauss/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subgauss/errors.hpp"
#include "subgauss/special_functions.hpp"

namespace subgauss {

void MechanismParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidParameterError("MechanismParams: sigma must be positive");
  }
  if (!(q >= 0.0) || !(q <= 1.0)) {
    throw InvalidParameterError("MechanismParams: q must be in [0, 1]");
  }
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    throw InvalidParameterError("MechanismParams: sensitivity must be positive");
  }
  if (iterations < 1) {
    throw InvalidParameterError("MechanismParams: iterations must be >= 1");
  }
}

MechanismParams MechanismParams::normalized() const {
  validate();
  return MechanismParams{sigma / sensitivity, q, 1.0, iterations};
}

void PrivacyBudget::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameterError("PrivacyBudget: epsilon must be >= 0");
  }
  if (!(delta >= 0.0) || !(delta <= 1.0)) {
    throw InvalidParameterError("PrivacyBudget: delta must be in [0, 1]");
  }
}

PrivacyLossFn::PrivacyLossFn(double sigma, double q) : sigma_(sigma), q_(q) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidParameterError("PrivacyLossFn: sigma must be positive");
  }
  if (!(q >= 0.0) || !(q <= 1.0)) {
    throw InvalidParameterError("PrivacyLossFn: q must be in [0, 1]");
  }
}

double PrivacyLossFn::loss_at(double t) const {
  const double x = (2.0 * t - 1.0) / (2.0 * sigma_ * sigma_);
  if (q_ == 1.0) return x;
  if (q_ == 0.0) return 0.0;
  if (x >= 0.0) {
    // ln(q e^x (1 + (1-q)/(q e^x)))
    return x + std::log(q_) + std::log1p((1.0 - q_) / q_ * std::exp(-x));
  }
  // ln(1 + q (e^x - 1)); exact as x -> -inf where the loss tends to
  // ln(1 - q).
  return std::log1p(q_ * std::expm1(x));
}

double PrivacyLossFn::loss_inverse(double loss) const {
  if (q_ == 0.0) {
    throw InvalidParameterError("loss_inverse: undefined for q == 0");
  }
  double g;  // ln((e^loss - (1-q)) / q)
  if (q_ == 1.0) {
    g = loss;
  } else {
    const double lower = std::log1p(-q_);
    const double d = loss - lower;
    if (!(d > 0.0)) {
      throw InvalidParameterError("loss_inverse: loss at or below ln(1-q)");
    }
    if (d < 0.5) {
      // e^loss - (1-q) = (1-q) expm1(d)
      g = lower + std::log(std::expm1(d)) - std::log(q_);
    } else {
      g = loss + std::log1p(-std::exp(lower - loss)) - std::log(q_);
    }
  }
  return sigma_ * sigma_ * g + 0.5;
}

double PrivacyLossFn::loss_lower_limit() const {
  if (q_ == 1.0) return -std::numeric_limits<double>::infinity();
  return std::log1p(-q_);
}

double DominatingPair::p_density(double t) const {
  const double inv = 1.0 / sigma;
  return (q * normal_pdf((t - 1.0) * inv) + (1.0 - q) * normal_pdf(t * inv)) *
         inv;
}

double DominatingPair::q_density(double t) const {
  const double inv = 1.0 / sigma;
  return normal_pdf(t * inv) * inv;
}

double DominatingPair::p_cdf(double t) const {
  const double inv = 1.0 / sigma;
  return q * normal_cdf((t - 1.0) * inv) + (1.0 - q) * normal_cdf(t * inv);
}

double DominatingPair::p_sf(double t) const {
  const double inv = 1.0 / sigma;
  return q * normal_sf((t - 1.0) * inv) + (1.0 - q) * normal_sf(t * inv);
}

DominatingPair dominating_pair_densities(const MechanismParams& params) {
  const MechanismParams normalized = params.normalized();
  return DominatingPair{normalized.sigma, normalized.q};
}

double analytic_delta_single_step(double sigma, double q, double epsilon) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidParameterError("analytic_delta_single_step: sigma must be > 0");
  }
  if (!(q >= 0.0) || !(q <= 1.0)) {
    throw InvalidParameterError("analytic_delta_single_step: q must be in [0,1]");
  }
  if (!(epsilon >= 0.0)) {
    throw InvalidParameterError(
        "analytic_delta_single_step: epsilon must be >= 0");
  }
  if (q == 0.0) return 0.0;  // P == Q

  double h;       // e^eps - (1 - q)
  double log_hq;  // ln(h / q)
  if (q == 1.0) {
    h = std::exp(epsilon);
    log_hq = epsilon;
  } else {
    const double em = std::expm1(epsilon);
    h = em + q;
    log_hq = std::log1p(em / q);
  }
  const double a = sigma * log_hq;
  const double c = 1.0 / (2.0 * sigma);
  const double delta = q * normal_sf(a - c) - h * normal_sf(a + c);
  return std::clamp(delta, 0.0, 1.0);
}

bool delta_monotonicity_check(double sigma, double q) {
  constexpr int kPoints = 200;
  const double lo = std::log(0.01);
  const double hi = std::log(10.0);
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kPoints; ++i) {
    const double eps = std::exp(lo + (hi - lo) * i / (kPoints - 1));
    const double delta = analytic_delta_single_step(sigma, q, eps);
    if (delta > previous + 1e-12) return false;
    previous = delta;
  }
  return true;
}

}  // namespace subgauss
