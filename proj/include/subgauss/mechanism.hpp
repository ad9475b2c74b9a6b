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
// Core quantities of the Poisson subsampled Gaussian mechanism under
// add/remove neighbourhood: mechanism parameters, the dominating pair
// (P, Q), the privacy loss function, and the closed-form single-step
// delta. Everything here is a pure function of its inputs and safe to
// call concurrently.

#ifndef SUBGAUSS_MECHANISM_HPP_
#define SUBGAUSS_MECHANISM_HPP_

#include <cstdint>

namespace subgauss {

// Parameters of a T-fold composition of the Poisson subsampled Gaussian
// mechanism: noise scale sigma (in units of the L2 sensitivity),
// subsampling rate q, sensitivity, and iteration count.
struct MechanismParams {
  double sigma = 1.0;
  double q = 1.0;
  double sensitivity = 1.0;
  std::int64_t iterations = 1;

  // Throws InvalidParameterError unless sigma > 0, 0 <= q <= 1,
  // sensitivity > 0 and iterations >= 1.
  void validate() const;

  // Equivalent mechanism with sensitivity exactly 1 and sigma rescaled
  // to sigma / sensitivity. Accounting is invariant under this exchange.
  MechanismParams normalized() const;
};

// An (epsilon, delta) pair. epsilon >= 0, delta in [0, 1].
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  void validate() const;
};

// Privacy loss function of one iteration with sensitivity normalized to
// 1: loss_at(t) = ln(q exp((2t - 1) / (2 sigma^2)) + (1 - q)), the log
// density ratio dP/dQ of the dominating pair. Monotone nondecreasing in
// t, and affine for q = 1.
class PrivacyLossFn {
 public:
  PrivacyLossFn(double sigma, double q);

  double sigma() const { return sigma_; }
  double q() const { return q_; }

  // Log density ratio at t; computed in log domain, stable far into both
  // tails.
  double loss_at(double t) const;

  // Inverse of loss_at on its range. Defined for loss > ln(1 - q);
  // throws InvalidParameterError outside that domain or when q == 0.
  double loss_inverse(double loss) const;

  // Infimum of the loss range: ln(1 - q), or -infinity when q == 1.
  double loss_lower_limit() const;

 private:
  double sigma_;
  double q_;
};

// Densities of the dominating pair for one normalized iteration:
//   p(t) = q N(t; 1, sigma^2) + (1 - q) N(t; 0, sigma^2)
//   q(t) = N(t; 0, sigma^2).
struct DominatingPair {
  double sigma = 1.0;
  double q = 1.0;

  double p_density(double t) const;
  double q_density(double t) const;
  // CDF and survival function of P, evaluated componentwise so both
  // tails keep relative accuracy.
  double p_cdf(double t) const;
  double p_sf(double t) const;
};

// Builds the dominating pair for params (normalized internally).
// Rejects invalid sigma or q.
DominatingPair dominating_pair_densities(const MechanismParams& params);

// Closed-form delta of a single iteration:
//   delta = q Pr(Z >= sigma ln(h/q) - 1/(2 sigma))
//           - h Pr(Z >= sigma ln(h/q) + 1/(2 sigma)),   h = e^eps - (1-q),
// with Z standard normal. q = 0 and q = 1 are exact branch cases; the
// result is clamped to [0, 1] after evaluation.
double analytic_delta_single_step(double sigma, double q, double epsilon);

// Sanity harness: true iff delta(epsilon) is nonincreasing along a
// logarithmic epsilon grid in [0.01, 10], to within 1e-12.
bool delta_monotonicity_check(double sigma, double q);

}  // namespace subgauss

#endif  // SUBGAUSS_MECHANISM_HPP_
