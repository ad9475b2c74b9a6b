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

#include "subgauss/special_functions.hpp"

#include <cmath>

#include "subgauss/errors.hpp"

namespace subgauss {

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    // erfcx(-x) = 2 exp(x^2) - erfcx(x); overflows once exp(x^2) does.
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x < 26.0) {
    // erfc(x) is still a normal double here, so the product is exact to
    // within the ~x^2 ulp error of exp.
    return std::exp(x * x) * std::erfc(x);
  }
  // Asymptotic series 1/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - ...).
  const double ix2 = 1.0 / (x * x);
  const double series =
      1.0 + ix2 * (-0.5 + ix2 * (0.75 + ix2 * (-1.875 + ix2 * 6.5625)));
  return series / (x * kSqrtPi);
}

double normal_upper_quantile(double p) {
  if (!(p > 0.0) || p > 0.5) {
    throw InvalidParameterError("normal_upper_quantile: p must be in (0, 0.5]");
  }
  // Bisection on the survival function. Called once or twice per
  // discretization, so robustness beats speed.
  double lo = 0.0;
  double hi = 60.0;  // normal_sf(60) underflows to 0 < p
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * (1.0 + lo); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_sf(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace subgauss
