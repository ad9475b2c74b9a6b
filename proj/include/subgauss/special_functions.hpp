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

#ifndef SUBGAUSS_SPECIAL_FUNCTIONS_HPP_
#define SUBGAUSS_SPECIAL_FUNCTIONS_HPP_

#include <cmath>

namespace subgauss {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kInvSqrt2 = 0.7071067811865475244;
inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// Standard normal density.
inline double normal_pdf(double z) {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

// Standard normal CDF via erfc; retains full relative accuracy in the
// lower tail.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

// Standard normal survival function Pr(Z >= z); accurate in the upper
// tail where 1 - Phi(z) would lose all precision.
inline double normal_sf(double z) {
  return 0.5 * std::erfc(z * kInvSqrt2);
}

// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

// Upper-tail quantile: the z >= 0 with normal_sf(z) == p, for p in
// (0, 0.5]. Used to pick grid truncation points.
double normal_upper_quantile(double p);

// Compensated accumulator; keeps long mass sums accurate to a few ulps.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace subgauss

#endif  // SUBGAUSS_SPECIAL_FUNCTIONS_HPP_
