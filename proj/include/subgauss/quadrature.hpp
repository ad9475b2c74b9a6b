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

#ifndef SUBGAUSS_QUADRATURE_HPP_
#define SUBGAUSS_QUADRATURE_HPP_

#include <functional>
#include <vector>

namespace subgauss {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

// Adaptive quadrature on [a, b] with a 15-point Gauss-Legendre panel
// rule and bisection refinement. The error estimate per panel is the
// difference between the whole-panel value and the sum of its halves.
// Throws QuadratureError if abs_tol cannot be reached within max_depth
// levels (modulo an ulp floor that stops refinement of pure roundoff).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth = 48);

// Nodes and weights of an n-point rule, computed via the Golub-Welsch
// eigenvalue method and cached per n.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(int n);

// Gauss-Hermite rule with weight exp(-t^2) on the real line.
const QuadratureRule& gauss_hermite(int n);

// E[g(X)] for X ~ N(mean, stddev^2) using an n-point Gauss-Hermite rule.
double gauss_hermite_normal_expectation(const std::function<double(double)>& g,
                                        double mean, double stddev, int n);

}  // namespace subgauss

#endif  // SUBGAUSS_QUADRATURE_HPP_
