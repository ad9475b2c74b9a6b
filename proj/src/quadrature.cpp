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

#include "subgauss/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "subgauss/errors.hpp"
#include "subgauss/special_functions.hpp"

namespace subgauss {
namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the
// orthogonal-polynomial recurrence; weights come from the first
// component of each eigenvector scaled by the total weight mass.
QuadratureRule golub_welsch(int n, const std::vector<double>& off_diagonal,
                            double weight_mass) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    jacobi(i, i + 1) = off_diagonal[i];
    jacobi(i + 1, i) = off_diagonal[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double first = solver.eigenvectors()(0, i);
    rule.weights[i] = weight_mass * first * first;
  }
  return rule;
}

QuadratureRule make_gauss_legendre(int n) {
  std::vector<double> beta(n - 1);
  for (int k = 1; k < n; ++k) {
    beta[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  }
  return golub_welsch(n, beta, 2.0);
}

QuadratureRule make_gauss_hermite(int n) {
  std::vector<double> beta(n - 1);
  for (int k = 1; k < n; ++k) {
    beta[k - 1] = std::sqrt(0.5 * k);
  }
  return golub_welsch(n, beta, kSqrtPi);
}

const QuadratureRule& cached_rule(int n, bool hermite) {
  static std::mutex mutex;
  static std::map<std::pair<int, bool>, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(n, hermite);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, hermite ? make_gauss_hermite(n)
                                    : make_gauss_legendre(n))
             .first;
  }
  return it->second;
}

double panel(const std::function<double(double)>& f, double a, double b,
             const QuadratureRule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

struct AdaptiveState {
  const std::function<double(double)>* f;
  const QuadratureRule* rule;
  long evaluations = 0;
  double error = 0.0;
};

double refine(AdaptiveState& state, double a, double b, double whole,
              double tol, int depth, int max_depth) {
  const double mid = 0.5 * (a + b);
  const double left = panel(*state.f, a, mid, *state.rule);
  const double right = panel(*state.f, mid, b, *state.rule);
  state.evaluations += 2 * static_cast<long>(state.rule->nodes.size());
  const double refined = left + right;
  const double err = std::abs(refined - whole);
  const double floor =
      64.0 * std::numeric_limits<double>::epsilon() * std::abs(refined);
  if (err <= tol || err <= floor) {
    state.error += err;
    return refined;
  }
  if (depth >= max_depth) {
    throw QuadratureError("integrate_adaptive: tolerance unreachable");
  }
  return refine(state, a, mid, left, 0.5 * tol, depth + 1, max_depth) +
         refine(state, mid, b, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth) {
  if (!(abs_tol > 0.0) || !(b > a)) {
    throw InvalidParameterError("integrate_adaptive: bad interval or tolerance");
  }
  AdaptiveState state;
  state.f = &f;
  state.rule = &gauss_legendre(15);
  const double whole = panel(f, a, b, *state.rule);
  state.evaluations = static_cast<long>(state.rule->nodes.size());
  QuadratureResult result;
  result.value = refine(state, a, b, whole, abs_tol, 0, max_depth);
  result.error_estimate = state.error;
  result.evaluations = state.evaluations;
  return result;
}

const QuadratureRule& gauss_legendre(int n) {
  if (n < 2) throw InvalidParameterError("gauss_legendre: n must be >= 2");
  return cached_rule(n, false);
}

const QuadratureRule& gauss_hermite(int n) {
  if (n < 2) throw InvalidParameterError("gauss_hermite: n must be >= 2");
  return cached_rule(n, true);
}

double gauss_hermite_normal_expectation(const std::function<double(double)>& g,
                                        double mean, double stddev, int n) {
  const QuadratureRule& rule = gauss_hermite(n);
  double sum = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * g(mean + kSqrt2 * stddev * rule.nodes[i]);
  }
  return sum / kSqrtPi;
}

}  // namespace subgauss
