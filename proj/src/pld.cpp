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

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <ostream>

#include "subgauss/errors.hpp"
#include "subgauss/special_functions.hpp"

namespace subgauss {
namespace {

// Refresh interval for multiplicative exp recurrences; keeps the drift
// below a few hundred ulps.
constexpr std::int64_t kRecurrenceBlock = 4096;

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// Smallest 5-smooth integer >= n; FFTW handles these sizes efficiently.
std::int64_t next_fft_size(std::int64_t n) {
  if (n <= 16) return 16;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::int64_t f5 = 1; f5 < best; f5 *= 5) {
    for (std::int64_t f35 = f5; f35 < best; f35 *= 3) {
      std::int64_t f = f35;
      while (f < n) f *= 2;
      best = std::min(best, f);
    }
  }
  return best;
}

struct MixtureComponent {
  double mean;
  double weight;
};

// Streams Phi((t_k - mean)/sigma) differences along an increasing
// sequence of edges, evaluating erfc in whichever tail is small so every
// bin mass keeps relative accuracy.
class ComponentCdfWalker {
 public:
  ComponentCdfWalker(double mean, double sigma)
      : mean_(mean), inv_scale_(1.0 / (sigma * kSqrt2)) {}

  void start(double t) {
    prev_arg_ = (t - mean_) * inv_scale_;
    prev_half_erfc_ = 0.5 * std::erfc(std::abs(prev_arg_));
  }

  // Phi(next) - Phi(previous edge); advances the walker.
  double advance(double t) {
    const double arg = (t - mean_) * inv_scale_;
    const double half_erfc = 0.5 * std::erfc(std::abs(arg));
    double mass;
    if (prev_arg_ >= 0.0) {
      mass = prev_half_erfc_ - half_erfc;  // both in the upper tail
    } else if (arg <= 0.0) {
      mass = half_erfc - prev_half_erfc_;  // both in the lower tail
    } else {
      mass = 1.0 - half_erfc - prev_half_erfc_;  // straddles the mean
    }
    prev_arg_ = arg;
    prev_half_erfc_ = half_erfc;
    return mass;
  }

 private:
  double mean_;
  double inv_scale_;
  double prev_arg_ = 0.0;
  double prev_half_erfc_ = 0.0;
};

// Finite mass of a PLD as seen by a pessimistic convolution, where the
// bottom tail rides along at the grid origin.
double finite_mass(const DiscretePld& pld) {
  KahanSum sum;
  for (double m : pld.masses) sum.add(m);
  if (pld.rounding == Rounding::kPessimistic) sum.add(pld.bottom_tail_mass);
  return sum.value();
}

// Trims both grid ends, spending at most `slice` of mass per side.
// Pessimistic: trimmed bottom mass is folded into the new origin bin
// (moved up), trimmed top mass joins the +infinity tail. Optimistic:
// trimmed mass joins the matching tail, where delta ignores it.
void trim(DiscretePld& pld, double slice) {
  const std::size_t n = pld.masses.size();
  std::size_t lo = 0;
  double cut_lo = 0.0;
  while (lo + 1 < n && cut_lo + pld.masses[lo] <= slice) {
    cut_lo += pld.masses[lo];
    ++lo;
  }
  std::size_t hi = n;  // one past the last kept bin
  double cut_hi = 0.0;
  while (hi > lo + 1 && cut_hi + pld.masses[hi - 1] <= slice) {
    cut_hi += pld.masses[hi - 1];
    --hi;
  }
  if (lo == 0 && hi == n && cut_lo == 0.0 && cut_hi == 0.0) return;
  pld.masses.erase(pld.masses.begin() + hi, pld.masses.end());
  pld.masses.erase(pld.masses.begin(), pld.masses.begin() + lo);
  pld.grid_origin += static_cast<double>(lo) * pld.grid_step;
  pld.top_tail_mass += cut_hi;
  if (pld.rounding == Rounding::kPessimistic) {
    pld.masses.front() += cut_lo;
  } else {
    pld.bottom_tail_mass += cut_lo;
  }
}

int checked_fft_length(std::int64_t n_out, const AccountantConfig& cfg) {
  if (n_out > cfg.max_grid_points) {
    throw GridOverflowError("self_compose: convolution exceeds max_grid_points");
  }
  const std::int64_t padded = next_fft_size(n_out);
  if (padded > std::numeric_limits<int>::max()) {
    throw GridOverflowError("self_compose: FFT size exceeds int range");
  }
  return static_cast<int>(padded);
}

// Linear convolution of a and b via a zero-padded real FFT.
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b,
                                 double a_extra_bin0, double b_extra_bin0,
                                 int padded, std::int64_t n_out) {
  const bool same = (&a == &b) && (a_extra_bin0 == b_extra_bin0);
  const int n_complex = padded / 2 + 1;

  double* in = fftw_alloc_real(padded);
  fftw_complex* spec_a = fftw_alloc_complex(n_complex);
  fftw_complex* spec_b = same ? nullptr : fftw_alloc_complex(n_complex);

  fftw_plan forward, inverse;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    forward = fftw_plan_dft_r2c_1d(padded, in, spec_a, FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(padded, spec_a, in, FFTW_ESTIMATE);
  }

  std::memcpy(in, a.data(), a.size() * sizeof(double));
  std::memset(in + a.size(), 0, (padded - a.size()) * sizeof(double));
  in[0] += a_extra_bin0;
  fftw_execute_dft_r2c(forward, in, spec_a);

  if (!same) {
    std::memcpy(in, b.data(), b.size() * sizeof(double));
    std::memset(in + b.size(), 0, (padded - b.size()) * sizeof(double));
    in[0] += b_extra_bin0;
    fftw_execute_dft_r2c(forward, in, spec_b);
    for (int i = 0; i < n_complex; ++i) {
      const double re = spec_a[i][0] * spec_b[i][0] - spec_a[i][1] * spec_b[i][1];
      const double im = spec_a[i][0] * spec_b[i][1] + spec_a[i][1] * spec_b[i][0];
      spec_a[i][0] = re;
      spec_a[i][1] = im;
    }
  } else {
    for (int i = 0; i < n_complex; ++i) {
      const double re = spec_a[i][0] * spec_a[i][0] - spec_a[i][1] * spec_a[i][1];
      const double im = 2.0 * spec_a[i][0] * spec_a[i][1];
      spec_a[i][0] = re;
      spec_a[i][1] = im;
    }
  }

  fftw_execute_dft_c2r(inverse, spec_a, in);
  const double scale = 1.0 / padded;
  std::vector<double> out(static_cast<std::size_t>(n_out));
  for (std::int64_t i = 0; i < n_out; ++i) out[static_cast<std::size_t>(i)] = in[i] * scale;

  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
  fftw_free(in);
  fftw_free(spec_a);
  if (spec_b) fftw_free(spec_b);
  return out;
}

// Convolves two PLDs that share a grid step and rounding mode, then
// re-trims the result within the given tail slice.
DiscretePld convolve(const DiscretePld& a, const DiscretePld& b,
                     const AccountantConfig& cfg, double slice) {
  const std::int64_t n_out =
      static_cast<std::int64_t>(a.masses.size()) + static_cast<std::int64_t>(b.masses.size()) - 1;
  const int padded = checked_fft_length(n_out, cfg);
  const bool pessimistic = a.rounding == Rounding::kPessimistic;

  const double fa = finite_mass(a);
  const double fb = finite_mass(b);
  const double a_fold = pessimistic ? a.bottom_tail_mass : 0.0;
  const double b_fold = pessimistic ? b.bottom_tail_mass : 0.0;

  DiscretePld out;
  out.grid_origin = a.grid_origin + b.grid_origin;
  out.grid_step = a.grid_step;
  out.rounding = a.rounding;
  out.masses = fft_convolve(a.masses, b.masses, a_fold, b_fold, padded, n_out);

  // Negative-mass cleanup: clamp FFT roundoff at zero, then restore the
  // exact product mass. Anything beyond 1e-9 of drift is a bug, not
  // roundoff.
  KahanSum clamped;
  for (double& m : out.masses) {
    if (m < 0.0) m = 0.0;
    clamped.add(m);
  }
  const double target = fa * fb;
  const double drift = std::abs(clamped.value() - target);
  if (drift >= 1e-9) {
    throw MassDriftError("self_compose: convolution mass drift exceeds 1e-9");
  }
  if (clamped.value() > 0.0 && target > 0.0) {
    const double rescale = target / clamped.value();
    for (double& m : out.masses) m *= rescale;
  }

  // Tail samples: anything touching a truncated tail is pinned to the
  // tail that preserves this rounding mode's bound direction.
  if (pessimistic) {
    out.top_tail_mass = a.top_tail_mass + b.top_tail_mass -
                        a.top_tail_mass * b.top_tail_mass;
    out.bottom_tail_mass = 0.0;
  } else {
    const double ta = a.top_tail_mass + a.bottom_tail_mass;
    const double tb = b.top_tail_mass + b.bottom_tail_mass;
    out.bottom_tail_mass = ta + tb - ta * tb;
    out.top_tail_mass = 0.0;
  }

  trim(out, slice);
  return out;
}

}  // namespace

void AccountantConfig::validate() const {
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
    throw InvalidParameterError("AccountantConfig: grid_step must be > 0");
  }
  if (!(tail_mass_budget > 0.0) || tail_mass_budget >= 1.0) {
    throw InvalidParameterError(
        "AccountantConfig: tail_mass_budget must be in (0, 1)");
  }
  if (max_grid_points < 16) {
    throw InvalidParameterError("AccountantConfig: max_grid_points too small");
  }
}

double DiscretePld::total_mass() const {
  KahanSum sum;
  for (double m : masses) sum.add(m);
  sum.add(top_tail_mass);
  sum.add(bottom_tail_mass);
  return sum.value();
}

double DiscretePld::mean() const {
  KahanSum sum;
  for (std::size_t i = 0; i < masses.size(); ++i) sum.add(masses[i] * loss_at(i));
  sum.add(bottom_tail_mass * grid_origin);
  return sum.value();
}

double DiscretePld::variance() const {
  const double mu = mean();
  KahanSum sum;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double d = loss_at(i) - mu;
    sum.add(masses[i] * d * d);
  }
  const double d0 = grid_origin - mu;
  sum.add(bottom_tail_mass * d0 * d0);
  return sum.value();
}

DiscretePld DiscretePld::with_rounding(Rounding r) const {
  DiscretePld out = *this;
  if (r == rounding) return out;
  // Pessimistic bins sit one step above the optimistic bins for the same
  // underlying intervals.
  out.grid_origin += (r == Rounding::kPessimistic ? grid_step : -grid_step);
  out.rounding = r;
  return out;
}

DiscretePld discretize(const PrivacyLossFn& fn, const AccountantConfig& cfg,
                       Rounding rounding) {
  cfg.validate();
  const double sigma = fn.sigma();
  const double q = fn.q();

  if (q == 0.0) {
    // P == Q: the loss is identically zero.
    DiscretePld out;
    out.grid_origin = 0.0;
    out.grid_step = cfg.grid_step;
    out.masses = {1.0};
    out.rounding = rounding;
    return out;
  }

  const double z = normal_upper_quantile(cfg.tail_mass_budget);
  const double t_lo = (q == 1.0 ? 1.0 : 0.0) - z * sigma;
  const double t_hi = 1.0 + z * sigma;
  const double loss_lo = fn.loss_at(t_lo);
  const double loss_hi = fn.loss_at(t_hi);

  const double span = loss_hi - loss_lo;
  const std::int64_t n = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(span / cfg.grid_step)));
  if (n + 1 > cfg.max_grid_points) {
    throw GridOverflowError("discretize: grid exceeds max_grid_points");
  }

  // Edge losses are loss_lo + k * step. The inverse loss needs
  // exp(lower - loss_k); march it with a multiplicative recurrence and
  // refresh it periodically to cap the drift.
  const double sigma_sq = sigma * sigma;
  const double lower = (q == 1.0) ? 0.0 : std::log1p(-q);
  const double log_q = std::log(q);
  const double ratio = std::exp(-cfg.grid_step);

  ComponentCdfWalker shifted(1.0, sigma);   // component N(1, sigma^2)
  ComponentCdfWalker centered(0.0, sigma);  // component N(0, sigma^2)

  const auto edge_t = [&](double loss, double exp_lower_minus_loss) {
    double g;
    if (q == 1.0) {
      g = loss;
    } else {
      const double d = loss - lower;
      if (d < 0.5) {
        g = lower + std::log(std::expm1(d)) - log_q;
      } else {
        g = loss + std::log1p(-exp_lower_minus_loss) - log_q;
      }
    }
    return sigma_sq * g + 0.5;
  };

  DiscretePld out;
  out.grid_origin = loss_lo + (rounding == Rounding::kPessimistic ? cfg.grid_step : 0.0);
  out.grid_step = cfg.grid_step;
  out.rounding = rounding;
  out.masses.resize(static_cast<std::size_t>(n));

  double exp_term = std::exp(lower - loss_lo);
  double t_edge = edge_t(loss_lo, exp_term);
  shifted.start(t_edge);
  centered.start(t_edge);
  const double w1 = q;
  const double w0 = 1.0 - q;
  out.bottom_tail_mass =
      w1 * normal_cdf((t_edge - 1.0) / sigma) + w0 * normal_cdf(t_edge / sigma);

  for (std::int64_t k = 1; k <= n; ++k) {
    const double loss_k = loss_lo + static_cast<double>(k) * cfg.grid_step;
    if (k % kRecurrenceBlock == 0) {
      exp_term = std::exp(lower - loss_k);
    } else {
      exp_term *= ratio;
    }
    t_edge = edge_t(loss_k, exp_term);
    double mass = w1 * shifted.advance(t_edge);
    if (w0 > 0.0) mass += w0 * centered.advance(t_edge);
    out.masses[static_cast<std::size_t>(k - 1)] = std::max(0.0, mass);
  }

  out.top_tail_mass =
      w1 * normal_sf((t_edge - 1.0) / sigma) + w0 * normal_sf(t_edge / sigma);
  return out;
}

DiscretePld self_compose(const DiscretePld& pld, std::int64_t iterations,
                         const AccountantConfig& cfg) {
  if (iterations < 1) {
    throw InvalidParameterError("self_compose: iterations must be >= 1");
  }
  if (iterations == 1) return pld;

  int levels = 0;
  for (std::int64_t t = iterations; t > 1; t >>= 1) ++levels;
  // One truncation opportunity per convolution; at most 2 * levels of
  // them share the composition's tail budget per side.
  const double slice = cfg.tail_mass_budget / (2.0 * levels);

  DiscretePld accumulated;
  bool has_accumulated = false;
  DiscretePld base = pld;
  std::int64_t t = iterations;
  while (true) {
    if (t & 1) {
      accumulated = has_accumulated ? convolve(accumulated, base, cfg, slice)
                                    : base;
      has_accumulated = true;
    }
    t >>= 1;
    if (t == 0) break;
    base = convolve(base, base, cfg, slice);
  }
  return accumulated;
}

double delta_from_pld(const DiscretePld& pld, double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw InvalidParameterError("delta_from_pld: epsilon must be >= 0");
  }
  const std::int64_t n = static_cast<std::int64_t>(pld.masses.size());
  // First bin with loss strictly above epsilon.
  std::int64_t i0 = 0;
  if (epsilon >= pld.grid_origin) {
    i0 = static_cast<std::int64_t>(
             std::floor((epsilon - pld.grid_origin) / pld.grid_step)) +
         1;
    while (i0 > 0 && pld.loss_at(static_cast<std::size_t>(i0 - 1)) > epsilon) --i0;
    while (i0 < n && pld.loss_at(static_cast<std::size_t>(i0)) <= epsilon) ++i0;
  }

  KahanSum sum;
  if (i0 < n) {
    const double ratio = std::exp(-pld.grid_step);
    double factor = std::exp(epsilon - pld.loss_at(static_cast<std::size_t>(i0)));
    for (std::int64_t i = i0; i < n; ++i) {
      if ((i - i0) % kRecurrenceBlock == 0 && i != i0) {
        factor = std::exp(epsilon - pld.loss_at(static_cast<std::size_t>(i)));
      }
      sum.add(pld.masses[static_cast<std::size_t>(i)] * (1.0 - factor));
      factor *= ratio;
    }
  }

  if (pld.rounding == Rounding::kPessimistic) {
    sum.add(pld.top_tail_mass);
    if (pld.grid_origin > epsilon) {
      sum.add(pld.bottom_tail_mass * -std::expm1(epsilon - pld.grid_origin));
    }
  }
  return std::clamp(sum.value(), 0.0, 1.0);
}

void dump_csv(const DiscretePld& pld, std::ostream& os) {
  os << "loss,mass\n";
  char line[128];
  for (std::size_t i = 0; i < pld.masses.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.12e,%.12e\n", pld.loss_at(i),
                  pld.masses[i]);
    os << line;
  }
  std::snprintf(line, sizeof(line), "# top_tail=%.12e bottom_tail=%.12e step=%.12e\n",
                pld.top_tail_mass, pld.bottom_tail_mass, pld.grid_step);
  os << line;
}

}  // namespace subgauss
