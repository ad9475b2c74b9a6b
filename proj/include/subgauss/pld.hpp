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
// Grid accountant for the subsampled Gaussian mechanism: discretizes the
// privacy loss random variable of one iteration onto a uniform grid in
// loss space, composes iterations by convolution (repeated squaring with
// FFTs), and answers delta(epsilon) queries. Pessimistic rounding yields
// an upper bound on the true delta, optimistic rounding a lower bound;
// the two bracket the exact value.

#ifndef SUBGAUSS_PLD_HPP_
#define SUBGAUSS_PLD_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "subgauss/mechanism.hpp"

namespace subgauss {

enum class Rounding {
  kPessimistic,  // interval mass sits at its upper loss edge; never
                 // underestimates delta
  kOptimistic,   // interval mass sits at its lower loss edge; never
                 // overestimates delta
};

struct AccountantConfig {
  // Uniform bin width in loss units. Chosen so the pessimistic/optimistic
  // sandwich stays below 1e-6 on single-step queries; the gap scales
  // linearly with the step.
  double grid_step = 2.5e-6;
  // Mass truncated per side when discretizing; self-composition spends
  // the same budget again across all of its convolutions. Truncated top
  // mass is charged in full to the pessimistic delta, so this must stay
  // far below any delta of interest.
  double tail_mass_budget = 1e-12;
  std::int64_t max_grid_points = std::int64_t{1} << 26;

  void validate() const;
};

// A grid-discretized privacy loss distribution. Bin i carries
// probability masses[i] at loss grid_origin + i * grid_step.
// bottom_tail_mass is the mass that fell below the grid: a pessimistic
// PLD holds it at grid_origin, an optimistic one discards it from delta.
// top_tail_mass is the mass above the grid, charged fully to delta in
// pessimistic mode and discarded in optimistic mode.
struct DiscretePld {
  double grid_origin = 0.0;
  double grid_step = 1.0;
  std::vector<double> masses;
  double top_tail_mass = 0.0;
  double bottom_tail_mass = 0.0;
  Rounding rounding = Rounding::kPessimistic;

  double loss_at(std::size_t i) const { return grid_origin + static_cast<double>(i) * grid_step; }
  // Compensated sum of masses plus both tails; equals 1 up to roundoff.
  double total_mass() const;
  // First two moments of the on-grid part (bottom tail held at the
  // origin, top tail excluded).
  double mean() const;
  double variance() const;
  // Same masses reinterpreted under the other rounding convention (the
  // grids differ by exactly one step).
  DiscretePld with_rounding(Rounding r) const;
};

// Discretizes one iteration of fn onto the grid. Bin mass i is the
// P-probability that the loss lands in bin i's interval, obtained by
// inverting the monotone loss function at the bin edges and differencing
// the Gaussian-mixture CDF there. Throws GridOverflowError if the grid
// would exceed cfg.max_grid_points.
DiscretePld discretize(const PrivacyLossFn& fn, const AccountantConfig& cfg,
                       Rounding rounding);

// T-fold self-composition by repeated squaring; each convolution runs as
// a zero-padded cyclic FFT convolution. Tail masses compose so that the
// rounding guarantee is preserved: in pessimistic mode any sample
// touching a truncated tail counts as +infinity loss, in optimistic mode
// as -infinity. T == 1 returns the input unchanged.
DiscretePld self_compose(const DiscretePld& pld, std::int64_t iterations,
                         const AccountantConfig& cfg);

// delta(epsilon) = sum_i masses[i] (1 - e^{eps - s_i})_+ plus the tail
// contribution dictated by the rounding mode. Clamped to [0, 1].
double delta_from_pld(const DiscretePld& pld, double epsilon);

// Debug dump: header "loss,mass", one row per bin, and a footer comment
// "# top_tail=<v> bottom_tail=<v> step=<v>".
void dump_csv(const DiscretePld& pld, std::ostream& os);

}  // namespace subgauss

#endif  // SUBGAUSS_PLD_HPP_
