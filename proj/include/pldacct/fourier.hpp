// Copyright 2026 PLD Accountant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PLDACCT_FOURIER_HPP_
#define PLDACCT_FOURIER_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "pldacct/grid.hpp"

namespace pldacct {

// Result of composing grid PLDs: the truncated, periodised k-fold
// convolution mass vector. FFT roundoff can leave tiny negative entries;
// they are kept here (min_mass records the most negative one) and clamped
// to zero where a delta value is formed.
struct ComposedGridPld {
  GridSpec grid;
  std::vector<double> mass;
  std::int64_t k = 1;
  double delta_inf_composed = 0.0;
  double min_mass = 0.0;  // diagnostic: smallest entry of mass
};

// Swaps the first and second halves of v (involutive). n must be even.
std::vector<double> fft_shift(std::vector<double> v);

// k-fold self-convolution, truncated to [-L, L] and 2L-periodised:
// shift halves, forward transform, elementwise k-th power (by repeated
// squaring), inverse transform, real part, shift back. k = 1 is the
// identity and short-circuits without a transform.
ComposedGridPld compose_self(const GridPld& pld, std::int64_t k);

// Heterogeneous composition: elementwise product of the shifted transforms.
// All inputs must share one grid. A single input is passed through the
// transform round trip unchanged (up to roundoff).
ComposedGridPld compose_heterogeneous(const std::vector<GridPld>& plds);

// The composed delta(eps) sum: delta_inf_composed plus
// sum over grid points x > eps of (1 - e^(eps - x)) * max(mass, 0),
// clamped to [0, 1]. eps >= L yields the delta_inf term only.
double delta_estimate(const ComposedGridPld& comp, double eps);

enum class BoundRole {
  kLowerCurve,  // round toward smaller eps (inverting a lower delta curve)
  kUpperCurve,  // round toward larger eps (inverting an upper delta curve)
};

// Inverts a non-increasing delta(eps) curve by bisection to absolute
// tolerance 1e-9: the smallest bracketed eps with delta(eps) <= target.
// Requires delta(lo) >= target >= delta(hi); if delta(lo) <= target
// already, lo is returned. The final bracket endpoint is chosen per role
// so the inverted bound stays conservative.
double epsilon_for_delta(const std::function<double(double)>& delta_of_eps,
                         double target_delta, double eps_lo, double eps_hi,
                         BoundRole role);

}  // namespace pldacct

#endif  // PLDACCT_FOURIER_HPP_
