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

#ifndef PLDACCT_ERROR_ANALYSIS_HPP_
#define PLDACCT_ERROR_ANALYSIS_HPP_

#include <cstdint>
#include <utility>

#include "pldacct/fourier.hpp"
#include "pldacct/grid.hpp"
#include "pldacct/pld.hpp"

namespace pldacct {

// Logarithms of the two one-sided moment generating functions of a PLD:
// alpha_plus = log E[e^(lambda w)], alpha_minus = log E[e^(-lambda w)].
struct MgfPair {
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  double lambda = 0.0;
};

// Worst-case error of the truncated/periodised composition sum, split into
// its three sources. total is the combined closed-form bound (every source
// inflated by the common 1/(1 - e^(-L lambda)) factor), so
// total >= tail + truncation + periodisation. Values saturate to +inf when
// they exceed the double range; such a budget is vacuous but still valid.
struct ErrorBudget {
  double tail = 0.0;           // mass of the composition beyond L
  double truncation = 0.0;     // dropped cross terms of truncated convolutions
  double periodisation = 0.0;  // aliased mass of the 2L-periodic extension
  double total = 0.0;
  double lambda_used = 0.0;
};

// Strict lower/upper bounds on delta(eps) together with the raw grid
// estimates and the per-side error budgets that produced them.
struct PrivacyBound {
  double delta_lower = 0.0;
  double delta_upper = 0.0;
  double err_bound = 0.0;  // max of the two per-side budget totals
  double delta_est_left = 0.0;   // composed-grid estimate, left/min side
  double delta_est_right = 0.0;  // composed-grid estimate, right/max side
  ErrorBudget budget_left;
  ErrorBudget budget_right;
  GridSpec grid;
  std::int64_t k = 1;
  double eps = 0.0;
  double lambda = 0.0;
};

// MGFs evaluated as finite sums over the atoms, with max-exponent factoring
// for overflow safety. lambda must be positive; an empty PLD is rejected.
MgfPair mgf(const AtomicPld& pld, double lambda);
MgfPair mgf(const GridPld& pld, double lambda);

// Chernoff bound on the mass of the k-fold composition at or above L:
// exp(k * alpha_plus - lambda * L), saturating to +inf on overflow.
double chernoff_tail(std::int64_t k, double alpha_plus, double lambda,
                     double L);

// The combined worst-case budget for the composition sum of a PLD living on
// the grid [-L, L - dx], evaluated in log space. The geometric series in the
// truncation term degenerates to a (k-1)-term sum when an exponent is within
// 1e-14 of zero.
ErrorBudget error_budget(std::int64_t k, const MgfPair& m, double L);

// Upper bounds on the snapped distributions' MGFs given only the true PLD's
// MGFs: left-snapping can only shrink E[e^(lambda w)] and inflate
// E[e^(-lambda w)] by at most 1/(1 - lambda dx); mirrored for right
// snapping. Requires 0 < lambda < 1/dx. Returns (left bound, right bound).
std::pair<MgfPair, MgfPair> snapped_mgf_bounds(const MgfPair& true_mgf,
                                               const GridSpec& grid);

// End-to-end strict bounds for an atomic PLD: snap both ways, compose with
// the FFT engine, evaluate the composition sum, and widen each side by its
// own error budget. The per-side MGFs are computed directly on the snapped
// atoms (tighter than the generic inflation above).
PrivacyBound strict_delta_bounds(const AtomicPld& pld, const GridSpec& grid,
                                 std::int64_t k, double eps, double lambda);

enum class MgfSign { kPlus, kMinus };

// Upper bound on the MGF of the infinitely extending Riemann-cell
// discretization of the subsampled Gaussian PLD: the finite sum over the
// truncated cells plus the Gaussian-tail correction
//   err = e^(c lambda L) (2/sqrt(pi)) e^(-lambda(2C - lambda)/(2 sigma^2))
//         erfc(((1-c) sigma^2 L + C - lambda) / (sqrt(2) sigma)),
// with C = sigma^2 log(1/(2q)) - 1/2 and c = dx/L. Requires sigma >= 1,
// 0 < q <= 1/2, 0 < lambda <= L, dx < L and L > |log(1-q)|. erfc arguments
// beyond its underflow range yield a zero correction, which only makes the
// returned bound smaller on a term that is itself negligible there.
double subsampled_gaussian_mgf_bound(double q, double sigma,
                                     const GridSpec& grid, CellSide side,
                                     double lambda, MgfSign sign);

// Same bound on already-discretized cells, so callers that hold the cell
// masses avoid rebuilding them for each of the four sign/side combinations.
double discretized_sg_mgf_bound(const GridPld& cells, double q, double sigma,
                                double lambda, MgfSign sign);

// The tail correction term above, exposed for diagnostics.
double subsampled_gaussian_mgf_err(double q, double sigma, double L,
                                   double dx, double lambda);

// The envelope constant C = sigma^2 log(1/(2q)) - 1/2 of the Gaussian bound
// on the subsampled PLD density at large loss values.
double subsampled_gaussian_envelope_constant(double q, double sigma);

// Default lambda = L/2, reduced to 0.99/dx when L/2 would violate the
// lambda < 1/dx requirement of the snapped-MGF inflation.
struct LambdaChoice {
  double lambda = 0.0;
  bool reduced = false;
};
LambdaChoice default_lambda(const GridSpec& grid);

}  // namespace pldacct

#endif  // PLDACCT_ERROR_ANALYSIS_HPP_
