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

#ifndef PLDACCT_MECHANISMS_HPP_
#define PLDACCT_MECHANISMS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pldacct/error_analysis.hpp"
#include "pldacct/grid.hpp"
#include "pldacct/pld.hpp"

namespace pldacct {

enum class Direction { kXOverY, kYOverX };

// Worst-case output pair of the randomised response mechanism with truth
// probability p: fx = p at 1, (1-p) at 0; fy mirrored.
std::pair<OutputDistribution, OutputDistribution> rr_outputs(double p);

// PLD of the exponential mechanism with a binary counting-query score:
// dataset of n_total elements of which m have property 0, neighbour formed
// by removing one such element. Two atoms, no infinite-loss mass.
AtomicPld exp_count_pld(double eps_tilde, std::int64_t m, std::int64_t n_total,
                        Direction direction);

// Output pair of the shifted-binomial comparison: X = (shift + B) * scale
// versus Y = B * scale with B ~ Bin(n_trials, p). The pmf is computed in
// log space; outcomes whose pmf underflows to zero are absent from the
// distributions (their total mass is below 1e-300 for any usable setting)
// and the pmf is renormalized. scale only relabels outcomes; the privacy
// loss atoms depend on probability ratios alone.
std::pair<OutputDistribution, OutputDistribution> binomial_1d_outputs(
    std::int64_t n_trials, double p, std::int64_t shift, double scale);

// Per-coordinate independent binomial noise.
struct BinomialNoise {
  std::int64_t n_trials = 1;
  double p = 0.5;
};

// One-dimensional reduction of an additive-noise mechanism over R^d with
// query difference delta_vec: the tight bounds of the d-dimensional pair
// equal those of (||delta||^2 + sum_i delta_i Z_i) versus (sum_i delta_i Z_i).
// The reduction requires all delta_i commensurable (delta_i = m_i * scale for
// integers m_i) so the weighted sum lives on a lattice; the lattice pmf of
// the sum is formed by exact convolution of the per-coordinate pmfs, with a
// direct binomial fast path when all coordinates match.
struct LatticeReduction {
  double scale = 0.0;          // lattice spacing
  std::int64_t shift_units = 0;  // ||delta||^2 in lattice units
  std::int64_t support_lo = 0;   // lattice index of the first pmf entry
  std::vector<double> noise_pmf;  // pmf of sum_i m_i Z_i on the lattice
};
LatticeReduction reduce_to_lattice_pair(const std::vector<double>& delta_vec,
                                        const std::vector<BinomialNoise>& noise);

// Output pair (X = shift + W, Y = W) of a lattice reduction.
std::pair<OutputDistribution, OutputDistribution> lattice_pair_outputs(
    const LatticeReduction& red);

// Poisson subsampling with inclusion probability q: the amplified pair is
// (q fx + (1-q) fy, fy). The mixture is returned on the union outcome set;
// take both argument orders of build_pld for the two loss directions.
std::pair<OutputDistribution, OutputDistribution> poisson_subsample_pair(
    const OutputDistribution& fx, const OutputDistribution& fy, double q);

// Continuous PLD density of the Poisson-subsampled Gaussian mechanism with
// subsampling ratio q and noise scale sigma. Zero at or below log(1-q);
// integrates to one. Safe for concurrent evaluation.
std::function<double(double)> subsampled_gaussian_density(double q,
                                                          double sigma);

// Strict bounds for the subsampled Gaussian: lower/upper Riemann-cell
// discretizations, composition sums on each, and budgets computed from the
// tail-corrected MGF bounds of the infinitely extending discretizations.
PrivacyBound subsampled_gaussian_bounds(double q, double sigma,
                                        const GridSpec& grid, std::int64_t k,
                                        double eps, double lambda);

// Configuration envelope for one accountant run.
struct MechanismSpec {
  enum class Kind { kRr, kExpCount, kBinomial, kSubsampledGaussian, kUserAtoms };
  Kind kind = Kind::kRr;
  double p = 0.75;              // rr, binomial
  double eps_tilde = 0.05;      // exp-count
  std::int64_t m = 50;          // exp-count
  std::int64_t n_total = 100;   // exp-count
  std::int64_t n_trials = 1;    // binomial
  std::int64_t shift = 0;       // binomial
  double scale = 1.0;           // binomial
  double q = 0.0;               // subsampled gaussian ratio
  double sigma = 1.0;           // subsampled gaussian noise
  std::string pld_file;         // user atoms
  double subsample_q = 0.0;     // Poisson subsampling of a discrete pair; 0 = none
};

// The atomic PLDs of both loss directions for a discrete mechanism spec
// (applying Poisson subsampling when requested). The accountant takes the
// per-direction max of the resulting bounds.
std::vector<AtomicPld> mechanism_plds(const MechanismSpec& spec);

}  // namespace pldacct

#endif  // PLDACCT_MECHANISMS_HPP_
