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

#include "pldacct/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pldacct/fourier.hpp"
#include "pldacct/pld_csv.hpp"

namespace pldacct {
namespace {

double binom_log_pmf(std::int64_t n, double p, std::int64_t j) {
  const double nd = static_cast<double>(n);
  const double jd = static_cast<double>(j);
  return std::lgamma(nd + 1.0) - std::lgamma(jd + 1.0) -
         std::lgamma(nd - jd + 1.0) + jd * std::log(p) +
         (nd - jd) * std::log1p(-p);
}

// Binomial pmf as a dense vector; entries that underflow double precision
// are exactly zero. Renormalized so the representable mass sums to one
// (lgamma noise at large n would otherwise miss by ~1e-10).
std::vector<double> binom_pmf(std::int64_t n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  double total = 0.0;
  for (std::int64_t j = 0; j <= n; ++j) {
    pmf[static_cast<std::size_t>(j)] = std::exp(binom_log_pmf(n, p, j));
    total += pmf[static_cast<std::size_t>(j)];
  }
  for (double& v : pmf) v /= total;
  return pmf;
}

OutputDistribution dist_from_pmf(const std::vector<double>& pmf,
                                 std::int64_t first_index, double scale) {
  std::vector<OutcomeProb> atoms;
  atoms.reserve(pmf.size());
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] > 0.0) {
      atoms.push_back(
          {(static_cast<double>(first_index) + static_cast<double>(i)) * scale,
           pmf[i]});
    }
  }
  return OutputDistribution(std::move(atoms));
}

// Greatest common lattice spacing of the magnitudes, by Euclid on doubles.
double float_gcd(double a, double b, double tol) {
  a = std::abs(a);
  b = std::abs(b);
  while (b > tol) {
    const double r = std::fmod(a, b);
    a = b;
    b = r;
  }
  return a;
}

std::pair<OutputDistribution, OutputDistribution> exp_count_outputs(
    double eps_tilde, std::int64_t m, std::int64_t n_total) {
  if (!(eps_tilde > 0.0)) {
    throw std::invalid_argument("eps_tilde must be positive");
  }
  if (m < 1 || m > n_total) {
    throw std::invalid_argument("requires 1 <= m <= n_total");
  }
  // Score of outcome 0 is the count m (m-1 for the neighbour that removed a
  // property-0 element); outcome 1 scores n - m in both datasets.
  const double a = eps_tilde * static_cast<double>(m);
  const double a_nb = eps_tilde * static_cast<double>(m - 1);
  const double b = eps_tilde * static_cast<double>(n_total - m);
  auto softmax0 = [](double u, double v) {
    // e^u / (e^u + e^v), overflow-safe.
    return 1.0 / (1.0 + std::exp(v - u));
  };
  OutputDistribution fx({{0.0, softmax0(a, b)}, {1.0, softmax0(b, a)}});
  OutputDistribution fy({{0.0, softmax0(a_nb, b)}, {1.0, softmax0(b, a_nb)}});
  return {std::move(fx), std::move(fy)};
}

}  // namespace

std::pair<OutputDistribution, OutputDistribution> rr_outputs(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("randomised response requires 0 < p < 1");
  }
  OutputDistribution fx({{0.0, 1.0 - p}, {1.0, p}});
  OutputDistribution fy({{0.0, p}, {1.0, 1.0 - p}});
  return {std::move(fx), std::move(fy)};
}

AtomicPld exp_count_pld(double eps_tilde, std::int64_t m, std::int64_t n_total,
                        Direction direction) {
  auto [fx, fy] = exp_count_outputs(eps_tilde, m, n_total);
  if (direction == Direction::kXOverY) return build_pld(fx, fy);
  return build_pld(fy, fx);
}

std::pair<OutputDistribution, OutputDistribution> binomial_1d_outputs(
    std::int64_t n_trials, double p, std::int64_t shift, double scale) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("requires 0 < p < 1");
  if (shift < 0) throw std::invalid_argument("shift must be >= 0");
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  const std::vector<double> pmf = binom_pmf(n_trials, p);
  return {dist_from_pmf(pmf, shift, scale), dist_from_pmf(pmf, 0, scale)};
}

LatticeReduction reduce_to_lattice_pair(
    const std::vector<double>& delta_vec,
    const std::vector<BinomialNoise>& noise) {
  if (delta_vec.empty() || delta_vec.size() != noise.size()) {
    throw std::invalid_argument(
        "delta_vec and noise must be non-empty and equally sized");
  }
  double norm_sq = 0.0;
  double max_abs = 0.0;
  for (double d : delta_vec) {
    norm_sq += d * d;
    max_abs = std::max(max_abs, std::abs(d));
  }
  if (max_abs == 0.0) {
    throw std::invalid_argument("delta_vec must not be all zeros");
  }
  // Common lattice spacing of the coordinates.
  const double tol = 1e-9 * max_abs;
  double scale = 0.0;
  for (double d : delta_vec) {
    if (d == 0.0) continue;
    scale = scale == 0.0 ? std::abs(d) : float_gcd(scale, d, tol);
  }
  std::vector<std::int64_t> multipliers(delta_vec.size(), 0);
  for (std::size_t i = 0; i < delta_vec.size(); ++i) {
    const double r = delta_vec[i] / scale;
    const double nearest = std::round(r);
    // A lattice multiplier is an integer of moderate size; anything else
    // signals incommensurable coordinates.
    if (std::abs(r - nearest) > 1e-6 || std::abs(nearest) > 1e7) {
      throw std::invalid_argument(
          "delta coordinates are not commensurable; the weighted noise sum "
          "does not live on a lattice");
    }
    multipliers[i] = static_cast<std::int64_t>(nearest);
  }
  const double shift_real = norm_sq / scale;
  const std::int64_t shift_units =
      static_cast<std::int64_t>(std::llround(shift_real));
  if (std::abs(shift_real - static_cast<double>(shift_units)) > 1e-6) {
    throw std::invalid_argument(
        "||delta||^2 is not a lattice point of the common spacing");
  }

  LatticeReduction red;
  red.scale = scale;
  red.shift_units = shift_units;

  // Equal-coordinate fast path: sum of d iid binomials is one binomial.
  const bool all_same =
      std::all_of(multipliers.begin(), multipliers.end(),
                  [](std::int64_t v) { return v == 1; }) &&
      std::all_of(noise.begin(), noise.end(), [&](const BinomialNoise& z) {
        return z.n_trials == noise.front().n_trials && z.p == noise.front().p;
      });
  if (all_same) {
    const std::int64_t total_n =
        noise.front().n_trials * static_cast<std::int64_t>(noise.size());
    red.support_lo = 0;
    red.noise_pmf = binom_pmf(total_n, noise.front().p);
    return red;
  }

  // General case: exact dense convolution of the stretched per-coordinate
  // pmfs on the common lattice.
  std::vector<double> w = {1.0};
  std::int64_t offset = 0;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const std::int64_t m = multipliers[i];
    if (m == 0) continue;
    std::vector<double> pz = binom_pmf(noise[i].n_trials, noise[i].p);
    const std::int64_t stride = std::abs(m);
    const std::int64_t zlen = (static_cast<std::int64_t>(pz.size()) - 1) * stride;
    // A negative multiplier mirrors this coordinate's support below zero.
    if (m < 0) {
      std::reverse(pz.begin(), pz.end());
      offset -= zlen;
    }
    const std::int64_t new_len = static_cast<std::int64_t>(w.size()) + zlen;
    if (new_len > kExactAtomBudget) {
      throw std::invalid_argument(
          "lattice reduction support exceeds the exact-convolution budget");
    }
    std::vector<double> next(static_cast<std::size_t>(new_len), 0.0);
    for (std::size_t a = 0; a < w.size(); ++a) {
      if (w[a] == 0.0) continue;
      for (std::size_t b = 0; b < pz.size(); ++b) {
        next[a + b * static_cast<std::size_t>(stride)] += w[a] * pz[b];
      }
    }
    w = std::move(next);
  }
  red.support_lo = offset;
  red.noise_pmf = std::move(w);
  return red;
}

std::pair<OutputDistribution, OutputDistribution> lattice_pair_outputs(
    const LatticeReduction& red) {
  return {dist_from_pmf(red.noise_pmf, red.support_lo + red.shift_units,
                        red.scale),
          dist_from_pmf(red.noise_pmf, red.support_lo, red.scale)};
}

std::pair<OutputDistribution, OutputDistribution> poisson_subsample_pair(
    const OutputDistribution& fx, const OutputDistribution& fy, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("subsampling ratio must satisfy 0 < q < 1");
  }
  // Mixture q fx + (1-q) fy on the union outcome set.
  std::vector<OutcomeProb> mix;
  const auto& ax = fx.atoms();
  const auto& ay = fy.atoms();
  std::size_t i = 0, j = 0;
  while (i < ax.size() || j < ay.size()) {
    double outcome;
    double prob = 0.0;
    const bool take_x =
        j >= ay.size() || (i < ax.size() && ax[i].outcome <= ay[j].outcome);
    const bool take_y =
        i >= ax.size() || (j < ay.size() && ay[j].outcome <= ax[i].outcome);
    outcome = take_x ? ax[i].outcome : ay[j].outcome;
    if (take_x) prob += q * ax[i++].prob;
    if (take_y) prob += (1.0 - q) * ay[j++].prob;
    mix.push_back({outcome, prob});
  }
  return {OutputDistribution(std::move(mix)), fy};
}

std::function<double(double)> subsampled_gaussian_density(double q,
                                                          double sigma) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("subsampling ratio must satisfy 0 < q < 1");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  const double s_min = std::log1p(-q);
  const double sigma_sq = sigma * sigma;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma_sq);
  return [=](double s) -> double {
    if (s <= s_min || !std::isfinite(s)) return 0.0;
    // e^s - (1-q) via expm1 to keep precision near the support edge.
    const double u = (1.0 - q) * std::expm1(s - s_min);
    const double g = sigma_sq * std::log(u / q) + 0.5;
    const double g_prime = sigma_sq * std::exp(s) / u;
    const double f =
        norm * (q * std::exp(-(g - 1.0) * (g - 1.0) / (2.0 * sigma_sq)) +
                (1.0 - q) * std::exp(-g * g / (2.0 * sigma_sq)));
    return f * g_prime;
  };
}

double subsampled_gaussian_mgf_bound(double q, double sigma,
                                     const GridSpec& grid, CellSide side,
                                     double lambda, MgfSign sign) {
  const GridPld cells = discretize_continuous(
      subsampled_gaussian_density(q, sigma), std::log1p(-q), grid, side);
  return discretized_sg_mgf_bound(cells, q, sigma, lambda, sign);
}

PrivacyBound subsampled_gaussian_bounds(double q, double sigma,
                                        const GridSpec& grid, std::int64_t k,
                                        double eps, double lambda) {
  validate_grid(grid);
  const auto density = subsampled_gaussian_density(q, sigma);
  const double support_left = std::log1p(-q);
  const GridPld cells_min =
      discretize_continuous(density, support_left, grid, CellSide::kMin);
  const GridPld cells_max =
      discretize_continuous(density, support_left, grid, CellSide::kMax);

  PrivacyBound out;
  out.grid = grid;
  out.k = k;
  out.eps = eps;
  out.lambda = lambda;
  out.delta_est_left = delta_estimate(compose_self(cells_min, k), eps);
  out.delta_est_right = delta_estimate(compose_self(cells_max, k), eps);
  // Budgets use the MGF bounds of the infinitely extending discretizations.
  const MgfPair mgf_min{
      std::log(discretized_sg_mgf_bound(cells_min, q, sigma, lambda,
                                        MgfSign::kPlus)),
      std::log(discretized_sg_mgf_bound(cells_min, q, sigma, lambda,
                                        MgfSign::kMinus)),
      lambda};
  const MgfPair mgf_max{
      std::log(discretized_sg_mgf_bound(cells_max, q, sigma, lambda,
                                        MgfSign::kPlus)),
      std::log(discretized_sg_mgf_bound(cells_max, q, sigma, lambda,
                                        MgfSign::kMinus)),
      lambda};
  out.budget_left = error_budget(k, mgf_min, grid.half_width);
  out.budget_right = error_budget(k, mgf_max, grid.half_width);
  out.err_bound = std::max(out.budget_left.total, out.budget_right.total);
  out.delta_lower = std::max(0.0, out.delta_est_left - out.budget_left.total);
  out.delta_upper = std::min(1.0, out.delta_est_right + out.budget_right.total);
  out.delta_lower = std::min(out.delta_lower, out.delta_upper);
  return out;
}

std::vector<AtomicPld> mechanism_plds(const MechanismSpec& spec) {
  auto directions = [&](const OutputDistribution& fx,
                        const OutputDistribution& fy) {
    std::vector<AtomicPld> out;
    if (spec.subsample_q > 0.0) {
      auto [mix, base] = poisson_subsample_pair(fx, fy, spec.subsample_q);
      out.push_back(build_pld(mix, base));
      out.push_back(build_pld(base, mix));
    } else {
      out.push_back(build_pld(fx, fy));
      out.push_back(build_pld(fy, fx));
    }
    return out;
  };
  switch (spec.kind) {
    case MechanismSpec::Kind::kRr: {
      auto [fx, fy] = rr_outputs(spec.p);
      return directions(fx, fy);
    }
    case MechanismSpec::Kind::kExpCount: {
      auto [fx, fy] = exp_count_outputs(spec.eps_tilde, spec.m, spec.n_total);
      return directions(fx, fy);
    }
    case MechanismSpec::Kind::kBinomial: {
      auto [fx, fy] =
          binomial_1d_outputs(spec.n_trials, spec.p, spec.shift, spec.scale);
      return directions(fx, fy);
    }
    case MechanismSpec::Kind::kUserAtoms: {
      if (spec.subsample_q > 0.0) {
        throw std::invalid_argument(
            "subsampling applies to output pairs, not to a pre-built PLD");
      }
      return {read_pld_csv_file(spec.pld_file).pld};
    }
    case MechanismSpec::Kind::kSubsampledGaussian:
      throw std::invalid_argument(
          "the subsampled Gaussian is continuous; use "
          "subsampled_gaussian_bounds");
  }
  throw std::logic_error("unreachable mechanism kind");
}

}  // namespace pldacct
