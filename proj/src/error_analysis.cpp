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

#include "pldacct/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pldacct {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exponents whose magnitude falls below this are treated as the degenerate
// zero case of the geometric series.
constexpr double kAlphaDegenerateTol = 1e-14;

double exp_saturating(double x) {
  if (x > 709.0) return kInf;
  return std::exp(x);
}

// log sum_{l=1}^{k-1} e^{l a}; -inf when the sum is empty.
double log_geometric_sum(double a, std::int64_t k) {
  if (k <= 1) return -kInf;
  const double km1 = static_cast<double>(k - 1);
  if (std::abs(a) < kAlphaDegenerateTol) return std::log(km1);
  if (a > 0.0) {
    // e^a (e^{(k-1)a} - 1) / (e^a - 1), all in logs.
    auto log_em1 = [](double x) { return x + std::log1p(-std::exp(-x)); };
    return a + log_em1(km1 * a) - log_em1(a);
  }
  return a + std::log1p(-std::exp(km1 * a)) - std::log1p(-std::exp(a));
}

double log_sum_exp(const std::vector<double>& vals) {
  double m = -kInf;
  for (double v : vals) m = std::max(m, v);
  if (m == -kInf || m == kInf) return m;
  double s = 0.0;
  for (double v : vals) s += std::exp(v - m);
  return m + std::log(s);
}

MgfPair mgf_from_atoms(const std::vector<PldAtom>& atoms, double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (atoms.empty()) {
    throw std::invalid_argument("MGF of an empty PLD is undefined");
  }
  auto log_sum = [&](double sign) {
    double m = -kInf;
    for (const PldAtom& a : atoms) {
      if (a.mass > 0.0) m = std::max(m, sign * lambda * a.s);
    }
    double s = 0.0;
    for (const PldAtom& a : atoms) {
      if (a.mass > 0.0) s += std::exp(sign * lambda * a.s - m) * a.mass;
    }
    return m + std::log(s);
  };
  return MgfPair{log_sum(+1.0), log_sum(-1.0), lambda};
}

}  // namespace

MgfPair mgf(const AtomicPld& pld, double lambda) {
  return mgf_from_atoms(pld.atoms(), lambda);
}

MgfPair mgf(const GridPld& pld, double lambda) {
  return mgf_from_atoms(pld.nonzero_atoms(), lambda);
}

double chernoff_tail(std::int64_t k, double alpha_plus, double lambda,
                     double L) {
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (L <= 0.0) throw std::invalid_argument("L must be positive");
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  return exp_saturating(static_cast<double>(k) * alpha_plus - lambda * L);
}

ErrorBudget error_budget(std::int64_t k, const MgfPair& m, double L) {
  if (k < 1) throw std::invalid_argument("composition count k must be >= 1");
  const double lambda = m.lambda;
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (L <= 0.0) throw std::invalid_argument("L must be positive");
  const double kd = static_cast<double>(k);
  const double log_decay = -L * lambda;                       // e^{-L lambda}
  const double log_geo_factor =
      log_decay - std::log1p(-std::exp(log_decay));  // geometric inflation

  ErrorBudget out;
  out.lambda_used = lambda;
  out.tail = exp_saturating(kd * m.alpha_plus + log_decay);
  out.truncation = exp_saturating(
      log_sum_exp({log_geometric_sum(m.alpha_plus, k),
                   log_geometric_sum(m.alpha_minus, k)}) +
      log_decay);
  out.periodisation = exp_saturating(
      log_sum_exp({kd * m.alpha_plus, kd * m.alpha_minus}) + log_geo_factor);
  // Combined closed form: every source inflated by the geometric factor.
  out.total = exp_saturating(
      log_sum_exp({std::log(2.0) + kd * m.alpha_plus,
                   log_geometric_sum(m.alpha_plus, k), kd * m.alpha_minus,
                   log_geometric_sum(m.alpha_minus, k)}) +
      log_geo_factor);
  return out;
}

std::pair<MgfPair, MgfPair> snapped_mgf_bounds(const MgfPair& true_mgf,
                                               const GridSpec& grid) {
  validate_grid(grid);
  const double lambda = true_mgf.lambda;
  const double dx = grid.dx();
  if (!(lambda > 0.0) || lambda * dx >= 1.0) {
    std::ostringstream msg;
    msg << "the snapped-MGF inflation requires 0 < lambda < 1/dx = "
        << 1.0 / dx << " (got lambda=" << lambda
        << "); lower lambda or raise n";
    throw std::invalid_argument(msg.str());
  }
  const double inflation = -std::log1p(-lambda * dx);  // log 1/(1 - lambda dx)
  MgfPair left{true_mgf.alpha_plus, true_mgf.alpha_minus + inflation, lambda};
  MgfPair right{true_mgf.alpha_plus + inflation, true_mgf.alpha_minus, lambda};
  return {left, right};
}

PrivacyBound strict_delta_bounds(const AtomicPld& pld, const GridSpec& grid,
                                 std::int64_t k, double eps, double lambda) {
  validate_grid(grid);
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (lambda * grid.dx() >= 1.0) {
    std::ostringstream msg;
    msg << "lambda must satisfy lambda < 1/dx = " << 1.0 / grid.dx()
        << " (got " << lambda << "); lower lambda or raise n";
    throw std::invalid_argument(msg.str());
  }
  const GridPld left = snap_left(pld, grid);
  const GridPld right = snap_right(pld, grid);
  const ComposedGridPld comp_left = compose_self(left, k);
  const ComposedGridPld comp_right = compose_self(right, k);

  PrivacyBound out;
  out.grid = grid;
  out.k = k;
  out.eps = eps;
  out.lambda = lambda;
  out.delta_est_left = delta_estimate(comp_left, eps);
  out.delta_est_right = delta_estimate(comp_right, eps);
  // Direct finite-sum MGFs on the snapped atoms; tighter than the generic
  // inflation bound, which remains available when only the true PLD's MGF
  // is known.
  out.budget_left = error_budget(k, mgf(left, lambda), grid.half_width);
  out.budget_right = error_budget(k, mgf(right, lambda), grid.half_width);
  out.err_bound = std::max(out.budget_left.total, out.budget_right.total);
  out.delta_lower = std::max(0.0, out.delta_est_left - out.budget_left.total);
  out.delta_upper = std::min(1.0, out.delta_est_right + out.budget_right.total);
  out.delta_lower = std::min(out.delta_lower, out.delta_upper);
  return out;
}

double subsampled_gaussian_envelope_constant(double q, double sigma) {
  return sigma * sigma * std::log(1.0 / (2.0 * q)) - 0.5;
}

double subsampled_gaussian_mgf_err(double q, double sigma, double L, double dx,
                                   double lambda) {
  const double C = subsampled_gaussian_envelope_constant(q, sigma);
  const double c = dx / L;
  const double arg =
      ((1.0 - c) * sigma * sigma * L + C - lambda) / (std::numbers::sqrt2 * sigma);
  return std::exp(c * lambda * L) * (2.0 / std::sqrt(std::numbers::pi)) *
         std::exp(-lambda * (2.0 * C - lambda) / (2.0 * sigma * sigma)) *
         std::erfc(arg);
}

double discretized_sg_mgf_bound(const GridPld& cells, double q, double sigma,
                                double lambda, MgfSign sign) {
  const GridSpec& grid = cells.grid();
  const double L = grid.half_width;
  const double dx = grid.dx();
  if (!(sigma >= 1.0)) {
    throw std::invalid_argument("requires sigma >= 1");
  }
  if (!(q > 0.0 && q <= 0.5)) {
    throw std::invalid_argument("requires 0 < q <= 1/2");
  }
  if (!(lambda > 0.0 && lambda <= L)) {
    throw std::invalid_argument("requires 0 < lambda <= L");
  }
  if (!(dx < L)) {
    throw std::invalid_argument("requires dx < L (c = dx/L must be < 1)");
  }
  if (!(L > std::abs(std::log1p(-q)))) {
    throw std::invalid_argument("requires L > |log(1-q)|");
  }
  // Finite-sum MGF of the truncated discretization plus the tail correction
  // covering the cells beyond L.
  const double sgn = sign == MgfSign::kPlus ? 1.0 : -1.0;
  double sum = 0.0;
  for (std::int64_t i = 0; i < grid.n; ++i) {
    const double m = cells.mass()[static_cast<std::size_t>(i)];
    if (m > 0.0) sum += std::exp(sgn * lambda * grid.point(i)) * m;
  }
  return sum + subsampled_gaussian_mgf_err(q, sigma, L, dx, lambda);
}

LambdaChoice default_lambda(const GridSpec& grid) {
  validate_grid(grid);
  const double half_l = grid.half_width / 2.0;
  const double cap = 0.99 / grid.dx();
  if (half_l < cap) return {half_l, false};
  return {cap, true};
}

}  // namespace pldacct
