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

#include "pldacct/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pldacct {
namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a,
                     double fa, double b, double fb, double fm, double whole,
                     double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0) {
    throw std::runtime_error("adaptive quadrature failed to converge");
  }
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

}  // namespace

std::vector<double> direct_truncated_periodised_convolution(
    const std::vector<double>& mass, std::int64_t k) {
  const std::int64_t n = static_cast<std::int64_t>(mass.size());
  if (n > 1024) throw std::invalid_argument("direct convolution limited to n <= 1024");
  if (k < 1 || k > 6) throw std::invalid_argument("direct convolution limited to k <= 6");
  if (n % 2 != 0) throw std::invalid_argument("n must be even");
  // One truncated-periodised round over the period-long index window
  // j = n/2 .. 3n/2-1 reduces to a plain circular convolution; the grid
  // positions s_j + s_{i-j} = s_i - L carry an extra half-period offset,
  // which the final half-rotation undoes.
  std::vector<double> cur = mass;
  for (std::int64_t round = 1; round < k; ++round) {
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::int64_t j = 0; j < n; ++j) {
        const std::int64_t im = ((i - j) % n + n) % n;
        acc += mass[static_cast<std::size_t>(j)] *
               cur[static_cast<std::size_t>(im)];
      }
      next[static_cast<std::size_t>((i + n / 2) % n)] = acc;
    }
    cur = std::move(next);
  }
  return cur;
}

double exact_atom_convolution_delta(const AtomicPld& pld, std::int64_t k,
                                    double eps) {
  return delta_exact(pld, eps, k);
}

double rr_closed_form_delta(double p, double eps) {
  if (!(p > 0.5 && p < 1.0)) {
    throw std::invalid_argument("closed form stated for 1/2 < p < 1");
  }
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  const double c_p = std::log(p / (1.0 - p));
  if (eps > c_p) return 0.0;
  return p * (1.0 - std::exp(eps - c_p));
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, fm, whole, tol, 60);
}

double continuous_delta_quadrature(const std::function<double(double)>& omega,
                                   double eps, double s_lo, double s_hi) {
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  const double a = std::max(eps, s_lo);
  if (a >= s_hi) return 0.0;
  auto integrand = [&](double s) {
    return (1.0 - std::exp(eps - s)) * omega(s);
  };
  // Piecewise panels keep the adaptive recursion from missing narrow
  // features of densities with steep support edges.
  constexpr double kTol = 1e-12;
  double total = 0.0;
  double left = a;
  const double span = s_hi - a;
  const double breaks[] = {1e-4, 1e-2, 0.1, 0.5};
  for (double frac : breaks) {
    const double right = a + frac * span;
    total += integrate_adaptive(integrand, left, right, kTol);
    left = right;
  }
  total += integrate_adaptive(integrand, left, s_hi, kTol);
  return total;
}

double analytical_gaussian_delta(double sigma, double sensitivity, double eps) {
  if (!(sigma > 0.0) || !(sensitivity > 0.0)) {
    throw std::invalid_argument("sigma and sensitivity must be positive");
  }
  const double r = sensitivity / (2.0 * sigma);
  const double t = eps * sigma / sensitivity;
  return std_normal_cdf(r - t) - std::exp(eps) * std_normal_cdf(-r - t);
}

double analytical_gaussian_epsilon(double sigma, double sensitivity,
                                   double target_delta) {
  if (!(target_delta > 0.0 && target_delta < 1.0)) {
    throw std::invalid_argument("target delta must lie in (0, 1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (analytical_gaussian_delta(sigma, sensitivity, hi) > target_delta) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("epsilon search did not bracket");
  }
  if (analytical_gaussian_delta(sigma, sensitivity, lo) <= target_delta) {
    return lo;
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (analytical_gaussian_delta(sigma, sensitivity, mid) <= target_delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace pldacct
