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

#ifndef PLDACCT_ORACLES_HPP_
#define PLDACCT_ORACLES_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pldacct/pld.hpp"

namespace pldacct {

// Slow-but-independent reference computations. They ship in the library so
// the command line can cross-check its own reports (`--verify`).

struct OracleReport {
  enum class Method {
    kDirectConvolution,
    kClosedForm,
    kQuadrature,
    kExhaustiveEnumeration,
  };
  double reference_value = 0.0;
  Method method = Method::kClosedForm;
  std::string cost_note;
};

// O(k n^2) evaluation of the truncated, 2L-periodised k-fold self-convolution
// of a grid mass vector, by direct index arithmetic
// (b_i = sum_{j=n/2}^{3n/2-1} a_j a_{i-j}, indices modulo n). Guarded to
// n <= 1024, k <= 6.
std::vector<double> direct_truncated_periodised_convolution(
    const std::vector<double>& mass, std::int64_t k);

// Exact delta(eps) of the k-fold composition by sparse atom arithmetic,
// no grid. Same definition as delta_exact; budget-guarded.
double exact_atom_convolution_delta(const AtomicPld& pld, std::int64_t k,
                                    double eps);

// Closed-form tight delta of randomised response for 1/2 < p < 1:
// p (1 - e^(eps - c_p)) for eps <= c_p = log(p/(1-p)), else 0.
double rr_closed_form_delta(double p, double eps);

// Adaptive Simpson integration to absolute tolerance tol.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol);

// Quadrature evaluation of the single-composition delta integral
// int_eps^inf (1 - e^(eps - s)) omega(s) ds for a continuous PLD density
// supported on (s_lo, s_hi); absolute error target 1e-10 or better.
double continuous_delta_quadrature(const std::function<double(double)>& omega,
                                   double eps, double s_lo, double s_hi);

// Tight delta(eps) of the Gaussian mechanism,
// Phi(D/(2 sigma) - eps sigma/D) - e^eps Phi(-D/(2 sigma) - eps sigma/D).
double analytical_gaussian_delta(double sigma, double sensitivity, double eps);

// Inverts analytical_gaussian_delta in eps by bisection.
double analytical_gaussian_epsilon(double sigma, double sensitivity,
                                   double target_delta);

}  // namespace pldacct

#endif  // PLDACCT_ORACLES_HPP_
