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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "pldacct/error_analysis.hpp"
#include "pldacct/mechanisms.hpp"
#include "pldacct/oracles.hpp"
#include "test_util.hpp"

using namespace pldacct;

namespace {

AtomicPld rr_pld(double p) {
  auto [fx, fy] = rr_outputs(p);
  return build_pld(fx, fy);
}

// Budget total by literal series summation, for small k.
double budget_total_by_series(std::int64_t k, const MgfPair& m, double L) {
  double series = 2.0 * std::exp(static_cast<double>(k) * m.alpha_plus) +
                  std::exp(static_cast<double>(k) * m.alpha_minus);
  for (std::int64_t l = 1; l < k; ++l) {
    series += std::exp(static_cast<double>(l) * m.alpha_plus) +
              std::exp(static_cast<double>(l) * m.alpha_minus);
  }
  const double decay = std::exp(-L * m.lambda);
  return series * decay / (1.0 - decay);
}

}  // namespace

TEST_CASE("mgf of simple PLDs") {
  const AtomicPld point({{0.2, 1.0}}, 0.0);
  const MgfPair m = mgf(point, 2.0);
  CHECK(m.alpha_plus == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(m.alpha_minus == doctest::Approx(-0.4).epsilon(1e-15));

  const MgfPair rr = mgf(rr_pld(0.75), 1.0);
  CHECK(rr.alpha_plus == doctest::Approx(std::log(7.0 / 3.0)).epsilon(1e-14));

  const AtomicPld at_zero({{0.0, 1.0}}, 0.0);
  const MgfPair z = mgf(at_zero, 3.0);
  CHECK(z.alpha_plus == 0.0);
  CHECK(z.alpha_minus == 0.0);

  CHECK_THROWS_AS(mgf(at_zero, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mgf(AtomicPld({}, 1.0), 1.0), std::invalid_argument);
}

TEST_CASE("mgf agrees with the probability-ratio power sum") {
  auto [fx, fy] = rr_outputs(0.75);
  const AtomicPld pld = build_pld(fx, fy);
  for (double lambda : {0.5, 1.0, 2.5}) {
    double ratio_sum = 0.0;
    for (const OutcomeProb& x : fx.atoms()) {
      ratio_sum += std::pow(x.prob / fy.prob_of(x.outcome), lambda) * x.prob;
    }
    CHECK(mgf(pld, lambda).alpha_plus ==
          doctest::Approx(std::log(ratio_sum)).epsilon(1e-12));
  }
}

TEST_CASE("chernoff_tail") {
  CHECK(chernoff_tail(1, 0.0, 1.0, 10.0) ==
        doctest::Approx(std::exp(-10.0)).epsilon(1e-15));
  CHECK(chernoff_tail(0, 0.7, 2.0, 5.0) ==
        doctest::Approx(std::exp(-10.0)).epsilon(1e-15));
  const double ap = mgf(rr_pld(0.75), 1.0).alpha_plus;
  CHECK(chernoff_tail(10, ap, 1.0, 20.0) ==
        doctest::Approx(std::exp(10.0 * std::log(7.0 / 3.0) - 20.0))
            .epsilon(1e-13));
  CHECK(chernoff_tail(1000, 10.0, 1.0, 20.0) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("error budget degenerates to term counts at zero exponents") {
  const MgfPair zero{0.0, 0.0, 1.0};
  const double L = 20.0;
  const double f = std::exp(-20.0) / (1.0 - std::exp(-20.0));
  for (std::int64_t k : {1, 2, 5, 100}) {
    const ErrorBudget b = error_budget(k, zero, L);
    CHECK(b.total ==
          doctest::Approx(budget_total_by_series(k, zero, L)).epsilon(1e-12));
    CHECK(b.total == doctest::Approx((2.0 * k + 1.0) * f).epsilon(1e-12));
    CHECK(b.tail == doctest::Approx(std::exp(-20.0)).epsilon(1e-12));
    CHECK(b.truncation ==
          doctest::Approx(2.0 * (k - 1.0) * std::exp(-20.0)).epsilon(1e-12));
    CHECK(b.periodisation == doctest::Approx(2.0 * f).epsilon(1e-12));
  }
}

TEST_CASE("error budget matches direct series summation") {
  const MgfPair m = mgf(rr_pld(0.75), 3.0);
  for (std::int64_t k : {1, 2, 7}) {
    const ErrorBudget b = error_budget(k, m, 20.0);
    CHECK(b.total ==
          doctest::Approx(budget_total_by_series(k, m, 20.0)).epsilon(1e-12));
    CHECK(b.total >= b.tail + b.truncation + b.periodisation - 1e-30);
  }
}

TEST_CASE("error budget vanishes as the window grows") {
  const MgfPair m = mgf(rr_pld(0.75), 2.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double L : {10.0, 20.0, 40.0, 80.0}) {
    const double total = error_budget(4, m, L).total;
    CHECK(total < prev);
    prev = total;
  }
  CHECK(prev < 1e-60);
}

TEST_CASE("budget dominates an observed window-widening difference") {
  // lambda small enough that the budget is well above roundoff.
  const AtomicPld pld = rr_pld(0.75);
  const GridSpec grid{20.0, 1 << 14};
  const double lambda = 0.3;
  const std::int64_t k = 8;
  const GridPld snapped = snap_left(pld, grid);
  const double d_small = delta_estimate(compose_self(snapped, k), 0.5);
  const GridSpec wide{60.0, 3 * (std::int64_t{1} << 14)};
  const GridPld embedded(
      wide,
      [&] {
        std::vector<double> m(static_cast<std::size_t>(wide.n), 0.0);
        const auto atoms = snapped.nonzero_atoms();
        for (const PldAtom& a : atoms) {
          const std::int64_t i = std::llround((a.s + wide.half_width) / wide.dx());
          m[static_cast<std::size_t>(i)] += a.mass;
        }
        return m;
      }(),
      snapped.delta_inf());
  const double d_ref = delta_estimate(compose_self(embedded, k), 0.5);
  const double budget = error_budget(k, mgf(snapped, lambda), 20.0).total;
  CHECK(budget > 1e-6);  // meaningfully large at this lambda
  CHECK(std::abs(d_ref - d_small) <= budget);
}

TEST_CASE("budget bounds the reference difference up to roundoff at the "
          "default lambda") {
  // At lambda = L/2 the budget underflows far below the transform roundoff,
  // so the comparison carries an explicit floating-point allowance.
  const AtomicPld pld = rr_pld(0.75);
  const GridSpec grid{20.0, 1 << 14};
  const std::int64_t k = 8;
  const GridPld snapped = snap_left(pld, grid);
  const double d_small = delta_estimate(compose_self(snapped, k), 0.5);
  const AtomicPld regrid(snapped.nonzero_atoms(), snapped.delta_inf());
  const GridSpec wide{60.0, 3 * (std::int64_t{1} << 14)};
  const double d_ref =
      delta_estimate(compose_self(snap_left(regrid, wide), k), 0.5);
  const double budget = error_budget(k, mgf(snapped, 10.0), 20.0).total;
  CHECK(std::abs(d_ref - d_small) <= budget + 1e-12);
}

TEST_CASE("snapped MGF inflation bounds") {
  const GridSpec grid{2.0, 8};  // dx = 0.5
  const MgfPair base{0.3, -0.1, 1.0};
  const auto [left, right] = snapped_mgf_bounds(base, grid);
  CHECK(left.alpha_plus == 0.3);
  CHECK(std::exp(left.alpha_minus) ==
        doctest::Approx(2.0 * std::exp(-0.1)).epsilon(1e-14));
  CHECK(right.alpha_minus == -0.1);
  CHECK(std::exp(right.alpha_plus) ==
        doctest::Approx(2.0 * std::exp(0.3)).epsilon(1e-14));
  const MgfPair too_big{0.0, 0.0, 2.1};
  CHECK_THROWS_WITH_AS(snapped_mgf_bounds(too_big, grid),
                       doctest::Contains("1/dx"), std::invalid_argument);
}

TEST_CASE("snapped MGF inflation dominates direct snapped MGFs") {
  std::mt19937_64 rng(11);
  const GridSpec grid{4.0, 512};
  for (int t = 0; t < 40; ++t) {
    const AtomicPld pld = testutil::random_pld(rng, grid, false);
    const double lambda = 0.9 / grid.dx();
    const MgfPair m_true = mgf(pld, lambda);
    const auto [bound_left, bound_right] = snapped_mgf_bounds(m_true, grid);
    const MgfPair direct_left = mgf(snap_left(pld, grid), lambda);
    const MgfPair direct_right = mgf(snap_right(pld, grid), lambda);
    CHECK(direct_left.alpha_plus <= bound_left.alpha_plus + 1e-12);
    CHECK(direct_left.alpha_minus <= bound_left.alpha_minus + 1e-12);
    CHECK(direct_right.alpha_plus <= bound_right.alpha_plus + 1e-12);
    CHECK(direct_right.alpha_minus <= bound_right.alpha_minus + 1e-12);
  }
  // On already-gridded atoms the snapped MGFs equal the true ones and the
  // inflation bound holds with slack.
  const GridSpec coarse{2.0, 16};
  const AtomicPld gridded({{coarse.point(3), 0.5}, {coarse.point(11), 0.5}}, 0.0);
  const double lambda = 0.5 / coarse.dx();
  const MgfPair m_true = mgf(gridded, lambda);
  const MgfPair m_snapped = mgf(snap_left(gridded, coarse), lambda);
  CHECK(m_snapped.alpha_plus == doctest::Approx(m_true.alpha_plus).epsilon(1e-14));
  const auto [bl, br] = snapped_mgf_bounds(m_true, coarse);
  CHECK(m_snapped.alpha_plus <= bl.alpha_plus + 1e-12);
  CHECK(m_snapped.alpha_minus < bl.alpha_minus);
}

TEST_CASE("strict_delta_bounds brackets the closed form") {
  const AtomicPld pld = rr_pld(0.75);
  const GridSpec grid{20.0, 1 << 16};
  const PrivacyBound bound = strict_delta_bounds(pld, grid, 1, 0.5, 10.0);
  const double closed = rr_closed_form_delta(0.75, 0.5);
  CHECK(bound.delta_lower <= closed);
  CHECK(closed <= bound.delta_upper);
  // The bracket width is the first-order snapping spread plus two budgets.
  const double expected_width =
      0.75 * std::exp(0.5 - std::log(3.0)) * grid.dx() * std::exp(grid.dx());
  CHECK(bound.delta_upper - bound.delta_lower <=
        expected_width * 1.01 + 2.0 * bound.err_bound);
  CHECK(bound.delta_upper - bound.delta_lower > 0.0);
}

TEST_CASE("strict_delta_bounds on the identity PLD") {
  const AtomicPld identity({{0.0, 1.0}}, 0.0);
  const GridSpec grid{20.0, 1 << 12};
  const PrivacyBound bound = strict_delta_bounds(identity, grid, 3, 0.5, 10.0);
  CHECK(bound.delta_lower == 0.0);
  CHECK(bound.delta_upper <= 1e-80);  // the budget at these settings
}

TEST_CASE("strict_delta_bounds contains the exact composed delta") {
  const AtomicPld pld = rr_pld(0.75);
  // k = 50 drifts the composed loss far right; the window must cover it.
  const GridSpec grid{80.0, 1 << 18};
  const PrivacyBound bound = strict_delta_bounds(pld, grid, 50, 3.0, 2.0);
  const double exact = delta_exact(pld, 3.0, 50);
  CHECK(bound.delta_lower <= exact);
  CHECK(exact <= bound.delta_upper);
  CHECK(bound.delta_upper - bound.delta_lower < 1e-3);
}

TEST_CASE("strict_delta_bounds contains the exact delta on random PLDs") {
  std::mt19937_64 rng(2024);
  const GridSpec grid{24.0, 1 << 12};
  std::uniform_real_distribution<double> eps_dist(0.0, 1.5);
  for (int t = 0; t < 30; ++t) {
    // Atoms within L/(3k) keep every composition inside the window.
    const GridSpec narrow{grid.half_width / 8.0, grid.n};
    const AtomicPld pld = testutil::random_pld(rng, narrow);
    const std::int64_t k = 1 + static_cast<std::int64_t>(t % 3);
    const double eps = eps_dist(rng);
    const PrivacyBound bound = strict_delta_bounds(pld, grid, k, eps, 2.0);
    const double exact = delta_exact(pld, eps, k);
    CHECK(bound.delta_lower <= exact + 1e-12);
    CHECK(exact <= bound.delta_upper + 1e-12);
  }
}

TEST_CASE("strict_delta_bounds validates lambda against the grid") {
  const GridSpec grid{20.0, 16};  // dx = 2.5
  CHECK_THROWS_WITH_AS(
      strict_delta_bounds(rr_pld(0.75), grid, 1, 0.5, 1.0),
      doctest::Contains("1/dx"), std::invalid_argument);
}

TEST_CASE("subsampled gaussian envelope constant and tail correction") {
  CHECK(subsampled_gaussian_envelope_constant(0.02, 2.0) ==
        doctest::Approx(12.375503299472802).epsilon(1e-14));
  const double dx = 16.0 / 1e5;
  const double err = subsampled_gaussian_mgf_err(0.02, 2.0, 8.0, dx, 4.0);
  CHECK(err < 1e-20);
  CHECK(err >= 0.0);
  // The correction decays as the window grows.
  CHECK(subsampled_gaussian_mgf_err(0.02, 2.0, 16.0, dx, 4.0) < err);
}

TEST_CASE("subsampled gaussian MGF bound preconditions") {
  const GridSpec grid{8.0, 1000};
  CHECK_THROWS_WITH_AS(
      subsampled_gaussian_mgf_bound(0.02, 0.5, grid, CellSide::kMax, 4.0,
                                    MgfSign::kPlus),
      doctest::Contains("sigma >= 1"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      subsampled_gaussian_mgf_bound(0.7, 2.0, grid, CellSide::kMax, 4.0,
                                    MgfSign::kPlus),
      doctest::Contains("0 < q <= 1/2"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      subsampled_gaussian_mgf_bound(0.02, 2.0, grid, CellSide::kMax, 9.0,
                                    MgfSign::kPlus),
      doctest::Contains("0 < lambda <= L"), std::invalid_argument);
  const GridSpec tiny{0.5, 1000};
  CHECK_THROWS_WITH_AS(
      subsampled_gaussian_mgf_bound(0.5, 2.0, tiny, CellSide::kMax, 0.2,
                                    MgfSign::kPlus),
      doctest::Contains("|log(1-q)|"), std::invalid_argument);
}

TEST_CASE("subsampled gaussian MGF bound dominates the finite sum") {
  const GridSpec grid{8.0, 5000};
  const double q = 0.02, sigma = 2.0, lambda = 4.0;
  const GridPld cells = discretize_continuous(
      subsampled_gaussian_density(q, sigma), std::log1p(-q), grid,
      CellSide::kMax);
  double finite_sum = 0.0;
  for (std::int64_t i = 0; i < grid.n; ++i) {
    finite_sum += std::exp(lambda * grid.point(i)) *
                  cells.mass()[static_cast<std::size_t>(i)];
  }
  const double bound = discretized_sg_mgf_bound(cells, q, sigma, lambda,
                                                MgfSign::kPlus);
  CHECK(bound >= finite_sum);
  CHECK(bound == doctest::Approx(finite_sum).epsilon(1e-9));
  CHECK(bound == doctest::Approx(std::exp(mgf(cells, lambda).alpha_plus))
                     .epsilon(1e-9));
}

TEST_CASE("default lambda is half the window unless the grid is too coarse") {
  CHECK(default_lambda(GridSpec{20.0, 1 << 16}).lambda == 10.0);
  CHECK_FALSE(default_lambda(GridSpec{20.0, 1 << 16}).reduced);
  const LambdaChoice reduced = default_lambda(GridSpec{20.0, 16});
  CHECK(reduced.reduced);
  CHECK(reduced.lambda == doctest::Approx(0.99 / 2.5).epsilon(1e-15));
}
