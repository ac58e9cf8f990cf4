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
#include <string>

#include "pldacct/grid.hpp"
#include "pldacct/mechanisms.hpp"
#include "pldacct/oracles.hpp"
#include "test_util.hpp"

using namespace pldacct;

TEST_CASE("grid validation and geometry") {
  CHECK_THROWS_AS(validate_grid(GridSpec{0.0, 8}), std::invalid_argument);
  CHECK_THROWS_AS(validate_grid(GridSpec{1.0, 7}), std::invalid_argument);
  const GridSpec grid{1.0, 4};
  CHECK(grid.dx() == 0.5);
  CHECK(grid.point(0) == -1.0);
  CHECK(grid.point(3) == 0.5);
  CHECK(grid.dx() * static_cast<double>(grid.n) == 2.0 * grid.half_width);
}

TEST_CASE("snap_left floors atoms to the grid") {
  const GridSpec grid{1.0, 4};  // points {-1, -0.5, 0, 0.5}
  const GridPld g = snap_left(AtomicPld({{0.3, 1.0}}, 0.0), grid);
  CHECK(g.mass() == std::vector<double>{0.0, 0.0, 1.0, 0.0});

  // An atom already on a grid point stays put.
  const GridPld on = snap_left(AtomicPld({{-0.5, 0.4}}, 0.6), grid);
  CHECK(on.mass()[1] == 0.4);
  CHECK(on.delta_inf() == 0.6);

  const GridPld two =
      snap_left(AtomicPld({{-0.3, 0.5}, {0.3, 0.5}}, 0.0), grid);
  CHECK(two.mass() == std::vector<double>{0.0, 0.5, 0.5, 0.0});
}

TEST_CASE("snap_right ceils atoms to the grid") {
  const GridSpec grid{1.0, 4};
  CHECK(snap_right(AtomicPld({{0.3, 1.0}}, 0.0), grid).mass() ==
        std::vector<double>{0.0, 0.0, 0.0, 1.0});
  CHECK(snap_right(AtomicPld({{0.5, 1.0}}, 0.0), grid).mass() ==
        std::vector<double>{0.0, 0.0, 0.0, 1.0});
  CHECK(snap_right(AtomicPld({{-0.3, 0.5}, {0.3, 0.5}}, 0.0), grid).mass() ==
        std::vector<double>{0.0, 0.0, 0.5, 0.5});
}

TEST_CASE("out-of-range atoms are an error, not a clip") {
  const GridSpec grid{1.0, 4};
  for (double s : {0.9, -1.2, 0.5001}) {
    const AtomicPld pld({{s, 1.0}}, 0.0);
    CHECK_THROWS_WITH_AS(snap_left(pld, grid),
                         doctest::Contains("increase the grid half-width"),
                         std::invalid_argument);
    CHECK_THROWS_AS(snap_right(pld, grid), std::invalid_argument);
  }
}

TEST_CASE("snapping conserves total mass") {
  std::mt19937_64 rng(5);
  const GridSpec grid{4.0, 256};
  for (int t = 0; t < 50; ++t) {
    const AtomicPld pld = testutil::random_pld(rng, grid);
    const GridPld left = snap_left(pld, grid);
    const GridPld right = snap_right(pld, grid);
    CHECK(left.total_mass() ==
          doctest::Approx(pld.total_mass()).epsilon(1e-15));
    CHECK(right.total_mass() ==
          doctest::Approx(pld.total_mass()).epsilon(1e-15));
  }
  // Atoms on distinct cells accumulate in index order, so the totals agree
  // exactly.
  const AtomicPld sparse({{-2.0, 0.125}, {0.5, 0.25}, {3.0, 0.625}}, 0.0);
  CHECK(snap_left(sparse, grid).total_mass() == sparse.total_mass());
}

TEST_CASE("both snaps agree on already-gridded atoms") {
  const GridSpec grid{2.0, 16};
  std::vector<PldAtom> atoms;
  for (std::int64_t i : {1, 5, 9, 12}) {
    atoms.push_back({grid.point(i), 0.25});
  }
  const AtomicPld pld(std::move(atoms), 0.0);
  CHECK(snap_left(pld, grid).mass() == snap_right(pld, grid).mass());
}

TEST_CASE("grid bracket ordering on random PLDs") {
  std::mt19937_64 rng(17);
  const GridSpec grid{4.0, 512};
  for (int t = 0; t < 25; ++t) {
    const AtomicPld pld = testutil::random_pld(rng, grid);
    for (double eps : {0.0, 0.4, 1.3}) {
      const double exact = delta_exact(pld, eps, 1);
      const double lo = testutil::direct_grid_delta(snap_left(pld, grid), eps);
      const double hi = testutil::direct_grid_delta(snap_right(pld, grid), eps);
      CHECK(lo <= exact + 1e-12);
      CHECK(exact <= hi + 1e-12);
    }
  }
}

TEST_CASE("constant density gives equal min and max cells") {
  const GridSpec grid{1.0, 8};
  const double c = 0.37;
  auto density = [c](double) { return c; };
  const GridPld lo = discretize_continuous(density, -100.0, grid, CellSide::kMin);
  const GridPld hi = discretize_continuous(density, -100.0, grid, CellSide::kMax);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(lo.mass()[i] == doctest::Approx(grid.dx() * c).epsilon(1e-14));
    CHECK(hi.mass()[i] == doctest::Approx(grid.dx() * c).epsilon(1e-14));
  }
}

TEST_CASE("riemann cells bracket the cell integrals of the subsampled "
          "gaussian density") {
  const double q = 0.02, sigma = 2.0;
  const auto omega = subsampled_gaussian_density(q, sigma);
  const GridSpec grid{8.0, 2000};
  const GridPld lo = discretize_continuous(omega, std::log1p(-q), grid,
                                           CellSide::kMin);
  const GridPld hi = discretize_continuous(omega, std::log1p(-q), grid,
                                           CellSide::kMax);
  // Spot-check cells across the support, including the steep left edge.
  for (std::int64_t i : {995, 998, 1000, 1004, 1040, 1200, 1600}) {
    const double a = grid.point(i);
    const double b = a + grid.dx();
    const double cell_integral = integrate_adaptive(
        [&](double s) { return s <= std::log1p(-q) ? 0.0 : omega(s); }, a, b,
        1e-14);
    CHECK(lo.mass()[static_cast<std::size_t>(i)] <= cell_integral + 1e-13);
    // The max cell for [a, b] is stored at the right edge index i+1.
    CHECK(cell_integral <=
          hi.mass()[static_cast<std::size_t>(i + 1)] + 1e-13);
  }
}

TEST_CASE("pointwise cell bracket under dense sampling") {
  const double q = 0.02, sigma = 2.0;
  const auto omega = subsampled_gaussian_density(q, sigma);
  const GridSpec grid{8.0, 4096};
  const GridPld lo = discretize_continuous(omega, std::log1p(-q), grid,
                                           CellSide::kMin);
  const GridPld hi = discretize_continuous(omega, std::log1p(-q), grid,
                                           CellSide::kMax);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::int64_t i = 2040; i < 2300; ++i) {
    for (int r = 0; r < 8; ++r) {
      const double xi = grid.point(i) + unit(rng) * grid.dx();
      const double value = grid.dx() * omega(xi);
      CHECK(lo.mass()[static_cast<std::size_t>(i)] <= value + 1e-13);
      CHECK(value <= hi.mass()[static_cast<std::size_t>(i + 1)] + 1e-13);
    }
  }
}
