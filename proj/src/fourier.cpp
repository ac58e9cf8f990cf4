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

#include "pldacct/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace pldacct {
namespace {

// FFTW planning is not thread-safe; executing a cached plan on fresh
// aligned buffers is. Plans are cached per transform size and kept for the
// process lifetime.
struct PlanPair {
  fftw_plan forward = nullptr;   // real to half-complex
  fftw_plan backward = nullptr;  // half-complex to real
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(std::size_t n, double* real_buf, fftw_complex* cplx_buf) {
  static std::map<std::size_t, PlanPair>* cache =
      new std::map<std::size_t, PlanPair>();
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache->find(n);
  if (it != cache->end()) return it->second;
  PlanPair pair;
  pair.forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_buf, cplx_buf,
                                      FFTW_ESTIMATE);
  pair.backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx_buf, real_buf,
                                       FFTW_ESTIMATE);
  if (pair.forward == nullptr || pair.backward == nullptr) {
    throw std::runtime_error("transform planning failed");
  }
  (*cache)[n] = pair;
  return pair;
}

struct Workspace {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  std::size_t n = 0;
  explicit Workspace(std::size_t size) : n(size) {
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    if (real == nullptr || cplx == nullptr) {
      fftw_free(real);
      fftw_free(cplx);
      throw std::bad_alloc();
    }
  }
  ~Workspace() {
    fftw_free(real);
    fftw_free(cplx);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
};

// Scratch buffers are reused per thread and per size; concurrent calls never
// share them.
Workspace& workspace_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Workspace>> cache;
  std::unique_ptr<Workspace>& slot = cache[n];
  if (!slot) slot = std::make_unique<Workspace>(n);
  return *slot;
}

std::complex<double> complex_pow(std::complex<double> base, std::int64_t k) {
  std::complex<double> result(1.0, 0.0);
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

// Loads the half-swapped mass vector and runs the forward transform.
void forward_shifted(const GridPld& pld, Workspace& ws) {
  const std::size_t n = ws.n;
  const std::size_t half = n / 2;
  const double* mass = pld.mass().data();
  std::copy(mass + half, mass + n, ws.real);
  std::copy(mass, mass + half, ws.real + half);
  fftw_execute_dft_r2c(plans_for(n, ws.real, ws.cplx).forward, ws.real,
                       ws.cplx);
}

// Inverse transform of ws.cplx, scaled and half-swapped into a mass vector.
std::vector<double> inverse_shifted(Workspace& ws) {
  const std::size_t n = ws.n;
  const std::size_t half = n / 2;
  fftw_execute_dft_c2r(plans_for(n, ws.real, ws.cplx).backward, ws.cplx,
                       ws.real);
  std::vector<double> mass(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < half; ++i) {
    mass[i] = ws.real[half + i] * inv_n;
    mass[half + i] = ws.real[i] * inv_n;
  }
  return mass;
}

ComposedGridPld finish(const GridSpec& grid, std::vector<double> mass,
                       std::int64_t k, double delta_inf_composed) {
  double min_mass = 0.0;
  for (double m : mass) {
    if (!std::isfinite(m)) {
      throw std::domain_error(
          "composition overflowed; the grid mass total raised to k exceeds "
          "the double range");
    }
    min_mass = std::min(min_mass, m);
  }
  return ComposedGridPld{grid, std::move(mass), k, delta_inf_composed,
                         min_mass};
}

}  // namespace

std::vector<double> fft_shift(std::vector<double> v) {
  if (v.size() % 2 != 0) {
    throw std::invalid_argument("fft_shift requires an even-length vector");
  }
  std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2),
              v.end());
  return v;
}

ComposedGridPld compose_self(const GridPld& pld, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("composition count k must be >= 1");
  const double dinf = delta_infty_composed(pld.delta_inf(), k);
  if (k == 1) {
    // The first elementwise power and the transform round trip are the
    // identity; skip them.
    return finish(pld.grid(), pld.mass(), 1, dinf);
  }
  Workspace& ws = workspace_for(pld.mass().size());
  forward_shifted(pld, ws);
  for (std::size_t i = 0; i < ws.n / 2 + 1; ++i) {
    const std::complex<double> z =
        complex_pow({ws.cplx[i][0], ws.cplx[i][1]}, k);
    ws.cplx[i][0] = z.real();
    ws.cplx[i][1] = z.imag();
  }
  return finish(pld.grid(), inverse_shifted(ws), k, dinf);
}

ComposedGridPld compose_heterogeneous(const std::vector<GridPld>& plds) {
  if (plds.empty()) {
    throw std::invalid_argument("heterogeneous composition needs >= 1 PLD");
  }
  const GridSpec& grid = plds.front().grid();
  double one_minus_dinf = 1.0;
  for (const GridPld& p : plds) {
    if (!(p.grid() == grid)) {
      throw std::invalid_argument(
          "heterogeneous composition requires a shared grid");
    }
    one_minus_dinf *= 1.0 - p.delta_inf();
  }
  const std::size_t n = plds.front().mass().size();
  Workspace& ws = workspace_for(n);
  forward_shifted(plds.front(), ws);
  if (plds.size() > 1) {
    Workspace factor(n);
    std::vector<std::complex<double>> product(n / 2 + 1);
    for (std::size_t i = 0; i < product.size(); ++i) {
      product[i] = {ws.cplx[i][0], ws.cplx[i][1]};
    }
    for (std::size_t j = 1; j < plds.size(); ++j) {
      forward_shifted(plds[j], factor);
      for (std::size_t i = 0; i < product.size(); ++i) {
        product[i] *= std::complex<double>{factor.cplx[i][0],
                                           factor.cplx[i][1]};
      }
    }
    for (std::size_t i = 0; i < product.size(); ++i) {
      ws.cplx[i][0] = product[i].real();
      ws.cplx[i][1] = product[i].imag();
    }
  }
  return finish(grid, inverse_shifted(ws),
                static_cast<std::int64_t>(plds.size()), 1.0 - one_minus_dinf);
}

double delta_estimate(const ComposedGridPld& comp, double eps) {
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  const GridSpec& grid = comp.grid;
  const double dx = grid.dx();
  // First index with grid point strictly above eps.
  std::int64_t l_eps =
      static_cast<std::int64_t>(
          std::floor((eps + grid.half_width) / dx)) + 1;
  while (l_eps > 0 && grid.point(l_eps - 1) > eps) --l_eps;
  while (l_eps < grid.n && grid.point(l_eps) <= eps) ++l_eps;
  double sum = 0.0;
  for (std::int64_t l = std::max<std::int64_t>(l_eps, 0); l < grid.n; ++l) {
    const double m = comp.mass[static_cast<std::size_t>(l)];
    if (m <= 0.0) continue;  // FFT roundoff negatives are clamped here
    sum += (1.0 - std::exp(eps - grid.point(l))) * m;
  }
  return std::clamp(comp.delta_inf_composed + sum, 0.0, 1.0);
}

double epsilon_for_delta(const std::function<double(double)>& delta_of_eps,
                         double target_delta, double eps_lo, double eps_hi,
                         BoundRole role) {
  if (!(target_delta > 0.0 && target_delta < 1.0)) {
    throw std::invalid_argument("target delta must lie in (0, 1)");
  }
  if (!(eps_lo <= eps_hi)) {
    throw std::invalid_argument("eps range must satisfy lo <= hi");
  }
  constexpr double kTol = 1e-9;
  const double d_lo = delta_of_eps(eps_lo);
  if (d_lo <= target_delta) return eps_lo;
  const double d_hi = delta_of_eps(eps_hi);
  if (d_hi > target_delta) {
    std::ostringstream msg;
    msg << "target delta " << target_delta
        << " is outside the achieved range: delta(" << eps_lo << ")=" << d_lo
        << ", delta(" << eps_hi << ")=" << d_hi;
    throw std::invalid_argument(msg.str());
  }
  double lo = eps_lo, hi = eps_hi;
  while (hi - lo > kTol) {
    const double mid = 0.5 * (lo + hi);
    if (delta_of_eps(mid) <= target_delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return role == BoundRole::kUpperCurve ? hi : lo;
}

}  // namespace pldacct
