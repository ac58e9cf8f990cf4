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

#include "pldacct/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pldacct/error_analysis.hpp"
#include "pldacct/fourier.hpp"
#include "pldacct/oracles.hpp"
#include "pldacct/pld_csv.hpp"

namespace pldacct {
namespace {

using json = nlohmann::json;

// One snapped-and-composed loss direction, reusable across eps probes.
struct ComposedDirection {
  ComposedGridPld comp_left;
  ComposedGridPld comp_right;
  ErrorBudget budget_left;
  ErrorBudget budget_right;
};

struct Pipeline {
  std::vector<ComposedDirection> directions;
  GridSpec grid;
  std::int64_t k = 1;
  double lambda = 0.0;

  double lower_at(double eps) const {
    double best = 0.0;
    for (const auto& d : directions) {
      best = std::max(best, std::max(0.0, delta_estimate(d.comp_left, eps) -
                                              d.budget_left.total));
    }
    return best;
  }
  double upper_at(double eps) const {
    double best = 0.0;
    for (const auto& d : directions) {
      best = std::max(best, std::min(1.0, delta_estimate(d.comp_right, eps) +
                                              d.budget_right.total));
    }
    return best;
  }
  ErrorBudget worst_budget() const {
    ErrorBudget w;
    for (const auto& d : directions) {
      for (const ErrorBudget* b : {&d.budget_left, &d.budget_right}) {
        w.tail = std::max(w.tail, b->tail);
        w.truncation = std::max(w.truncation, b->truncation);
        w.periodisation = std::max(w.periodisation, b->periodisation);
        w.total = std::max(w.total, b->total);
        w.lambda_used = b->lambda_used;
      }
    }
    return w;
  }
};

Pipeline build_pipeline(const RunConfig& config, double lambda) {
  Pipeline pipe;
  pipe.grid = GridSpec{config.half_width, config.n_grid};
  pipe.k = config.k;
  pipe.lambda = lambda;
  if (config.mechanism.kind == MechanismSpec::Kind::kSubsampledGaussian) {
    const double q = config.mechanism.q;
    const double sigma = config.mechanism.sigma;
    const auto density = subsampled_gaussian_density(q, sigma);
    const double support_left = std::log1p(-q);
    const GridPld cmin = discretize_continuous(density, support_left,
                                               pipe.grid, CellSide::kMin);
    const GridPld cmax = discretize_continuous(density, support_left,
                                               pipe.grid, CellSide::kMax);
    ComposedDirection dir;
    dir.comp_left = compose_self(cmin, config.k);
    dir.comp_right = compose_self(cmax, config.k);
    const MgfPair mmin{std::log(discretized_sg_mgf_bound(cmin, q, sigma, lambda,
                                                         MgfSign::kPlus)),
                       std::log(discretized_sg_mgf_bound(cmin, q, sigma, lambda,
                                                         MgfSign::kMinus)),
                       lambda};
    const MgfPair mmax{std::log(discretized_sg_mgf_bound(cmax, q, sigma, lambda,
                                                         MgfSign::kPlus)),
                       std::log(discretized_sg_mgf_bound(cmax, q, sigma, lambda,
                                                         MgfSign::kMinus)),
                       lambda};
    dir.budget_left = error_budget(config.k, mmin, pipe.grid.half_width);
    dir.budget_right = error_budget(config.k, mmax, pipe.grid.half_width);
    pipe.directions.push_back(std::move(dir));
    return pipe;
  }
  for (const AtomicPld& pld : mechanism_plds(config.mechanism)) {
    ComposedDirection dir;
    const GridPld left = snap_left(pld, pipe.grid);
    const GridPld right = snap_right(pld, pipe.grid);
    dir.comp_left = compose_self(left, config.k);
    dir.comp_right = compose_self(right, config.k);
    dir.budget_left =
        error_budget(config.k, mgf(left, lambda), pipe.grid.half_width);
    dir.budget_right =
        error_budget(config.k, mgf(right, lambda), pipe.grid.half_width);
    pipe.directions.push_back(std::move(dir));
  }
  return pipe;
}

double sanitize(double v) {
  if (std::isnan(v)) return 0.0;
  if (!std::isfinite(v)) {
    return v > 0 ? std::numeric_limits<double>::max()
                 : std::numeric_limits<double>::lowest();
  }
  return v;
}

json budget_json(const ErrorBudget& b, const Pipeline& pipe) {
  return json{{"err_total", sanitize(b.total)},
              {"err_tail", sanitize(b.tail)},
              {"err_trunc", sanitize(b.truncation)},
              {"err_period", sanitize(b.periodisation)},
              {"lambda", pipe.lambda},
              {"grid", {{"L", pipe.grid.half_width}, {"n", pipe.grid.n}}},
              {"k", pipe.k}};
}

std::int64_t sweep_threads() {
  if (const char* env = std::getenv("PLD_ACCT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<std::int64_t>(hw);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Reference value from the cheapest applicable oracle, if any.
struct VerifyCheck {
  OracleReport report;
  bool applicable = false;
};

VerifyCheck delta_oracle(const RunConfig& config) {
  VerifyCheck check;
  const MechanismSpec& mech = config.mechanism;
  const double eps = config.eps.value_or(0.0);
  if (mech.kind == MechanismSpec::Kind::kSubsampledGaussian) {
    if (config.k != 1) return check;
    const double sigma = mech.sigma;
    const double C = sigma * sigma * std::log(1.0 / (2.0 * mech.q)) - 0.5;
    const double s_hi =
        std::max(config.half_width,
                 (sigma * std::sqrt(1480.0) - C) / (sigma * sigma)) + 1.0;
    check.report.reference_value = continuous_delta_quadrature(
        subsampled_gaussian_density(mech.q, sigma), eps, std::log1p(-mech.q),
        s_hi);
    check.report.method = OracleReport::Method::kQuadrature;
    check.report.cost_note = "adaptive quadrature of the single-composition integral";
    check.applicable = true;
    return check;
  }
  // Exact sparse composition, when the atom budget allows it.
  const std::vector<AtomicPld> plds = mechanism_plds(mech);
  std::size_t max_atoms = 0;
  for (const AtomicPld& p : plds) max_atoms = std::max(max_atoms, p.atoms().size());
  const bool cheap =
      (config.k == 1 && max_atoms <= 2'000'000) ||
      (max_atoms <= 2 && config.k <= 4096);
  if (!cheap) return check;
  double best = 0.0;
  for (const AtomicPld& p : plds) {
    best = std::max(best, exact_atom_convolution_delta(p, config.k, eps));
  }
  check.report.reference_value = best;
  check.report.method = OracleReport::Method::kDirectConvolution;
  check.report.cost_note = "exact sparse atom composition";
  check.applicable = true;
  return check;
}

}  // namespace

RunResult run(const RunConfig& config) {
  std::ostringstream log;
  RunResult result;
  try {
    if (config.curve.has_value()) {
      if (config.delta_target.has_value()) {
        throw std::invalid_argument("--curve sweeps eps; --delta does not apply");
      }
    } else if (config.eps.has_value() == config.delta_target.has_value()) {
      throw std::invalid_argument(
          "exactly one of --eps and --delta must be given");
    }
    if (config.eps.has_value() && config.eps.value() < 0.0) {
      throw std::invalid_argument("eps must be >= 0");
    }
    GridSpec grid{config.half_width, config.n_grid};
    validate_grid(grid);

    double lambda;
    if (config.lambda.has_value()) {
      lambda = config.lambda.value();
      if (!(lambda > 0.0) || lambda * grid.dx() >= 1.0) {
        std::ostringstream msg;
        msg << "lambda must satisfy 0 < lambda < 1/dx = " << 1.0 / grid.dx()
            << " so the grid MGF bounds apply; lower lambda or raise n";
        throw std::invalid_argument(msg.str());
      }
    } else {
      const LambdaChoice choice = default_lambda(grid);
      lambda = choice.lambda;
      if (choice.reduced) {
        log << "warning: default lambda = L/2 violates lambda < 1/dx; reduced "
               "to "
            << format_number(lambda) << "\n";
      }
    }

    const auto t0 = std::chrono::steady_clock::now();
    const Pipeline pipe = build_pipeline(config, lambda);
    auto wall_ms = [&t0]() {
      return std::chrono::duration<double, std::milli>(
                 std::chrono::steady_clock::now() - t0)
          .count();
    };

    if (config.curve.has_value()) {
      const CurveSweep& sweep = config.curve.value();
      if (sweep.points < 2 || !(sweep.eps_max >= sweep.eps_min) ||
          sweep.eps_min < 0.0) {
        throw std::invalid_argument("curve sweep bounds are invalid");
      }
      std::vector<double> lowers(static_cast<std::size_t>(sweep.points));
      std::vector<double> uppers(static_cast<std::size_t>(sweep.points));
      const double step = sweep.points == 1
                              ? 0.0
                              : (sweep.eps_max - sweep.eps_min) /
                                    static_cast<double>(sweep.points - 1);
      const std::int64_t n_threads =
          std::min<std::int64_t>(sweep_threads(), sweep.points);
      std::vector<std::thread> workers;
      workers.reserve(static_cast<std::size_t>(n_threads));
      for (std::int64_t t = 0; t < n_threads; ++t) {
        workers.emplace_back([&, t]() {
          for (std::int64_t i = t; i < sweep.points; i += n_threads) {
            const double eps = sweep.eps_min + step * static_cast<double>(i);
            lowers[static_cast<std::size_t>(i)] = pipe.lower_at(eps);
            uppers[static_cast<std::size_t>(i)] = pipe.upper_at(eps);
          }
        });
      }
      for (auto& w : workers) w.join();
      std::ostringstream out;
      out << "eps,delta_lower,delta_upper\n";
      for (std::int64_t i = 0; i < sweep.points; ++i) {
        const double eps = sweep.eps_min + step * static_cast<double>(i);
        out << format_number(eps) << ","
            << format_number(lowers[static_cast<std::size_t>(i)]) << ","
            << format_number(uppers[static_cast<std::size_t>(i)]) << "\n";
      }
      result.output = out.str();
      result.log = log.str();
      return result;
    }

    json report = budget_json(pipe.worst_budget(), pipe);
    bool verify_failed = false;
    if (config.eps.has_value()) {
      const double eps = config.eps.value();
      const double lower = pipe.lower_at(eps);
      const double upper = pipe.upper_at(eps);
      report["delta_lower"] = lower;
      report["delta_upper"] = upper;
      if (config.verify) {
        const VerifyCheck check = delta_oracle(config);
        if (check.applicable) {
          const double ref = check.report.reference_value;
          const bool inside = lower <= ref && ref <= upper;
          log << "verify: " << check.report.cost_note << " delta="
              << format_number(ref) << " bracket=["
              << format_number(lower) << ", " << format_number(upper)
              << "] -> " << (inside ? "OK" : "MISMATCH") << "\n";
          if (!inside) verify_failed = true;
        } else {
          log << "verify: no oracle applicable at this size\n";
        }
      }
    } else {
      const double target = config.delta_target.value();
      const double eps_hi = grid.half_width;
      const double eps_upper = epsilon_for_delta(
          [&](double e) { return pipe.upper_at(e); }, target, 0.0, eps_hi,
          BoundRole::kUpperCurve);
      const double eps_lower = epsilon_for_delta(
          [&](double e) { return pipe.lower_at(e); }, target, 0.0, eps_hi,
          BoundRole::kLowerCurve);
      report["eps_lower"] = eps_lower;
      report["eps_upper"] = eps_upper;
      report["delta_target"] = target;
      if (config.verify) {
        RunConfig probe = config;
        probe.eps = 0.0;
        const VerifyCheck at_zero = delta_oracle(probe);
        if (at_zero.applicable) {
          // Invert the oracle's own delta curve and check it lands inside
          // the reported eps bracket.
          auto oracle_delta = [&](double e) {
            RunConfig c = config;
            c.eps = e;
            return delta_oracle(c).report.reference_value;
          };
          const double ref_eps =
              oracle_delta(0.0) <= target
                  ? 0.0
                  : epsilon_for_delta(oracle_delta, target, 0.0, eps_hi,
                                      BoundRole::kUpperCurve);
          const bool inside =
              eps_lower - 1e-6 <= ref_eps && ref_eps <= eps_upper + 1e-6;
          log << "verify: oracle eps=" << format_number(ref_eps)
              << " bracket=[" << format_number(eps_lower) << ", "
              << format_number(eps_upper) << "] -> "
              << (inside ? "OK" : "MISMATCH") << "\n";
          if (!inside) verify_failed = true;
        } else {
          log << "verify: no oracle applicable at this size\n";
        }
      }
    }
    report["wall_ms"] = wall_ms();

    if (config.format == "csv") {
      std::ostringstream out;
      std::vector<std::string> keys;
      if (report.contains("delta_lower")) {
        keys = {"delta_lower", "delta_upper"};
      } else {
        keys = {"eps_lower", "eps_upper", "delta_target"};
      }
      for (const char* k : {"err_total", "err_tail", "err_trunc", "err_period",
                            "lambda", "k", "wall_ms"}) {
        keys.push_back(k);
      }
      std::string header, row;
      for (const std::string& k : keys) {
        header += (header.empty() ? "" : ",") + k;
        row += (row.empty() ? std::string() : std::string(",")) +
               format_number(report[k].get<double>());
      }
      header += ",L,n";
      row += "," + format_number(grid.half_width) + "," +
             std::to_string(grid.n);
      out << header << "\n" << row << "\n";
      result.output = out.str();
    } else if (config.format == "json") {
      result.output = report.dump(2) + "\n";
    } else {
      throw std::invalid_argument("format must be json or csv");
    }
    result.log = log.str();
    result.exit_code = verify_failed ? kExitVerifyMismatch : kExitOk;
    return result;
  } catch (const std::exception& e) {
    result.exit_code = kExitPrecondition;
    result.log = log.str() + "error: " + e.what() + "\n";
    return result;
  }
}

}  // namespace pldacct
