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

#ifndef PLDACCT_RUNNER_HPP_
#define PLDACCT_RUNNER_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "pldacct/mechanisms.hpp"

namespace pldacct {

// Exit codes of a run: 0 success, 2 precondition failure, 3 a --verify
// oracle fell outside the reported bracket.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitVerifyMismatch = 3;

struct CurveSweep {
  double eps_min = 0.0;
  double eps_max = 1.0;
  std::int64_t points = 2;
};

struct RunConfig {
  MechanismSpec mechanism;
  std::optional<double> eps;           // exactly one of eps / delta_target
  std::optional<double> delta_target;
  std::int64_t k = 1;
  std::int64_t n_grid = std::int64_t{1} << 17;
  double half_width = 20.0;            // L
  std::optional<double> lambda;        // default L/2 (reduced if too large)
  std::string format = "json";         // json | csv
  bool verify = false;
  std::optional<CurveSweep> curve;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string output;  // JSON or CSV report on success
  std::string log;     // verify / warning lines (stderr material)
};

// Executes one accountant run: builds the mechanism PLDs, composes, reports
// strict bounds with error budgets, optionally cross-checks with oracles or
// sweeps a delta(eps) curve.
RunResult run(const RunConfig& config);

}  // namespace pldacct

#endif  // PLDACCT_RUNNER_HPP_
