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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pldacct/runner.hpp"

namespace {

pldacct::CurveSweep parse_curve(const std::string& text) {
  pldacct::CurveSweep sweep;
  long long points = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lld", &sweep.eps_min, &sweep.eps_max,
                  &points) != 3) {
    throw CLI::ValidationError("--curve expects <eps_min>:<eps_max>:<points>");
  }
  sweep.points = points;
  return sweep;
}

struct CommonFlags {
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<double> lambda;
  std::optional<std::string> curve;
};

void add_common(CLI::App* cmd, pldacct::RunConfig& config, CommonFlags& flags,
                double default_half_width) {
  config.half_width = default_half_width;
  cmd->add_option("--eps", flags.eps, "target epsilon (reports a delta bracket)");
  cmd->add_option("--delta", flags.delta,
                  "target delta (reports an epsilon bracket)");
  cmd->add_option("--k", config.k, "number of compositions")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--n-grid", config.n_grid, "grid point count (even)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--L", config.half_width, "grid half-width");
  cmd->add_option("--lambda", flags.lambda,
                  "moment parameter for the error budget (default L/2)");
  cmd->add_option("--format", config.format, "output format: json|csv");
  cmd->add_flag("--verify", config.verify,
                "cross-check the bracket against a reference oracle");
  cmd->add_option("--curve", flags.curve,
                  "sweep eps as <eps_min>:<eps_max>:<points>, emitting CSV");
}

int finish(pldacct::RunConfig& config, const CommonFlags& flags) {
  config.eps = flags.eps;
  config.delta_target = flags.delta;
  config.lambda = flags.lambda;
  if (flags.curve.has_value()) config.curve = parse_curve(flags.curve.value());
  const pldacct::RunResult result = pldacct::run(config);
  if (!result.log.empty()) std::cerr << result.log;
  std::cout << result.output;
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pld-acct: strict (eps, delta) accounting for composed discrete "
      "mechanisms via privacy loss distributions"};
  app.require_subcommand(1);

  pldacct::RunConfig config;
  CommonFlags flags;

  auto* rr = app.add_subcommand("rr", "randomised response");
  double rr_p = 0.75;
  double rr_q = 0.0;
  rr->add_option("--p", rr_p, "truth probability")->required();
  rr->add_option("--q", rr_q, "Poisson subsampling ratio (optional)");
  add_common(rr, config, flags, 20.0);
  rr->callback([&]() {
    config.mechanism.kind = pldacct::MechanismSpec::Kind::kRr;
    config.mechanism.p = rr_p;
    config.mechanism.subsample_q = rr_q;
  });

  auto* ec = app.add_subcommand("exp-count",
                                "exponential mechanism on a counting query");
  double ec_eps_tilde = 0.05;
  std::int64_t ec_m = 50, ec_n_total = 100;
  double ec_q = 0.0;
  ec->add_option("--eps-tilde", ec_eps_tilde, "mechanism parameter")->required();
  ec->add_option("--m", ec_m, "count of property-0 elements")->required();
  ec->add_option("--n-total", ec_n_total, "dataset size");
  ec->add_option("--q", ec_q, "Poisson subsampling ratio (optional)");
  add_common(ec, config, flags, 20.0);
  ec->callback([&]() {
    config.mechanism.kind = pldacct::MechanismSpec::Kind::kExpCount;
    config.mechanism.eps_tilde = ec_eps_tilde;
    config.mechanism.m = ec_m;
    config.mechanism.n_total = ec_n_total;
    config.mechanism.subsample_q = ec_q;
  });

  auto* bin = app.add_subcommand("binomial", "shifted binomial comparison");
  std::int64_t bin_n = 1, bin_shift = 0;
  double bin_p = 0.5, bin_scale = 1.0, bin_q = 0.0;
  bin->add_option("--n-trials", bin_n, "binomial trial count")->required();
  bin->add_option("--p", bin_p, "binomial success probability");
  bin->add_option("--shift", bin_shift, "lattice shift between the datasets");
  bin->add_option("--scale", bin_scale, "lattice spacing (metadata only)");
  bin->add_option("--q", bin_q, "Poisson subsampling ratio (optional)");
  add_common(bin, config, flags, 20.0);
  bin->callback([&]() {
    config.mechanism.kind = pldacct::MechanismSpec::Kind::kBinomial;
    config.mechanism.n_trials = bin_n;
    config.mechanism.p = bin_p;
    config.mechanism.shift = bin_shift;
    config.mechanism.scale = bin_scale;
    config.mechanism.subsample_q = bin_q;
  });

  auto* sg = app.add_subcommand("subsampled-gaussian",
                                "Poisson-subsampled Gaussian mechanism");
  double sg_q = 0.02, sg_sigma = 2.0;
  sg->add_option("--q", sg_q, "subsampling ratio")->required();
  sg->add_option("--sigma", sg_sigma, "noise scale")->required();
  add_common(sg, config, flags, 8.0);
  sg->callback([&]() {
    config.mechanism.kind = pldacct::MechanismSpec::Kind::kSubsampledGaussian;
    config.mechanism.q = sg_q;
    config.mechanism.sigma = sg_sigma;
  });

  auto* comp = app.add_subcommand("compose", "compose a PLD read from CSV");
  std::string pld_file;
  comp->add_option("--pld-file", pld_file, "PLD CSV path")->required();
  add_common(comp, config, flags, 20.0);
  comp->callback([&]() {
    config.mechanism.kind = pldacct::MechanismSpec::Kind::kUserAtoms;
    config.mechanism.pld_file = pld_file;
  });

  CLI11_PARSE(app, argc, argv);
  return finish(config, flags);
}
